#include <iostream>

#include "tin/cli.hpp"

int main(int argc, char** argv) { return tin::run_cli(argc, argv, std::cout, std::cerr); }
