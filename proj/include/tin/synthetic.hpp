#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tin/types.hpp"

namespace tin {

struct SyntheticOptions {
  Index size = 96;
  int min_shapes = 2;
  int max_shapes = 3;
  double noise_std = 0.03;
  int supersample = 4;  // per-axis anti-aliasing samples
};

/// Anti-aliased random circles and convex polygons over a flat background.
/// Labels are 255 on the pixel nearest each visible outline, forming one-pixel
/// curves, and 0 elsewhere.
std::vector<Sample> make_synthetic(int count, std::uint64_t seed,
                                   const SyntheticOptions& options = {});

/// Anti-aliased white square on black, inset by `margin` plus a quarter
/// pixel. Labels mark its outermost ring of pixels.
Sample make_square(Index size, Index margin);

/// Writes img_NNN.png / gt_NNN.png and a manifest.tsv into `dir`.
void write_synthetic(const std::filesystem::path& dir, const std::vector<Sample>& samples);

}  // namespace tin
