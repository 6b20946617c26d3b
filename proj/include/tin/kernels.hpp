#pragma once

#include <Eigen/Core>

#include <vector>

#include "tin/types.hpp"

namespace tin {

/// Horizontal Sobel operator, applied as a correlation.
const Eigen::Matrix3d& sobel_x();
/// Vertical Sobel operator (transpose of sobel_x); y grows downwards.
const Eigen::Matrix3d& sobel_y();

struct DirectionalKernel {
  double angle = 0.0;  // radians in [0, 2pi)
  Eigen::Matrix3d weights = Eigen::Matrix3d::Zero();
};

/// Steered first-order kernels cos(t) Sx + sin(t) Sy at t = 2 pi k / count.
std::vector<DirectionalKernel> directional_bank(int count = 16);

/// 3x3 correlation with replicated borders.
GrayImage correlate3x3(const GrayImage& image, const Eigen::Matrix3d& kernel);

/// Sobel gradient magnitude normalised by its image maximum.
/// An image without gradient maps to all zeros.
EdgeMap sobel_detect(const GrayImage& image);

}  // namespace tin
