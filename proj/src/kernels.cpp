#include "tin/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tin/errors.hpp"

namespace tin {

const Eigen::Matrix3d& sobel_x() {
  static const Eigen::Matrix3d k = [] {
    Eigen::Matrix3d m;
    m << -1, 0, 1, -2, 0, 2, -1, 0, 1;
    return m;
  }();
  return k;
}

const Eigen::Matrix3d& sobel_y() {
  static const Eigen::Matrix3d k = sobel_x().transpose();
  return k;
}

std::vector<DirectionalKernel> directional_bank(int count) {
  if (count < 1) throw std::invalid_argument("directional_bank: count must be >= 1");
  std::vector<DirectionalKernel> bank;
  bank.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    DirectionalKernel kernel;
    kernel.angle = 2.0 * std::numbers::pi * k / count;
    // Exact values at the axis angles so the bank degenerates to Sobel.
    double c = std::cos(kernel.angle), s = std::sin(kernel.angle);
    if (4 * k % count == 0) {
      c = std::round(c);
      s = std::round(s);
    }
    kernel.weights = c * sobel_x() + s * sobel_y();
    bank.push_back(kernel);
  }
  return bank;
}

GrayImage correlate3x3(const GrayImage& image, const Eigen::Matrix3d& kernel) {
  const Index h = image.rows(), w = image.cols();
  GrayImage out(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Index i = 0; i < 3; ++i) {
        const Index yy = std::clamp<Index>(y + i - 1, 0, h - 1);
        for (Index j = 0; j < 3; ++j) {
          const Index xx = std::clamp<Index>(x + j - 1, 0, w - 1);
          acc += kernel(i, j) * image(yy, xx);
        }
      }
      out(y, x) = acc;
    }
  }
  return out;
}

EdgeMap sobel_detect(const GrayImage& image) {
  if (image.rows() < 3 || image.cols() < 3) {
    throw ShapeError("sobel_detect: image must be at least 3x3");
  }
  const GrayImage gx = correlate3x3(image, sobel_x());
  const GrayImage gy = correlate3x3(image, sobel_y());
  EdgeMap magnitude = (gx.square() + gy.square()).sqrt();
  // Rounding residue on flat regions must not be stretched up to 1.
  const double floor = 1e-12 * std::max(1.0, image.abs().maxCoeff());
  magnitude = (magnitude > floor).select(magnitude, 0.0);
  const double peak = magnitude.maxCoeff();
  if (peak > 0.0) magnitude /= peak;
  return magnitude;
}

}  // namespace tin
