#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "tin/tensor.hpp"

namespace tin {

template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-pixel edge probability in [0,1].
using EdgeMap = Plane<double>;
/// Grayscale intensities in [0,1].
using GrayImage = Plane<double>;
using BinaryMap = Plane<bool>;
using LabelMap = Plane<std::uint8_t>;

/// Annotator consensus x 255 per pixel: 0 is non-edge, values below the
/// loss threshold are ignored, the rest are edges.
struct GroundTruth {
  LabelMap values;

  Index height() const { return values.rows(); }
  Index width() const { return values.cols(); }
};

/// An RGB image tensor [1,3,H,W] with values in [0,1] and its labels.
struct Sample {
  Tensor<float> image;
  GroundTruth gt;
};

/// Channel mean of an [1,C,H,W] image.
template <typename Scalar>
GrayImage to_gray(const Tensor<Scalar>& image) {
  const Index c = image.dim(1), h = image.dim(2), w = image.dim(3);
  GrayImage gray = GrayImage::Zero(h, w);
  for (Index k = 0; k < c; ++k) {
    for (Index y = 0; y < h; ++y) {
      for (Index x = 0; x < w; ++x) gray(y, x) += static_cast<double>(image(0, k, y, x));
    }
  }
  return gray / static_cast<double>(c);
}

/// Extracts plane (n, c) of a 4-D tensor as a double map.
template <typename Scalar>
EdgeMap plane_of(const Tensor<Scalar>& t, Index n = 0, Index c = 0) {
  const Index h = t.dim(2), w = t.dim(3);
  EdgeMap out(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) out(y, x) = static_cast<double>(t(n, c, y, x));
  }
  return out;
}

}  // namespace tin
