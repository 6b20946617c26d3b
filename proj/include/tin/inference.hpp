#pragma once

#include <vector>

#include "tin/model.hpp"

namespace tin {

/// Smallest H or W accepted for prediction.
constexpr Index kMinInputSize = 16;

/// Fused edge map at input resolution.
template <typename Scalar>
EdgeMap predict(const NetworkGraph<Scalar>& graph, const Tensor<Scalar>& image);

/// Network input size for `scale`: unchanged at 1, otherwise the nearest
/// even integer to n * scale.
Index scaled_size(Index n, double scale);

/// Mean over scales of the fused map predicted on a resized copy and
/// resized back. Scales whose input would be smaller than kMinInputSize
/// are skipped with a warning on stderr; if all are skipped, throws.
template <typename Scalar>
EdgeMap predict_multiscale(const NetworkGraph<Scalar>& graph, const Tensor<Scalar>& image,
                           const std::vector<double>& scales = {0.5, 1.0, 1.5});

}  // namespace tin
