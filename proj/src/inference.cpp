#include "tin/inference.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace tin {

template <typename Scalar>
EdgeMap predict(const NetworkGraph<Scalar>& graph, const Tensor<Scalar>& image) {
  if (image.rank() != 4 || image.dim(2) < kMinInputSize || image.dim(3) < kMinInputSize) {
    throw ShapeError("predict: image must be at least 16x16, got " + to_string(image.shape()));
  }
  Tape<Scalar> tape;
  ForwardPass<Scalar> pass = forward(tape, graph, tape.constant(image));
  return plane_of(sigmoid(pass.fused_logits).value());
}

Index scaled_size(Index n, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scales must be positive");
  if (scale == 1.0) return n;
  return 2 * static_cast<Index>(std::lround(static_cast<double>(n) * scale / 2.0));
}

template <typename Scalar>
EdgeMap predict_multiscale(const NetworkGraph<Scalar>& graph, const Tensor<Scalar>& image,
                           const std::vector<double>& scales) {
  if (image.rank() != 4) throw ShapeError("predict_multiscale: expected [1,3,H,W]");
  const Index h = image.dim(2), w = image.dim(3);
  EdgeMap total = EdgeMap::Zero(h, w);
  int used = 0;
  for (double s : scales) {
    const Index sh = scaled_size(h, s), sw = scaled_size(w, s);
    if (sh < kMinInputSize || sw < kMinInputSize) {
      std::cerr << "warning: skipping scale " << s << " (" << sh << "x" << sw
                << " is below the minimum input size)\n";
      continue;
    }
    if (sh == h && sw == w) {
      total += predict(graph, image);
    } else {
      const EdgeMap map = predict(graph, resize_bilinear_values(image, sh, sw));
      Tensor<double> t({1, 1, sh, sw});
      Eigen::Map<EdgeMap>(t.data().data(), sh, sw) = map;
      total += plane_of(resize_bilinear_values(t, h, w));
    }
    ++used;
  }
  if (used == 0) throw ShapeError("predict_multiscale: every scale was below the minimum size");
  return total / static_cast<double>(used);
}

template EdgeMap predict(const NetworkGraph<float>&, const Tensor<float>&);
template EdgeMap predict(const NetworkGraph<double>&, const Tensor<double>&);
template EdgeMap predict_multiscale(const NetworkGraph<float>&, const Tensor<float>&,
                                    const std::vector<double>&);
template EdgeMap predict_multiscale(const NetworkGraph<double>&, const Tensor<double>&,
                                    const std::vector<double>&);

}  // namespace tin
