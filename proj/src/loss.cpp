#include "tin/loss.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace tin {

void LossConfig::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("loss gamma must be positive");
  if (threshold <= 0 || threshold > 255) {
    throw std::invalid_argument("loss threshold must be in (0, 255]");
  }
}

ClassWeights class_weights(const GroundTruth& gt, const LossConfig& cfg) {
  ClassWeights w;
  for (Index i = 0; i < gt.values.size(); ++i) {
    switch (classify(gt.values.data()[i], cfg.threshold)) {
      case PixelClass::kNegative: ++w.negatives; break;
      case PixelClass::kPositive: ++w.positives; break;
      case PixelClass::kIgnored: break;
    }
  }
  if (w.positives == 0 || w.negatives == 0) {
    throw DegenerateLabelError("ground truth needs both edge and non-edge pixels (" +
                               std::to_string(w.positives) + " edge, " +
                               std::to_string(w.negatives) + " non-edge)");
  }
  const double total = static_cast<double>(w.positives + w.negatives);
  w.alpha = cfg.gamma * static_cast<double>(w.positives) / total;
  w.beta = static_cast<double>(w.negatives) / total;
  return w;
}

namespace {

// log(1 + e^x) without overflow.
template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return std::max(x, Scalar(0)) + log1p(exp(-std::abs(x)));
}

}  // namespace

template <typename Scalar>
Var<Scalar> map_loss(Var<Scalar> logits, const GroundTruth& gt, const LossConfig& cfg,
                     const ClassWeights& weights) {
  const Tensor<Scalar>& z = logits.value();
  if (z.rank() != 4 || z.dim(0) != 1 || z.dim(1) != 1 || z.dim(2) != gt.height() ||
      z.dim(3) != gt.width()) {
    throw ShapeError("map_loss: prediction " + to_string(z.shape()) +
                     " does not match ground truth " + std::to_string(gt.height()) + "x" +
                     std::to_string(gt.width()));
  }
  // Per-pixel coefficient and sign: negatives -> (alpha, 0), positives -> (beta, 1).
  auto coeff = std::make_shared<typename Tensor<Scalar>::Array>(z.size());
  auto target = std::make_shared<typename Tensor<Scalar>::Array>(z.size());
  Scalar acc = 0;
  for (Index i = 0; i < z.size(); ++i) {
    const Scalar v = z.data()[i];
    switch (classify(gt.values.data()[i], cfg.threshold)) {
      case PixelClass::kNegative:
        (*coeff)[i] = static_cast<Scalar>(weights.alpha);
        (*target)[i] = 0;
        acc += (*coeff)[i] * softplus(v);
        break;
      case PixelClass::kPositive:
        (*coeff)[i] = static_cast<Scalar>(weights.beta);
        (*target)[i] = 1;
        acc += (*coeff)[i] * softplus(-v);
        break;
      case PixelClass::kIgnored:
        (*coeff)[i] = 0;
        (*target)[i] = 0;
        break;
    }
  }
  Tensor<Scalar> out(Shape{});
  out.data()[0] = acc;
  Tape<Scalar>& tape = *logits.tape;
  const std::size_t zi = logits.id;
  return tape.emit(OpKind::kBalancedCrossEntropy, {zi}, std::move(out),
                   [coeff, target, zi, oid = tape.node_count()](Tape<Scalar>& t) {
                     auto* gz = t.grad_sink(zi);
                     if (!gz) return;
                     const Scalar g = t.grad(oid)[0];
                     const auto& z = t.value(Var<Scalar>{&t, zi}).data();
                     for (Index i = 0; i < z.size(); ++i) {
                       if ((*coeff)[i] == Scalar(0)) continue;
                       (*gz)[i] += g * (*coeff)[i] * (stable_sigmoid(z[i]) - (*target)[i]);
                     }
                   });
}

template <typename Scalar>
Var<Scalar> map_loss(Var<Scalar> logits, const GroundTruth& gt, const LossConfig& cfg) {
  return map_loss(logits, gt, cfg, class_weights(gt, cfg));
}

template <typename Scalar>
Var<Scalar> total_loss(std::span<const Var<Scalar>> side_logits, Var<Scalar> fused_logits,
                       const GroundTruth& gt, const LossConfig& cfg) {
  const ClassWeights weights = class_weights(gt, cfg);
  Var<Scalar> total = map_loss(fused_logits, gt, cfg, weights);
  for (const Var<Scalar>& side : side_logits) {
    total = add(map_loss(side, gt, cfg, weights), total);
  }
  return total;
}

double map_loss_value(const EdgeMap& prediction, const GroundTruth& gt, const LossConfig& cfg) {
  if (prediction.rows() != gt.height() || prediction.cols() != gt.width()) {
    throw ShapeError("map_loss_value: prediction and ground truth sizes differ");
  }
  const ClassWeights w = class_weights(gt, cfg);
  double acc = 0.0;
  for (Index i = 0; i < prediction.size(); ++i) {
    const double p = prediction.data()[i];
    switch (classify(gt.values.data()[i], cfg.threshold)) {
      case PixelClass::kNegative: acc -= w.alpha * std::log1p(-p); break;
      case PixelClass::kPositive: acc -= w.beta * std::log(p); break;
      case PixelClass::kIgnored: break;
    }
  }
  return acc;
}

#define TIN_INSTANTIATE_LOSS(S)                                                           \
  template Var<S> map_loss(Var<S>, const GroundTruth&, const LossConfig&);                \
  template Var<S> map_loss(Var<S>, const GroundTruth&, const LossConfig&,                 \
                           const ClassWeights&);                                          \
  template Var<S> total_loss(std::span<const Var<S>>, Var<S>, const GroundTruth&,         \
                             const LossConfig&);

TIN_INSTANTIATE_LOSS(float)
TIN_INSTANTIATE_LOSS(double)

#undef TIN_INSTANTIATE_LOSS

}  // namespace tin
