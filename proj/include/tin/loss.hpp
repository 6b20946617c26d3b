#pragma once

#include <span>

#include "tin/autograd.hpp"
#include "tin/types.hpp"

namespace tin {

struct LossConfig {
  double gamma = 1.1;  // extra weight on the negative term
  int threshold = 64;  // labels in (0, threshold) are ignored

  void validate() const;
};

enum class PixelClass { kNegative, kIgnored, kPositive };

inline PixelClass classify(int value, int threshold) {
  if (value == 0) return PixelClass::kNegative;
  return value < threshold ? PixelClass::kIgnored : PixelClass::kPositive;
}

struct ClassWeights {
  double alpha = 0.0;  // applied to negatives: gamma * Y+ / Y
  double beta = 0.0;   // applied to positives: Y- / Y
  Index positives = 0;
  Index negatives = 0;
};

/// Class-balancing weights; ignored pixels are excluded from every count.
/// Throws DegenerateLabelError when either class is empty.
ClassWeights class_weights(const GroundTruth& gt, const LossConfig& cfg);

/// Balanced cross-entropy of one logit map [1,1,H,W] against `gt`:
///   sum_neg -alpha log(1 - p) + sum_pos -beta log(p),  p = sigmoid(logit),
/// evaluated in the softplus form so saturated logits stay finite.
template <typename Scalar>
Var<Scalar> map_loss(Var<Scalar> logits, const GroundTruth& gt, const LossConfig& cfg);

/// Same loss for precomputed weights (shared across the maps of one image).
template <typename Scalar>
Var<Scalar> map_loss(Var<Scalar> logits, const GroundTruth& gt, const LossConfig& cfg,
                     const ClassWeights& weights);

/// Sum of the side-output losses plus the fused-output loss.
template <typename Scalar>
Var<Scalar> total_loss(std::span<const Var<Scalar>> side_logits, Var<Scalar> fused_logits,
                       const GroundTruth& gt, const LossConfig& cfg);

/// Probability-domain evaluation of the same loss (no gradients).
double map_loss_value(const EdgeMap& prediction, const GroundTruth& gt, const LossConfig& cfg);

}  // namespace tin
