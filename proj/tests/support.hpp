#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tin/autograd.hpp"
#include "tin/types.hpp"

namespace tin::testing {

inline Tensor<double> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0,
                                    double hi = 1.0) {
  Tensor<double> t(std::move(shape));
  std::uniform_real_distribution<double> dist(lo, hi);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

using LossBuilder = std::function<Var<double>(Tape<double>&, const std::vector<Var<double>>&)>;

struct GradCheck {
  double max_rel_error = 0.0;
  Index checked = 0;
};

/// Compares tape gradients of a scalar loss with central differences.
/// `per_tensor` > 0 limits the coordinates probed in each tensor.
inline GradCheck check_gradients(std::vector<Tensor<double>*> inputs, const LossBuilder& build,
                                 double eps = 1e-4, Index per_tensor = 0,
                                 std::uint64_t seed = 7) {
  auto evaluate = [&] {
    Tape<double> tape;
    std::vector<Var<double>> vars;
    for (Tensor<double>* t : inputs) vars.push_back(tape.constant(*t));
    return build(tape, vars).value().data()[0];
  };

  std::vector<Tensor<double>::Array> analytic;
  {
    Tape<double> tape;
    std::vector<Var<double>> vars;
    for (Tensor<double>* t : inputs) {
      t->set_requires_grad(true);
      t->zero_grad();
      vars.push_back(tape.parameter(*t));
    }
    tape.backward(build(tape, vars));
    for (Tensor<double>* t : inputs) analytic.push_back(t->grad());
  }

  std::mt19937_64 rng(seed);
  GradCheck result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    Tensor<double>& t = *inputs[k];
    std::vector<Index> coords(static_cast<std::size_t>(t.size()));
    for (Index i = 0; i < t.size(); ++i) coords[static_cast<std::size_t>(i)] = i;
    if (per_tensor > 0 && static_cast<Index>(coords.size()) > per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(static_cast<std::size_t>(per_tensor));
    }
    for (Index i : coords) {
      const double saved = t.data()[i];
      t.data()[i] = saved + eps;
      const double up = evaluate();
      t.data()[i] = saved - eps;
      const double down = evaluate();
      t.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k][i];
      const double scale = std::max({std::abs(a), std::abs(numeric), 1e-6});
      result.max_rel_error = std::max(result.max_rel_error, std::abs(a - numeric) / scale);
      ++result.checked;
    }
  }
  return result;
}

/// Scalar re-derivation of the balanced cross-entropy, summed over the
/// side maps and the fused map, straight from probabilities.
inline double reference_total_loss(const std::vector<EdgeMap>& logit_maps, const GroundTruth& gt,
                                   double gamma = 1.1, int threshold = 64) {
  double pos = 0.0, neg = 0.0;
  for (Index y = 0; y < gt.height(); ++y) {
    for (Index x = 0; x < gt.width(); ++x) {
      const int v = gt.values(y, x);
      if (v == 0) neg += 1.0;
      else if (v >= threshold) pos += 1.0;
    }
  }
  const double total = pos + neg;
  const double alpha = gamma * pos / total, beta = neg / total;
  double loss = 0.0;
  for (const EdgeMap& z : logit_maps) {
    for (Index y = 0; y < gt.height(); ++y) {
      for (Index x = 0; x < gt.width(); ++x) {
        const int v = gt.values(y, x);
        const double p = 1.0 / (1.0 + std::exp(-z(y, x)));
        if (v == 0) loss -= alpha * std::log(1.0 - p);
        else if (v >= threshold) loss -= beta * std::log(p);
      }
    }
  }
  return loss;
}

/// Random labels with all three pixel classes present.
inline GroundTruth random_labels(Index h, Index w, std::mt19937_64& rng) {
  GroundTruth gt{LabelMap::Zero(h, w)};
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> weak(1, 63), strong(64, 255);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      const int r = pick(rng);
      gt.values(y, x) = static_cast<std::uint8_t>(r < 6 ? 0 : r < 8 ? weak(rng) : strong(rng));
    }
  }
  gt.values(0, 0) = 0;
  gt.values(0, 1) = 255;
  gt.values(0, 2) = 30;
  return gt;
}

}  // namespace tin::testing
