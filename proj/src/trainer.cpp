#include "tin/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <random>
#include <stdexcept>

namespace tin {

void TrainConfig::validate() const {
  if (!(lr0 > 0.0) || weight_decay < 0.0 || momentum < 0.0 || !(lr_drop_factor > 0.0)) {
    throw std::invalid_argument("train config: rates must be positive");
  }
  if (epochs < 0 || lr_drop_every < 1 || batch_size < 1 || checkpoint_every < 0) {
    throw std::invalid_argument("train config: invalid epoch/batch settings");
  }
  const AugmentPlan& a = augmentation;
  if (augment && (a.rotations_deg.empty() || a.flips.empty() || a.scales.empty() ||
                  std::any_of(a.scales.begin(), a.scales.end(), [](double s) { return !(s > 0.0); }))) {
    throw std::invalid_argument("train config: augmentation lists must be non-empty, scales > 0");
  }
}

double lr_at(int epoch, const TrainConfig& cfg) {
  if (epoch < 0) throw std::invalid_argument("lr_at: epoch must be >= 0");
  return cfg.lr0 / std::pow(cfg.lr_drop_factor, epoch / cfg.lr_drop_every);
}

template <typename Scalar>
void sgd_update(Tensor<Scalar>& param, typename Tensor<Scalar>::Array& velocity, double lr,
                const TrainConfig& cfg) {
  auto& w = param.data();
  auto& g = param.grad();
  if (velocity.size() != w.size()) velocity = Tensor<Scalar>::Array::Zero(w.size());
  const Scalar m = static_cast<Scalar>(cfg.momentum);
  const Scalar l = static_cast<Scalar>(lr);
  const Scalar wd = static_cast<Scalar>(cfg.weight_decay);
  velocity = m * velocity - l * (g + wd * w);
  w += velocity;
  g.setZero();
}

template <typename Scalar>
void sgd_step(NetworkGraph<Scalar>& graph, SgdState<Scalar>& state, double lr,
              const TrainConfig& cfg) {
  auto& params = graph.params();
  for (auto& p : params) {
    if (p.tensor.has_grad() && !p.tensor.grad().isFinite().all()) {
      throw NumericError("non-finite gradient in '" + p.name + "'; step aborted");
    }
  }
  state.velocity.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    sgd_update(params[i].tensor, state.velocity[i], lr, cfg);
  }
}

void write_log(std::ostream& os, const TrainingLog& log) {
  for (const EpochRecord& r : log.epochs) {
    os << r.epoch << '\t' << std::setprecision(9) << r.mean_loss << '\t' << r.lr << '\t'
       << r.skipped << '\n';
  }
}

template <typename Scalar>
TrainingLog train(NetworkGraph<Scalar>& graph, const std::vector<Sample>& data,
                  const TrainConfig& train_cfg, const LossConfig& loss_cfg,
                  const CheckpointHook<Scalar>& on_checkpoint) {
  train_cfg.validate();
  loss_cfg.validate();
  if (data.empty()) throw std::invalid_argument("train: empty dataset");

  // (sample, variant) pairs that survive the minimum crop size.
  const std::vector<AugmentVariant> variants =
      train_cfg.augment ? train_cfg.augmentation.variants() : AugmentPlan::identity().variants();
  std::vector<std::pair<std::size_t, std::size_t>> items;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const Sample& sample = data[s];
    if (sample.image.dim(2) != sample.gt.height() || sample.image.dim(3) != sample.gt.width()) {
      throw ShapeError("train: sample " + std::to_string(s) + " image/label size mismatch");
    }
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const auto [h, w] = variant_size(sample.image.dim(2), sample.image.dim(3), variants[v]);
      if (h >= kMinAugmentSize && w >= kMinAugmentSize) items.emplace_back(s, v);
    }
  }

  TrainingLog log;
  SgdState<Scalar> state;
  std::mt19937_64 rng(train_cfg.seed);
  graph.zero_grad();
  for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
    const double lr = lr_at(epoch, train_cfg);
    std::shuffle(items.begin(), items.end(), rng);
    double loss_sum = 0.0;
    int trained = 0, skipped = 0, pending = 0;
    for (const auto& [s, v] : items) {
      std::optional<Sample> sample = apply_variant(data[s], variants[v]);
      Tape<Scalar> tape;
      Var<Scalar> image = [&] {
        if constexpr (std::is_same_v<Scalar, float>) return tape.constant(sample->image);
        else return tape.input(sample->image.template cast<Scalar>());
      }();
      ForwardPass<Scalar> pass = forward(tape, graph, image);
      Var<Scalar> loss;
      try {
        loss = total_loss<Scalar>(pass.side_logits, pass.fused_logits, sample->gt, loss_cfg);
      } catch (const DegenerateLabelError&) {
        ++skipped;
        continue;
      }
      const double value = static_cast<double>(loss.value().data()[0]);
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1));
      }
      tape.backward(loss);
      loss_sum += value;
      ++trained;
      if (++pending == train_cfg.batch_size) {
        sgd_step(graph, state, lr, train_cfg);
        pending = 0;
      }
    }
    if (pending > 0) sgd_step(graph, state, lr, train_cfg);
    if (skipped > 0) {
      std::cerr << "warning: epoch " << epoch + 1 << " skipped " << skipped
                << " samples with degenerate labels\n";
    }
    log.epochs.push_back(
        {epoch + 1, trained > 0 ? loss_sum / trained : 0.0, lr, skipped});
    if (on_checkpoint && train_cfg.checkpoint_every > 0 &&
        (epoch + 1) % train_cfg.checkpoint_every == 0) {
      on_checkpoint(epoch + 1, graph);
    }
  }
  return log;
}

template void sgd_update(Tensor<float>&, Tensor<float>::Array&, double, const TrainConfig&);
template void sgd_update(Tensor<double>&, Tensor<double>::Array&, double, const TrainConfig&);
template void sgd_step(NetworkGraph<float>&, SgdState<float>&, double, const TrainConfig&);
template void sgd_step(NetworkGraph<double>&, SgdState<double>&, double, const TrainConfig&);
template TrainingLog train(NetworkGraph<float>&, const std::vector<Sample>&, const TrainConfig&,
                           const LossConfig&, const CheckpointHook<float>&);
template TrainingLog train(NetworkGraph<double>&, const std::vector<Sample>&,
                           const TrainConfig&, const LossConfig&,
                           const CheckpointHook<double>&);

}  // namespace tin
