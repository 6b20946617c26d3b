#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "tin/augment.hpp"
#include "tin/loss.hpp"
#include "tin/model.hpp"

namespace tin {

struct TrainConfig {
  double lr0 = 1e-2;
  double weight_decay = 5e-4;
  double momentum = 0.9;
  int epochs = 120;
  int lr_drop_every = 10;
  double lr_drop_factor = 10.0;
  int batch_size = 1;
  std::uint64_t seed = 0;
  bool augment = true;  // false trains on the samples as given
  AugmentPlan augmentation = AugmentPlan::standard();
  int checkpoint_every = 0;  // epochs between checkpoint callbacks, 0 = never

  void validate() const;
};

/// lr0 / drop_factor^floor(epoch / drop_every), epoch counted from 0.
double lr_at(int epoch, const TrainConfig& cfg);

/// Momentum SGD with L2 weight decay on one tensor:
///   g' = g + wd * w;  v <- m * v - lr * g';  w <- w + v.
/// The gradient is zeroed afterwards.
template <typename Scalar>
void sgd_update(Tensor<Scalar>& param, typename Tensor<Scalar>::Array& velocity, double lr,
                const TrainConfig& cfg);

template <typename Scalar>
struct SgdState {
  std::vector<typename Tensor<Scalar>::Array> velocity;
};

/// Applies sgd_update to every parameter. Throws NumericError, leaving
/// parameters and velocities untouched, if any gradient is non-finite.
template <typename Scalar>
void sgd_step(NetworkGraph<Scalar>& graph, SgdState<Scalar>& state, double lr,
              const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double lr = 0.0;
  int skipped = 0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
};

/// `epoch<TAB>mean_loss<TAB>lr<TAB>skipped` per line.
void write_log(std::ostream& os, const TrainingLog& log);

template <typename Scalar>
using CheckpointHook = std::function<void(int epoch, const NetworkGraph<Scalar>&)>;

/// Seeded, shuffled SGD over the samples, expanded by `augmentation` when
/// `augment` is set.
/// Samples whose labels lack one of the two classes are skipped and counted.
/// Throws NumericError when the loss becomes non-finite.
template <typename Scalar>
TrainingLog train(NetworkGraph<Scalar>& graph, const std::vector<Sample>& data,
                  const TrainConfig& train_cfg, const LossConfig& loss_cfg,
                  const CheckpointHook<Scalar>& on_checkpoint = {});

}  // namespace tin
