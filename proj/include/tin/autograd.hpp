#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "tin/tensor.hpp"

namespace tin {

enum class OpKind {
  kConv2d,
  kMaxPool2x2,
  kResizeBilinear,
  kSigmoid,
  kRelu,
  kAdd,
  kConcatChannels,
  kReflectPadEven,
  kCrop,
  kSum,
  kBalancedCrossEntropy,
};

const char* op_name(OpKind kind);

template <typename Scalar>
class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
template <typename Scalar>
struct Var {
  Tape<Scalar>* tape = nullptr;
  std::size_t id = 0;

  const Tensor<Scalar>& value() const { return tape->value(*this); }
  const Shape& shape() const { return value().shape(); }
  Index dim(Index i) const { return value().dim(i); }
};

/// Records differentiable operations in evaluation order and replays them
/// in reverse to accumulate gradients.
///
/// Leaves either reference caller-owned tensors (parameters, constants) or
/// own a copy (inputs). Gradients for intermediate nodes live on the tape;
/// gradients for parameter leaves are accumulated into the parameter
/// tensor's own grad buffer, so repeated backward passes add up until the
/// caller zeroes them.
template <typename Scalar>
class Tape {
 public:
  using Array = typename Tensor<Scalar>::Array;
  using BackwardFn = std::function<void(Tape&)>;

  struct Record {
    OpKind kind;
    std::vector<std::size_t> inputs;
    std::size_t output;
    BackwardFn backward;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Binds a caller-owned tensor; its grad receives accumulated gradients
  /// when it has requires_grad set.
  Var<Scalar> parameter(Tensor<Scalar>& tensor);
  /// Binds a caller-owned tensor that never receives gradients.
  Var<Scalar> constant(const Tensor<Scalar>& tensor);
  /// Temporaries are moved onto the tape instead of being referenced.
  Var<Scalar> constant(Tensor<Scalar>&& tensor) { return input(std::move(tensor)); }
  /// Takes ownership of a tensor; its gradient is readable through grad().
  Var<Scalar> input(Tensor<Scalar> tensor, bool requires_grad = false);

  /// Appends an op result. `backward` reads the output gradient through
  /// grad() and adds into the inputs through grad_sink().
  Var<Scalar> emit(OpKind kind, std::vector<std::size_t> inputs,
                   Tensor<Scalar> output, BackwardFn backward);

  const Tensor<Scalar>& value(Var<Scalar> v) const { return *nodes_.at(v.id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  bool requires_grad(Var<Scalar> v) const { return requires_grad(v.id); }

  /// Gradient of node `id` (zeros when nothing flowed into it).
  const Array& grad(std::size_t id);
  const Array& grad(Var<Scalar> v) { return grad(v.id); }
  /// Mutable gradient buffer of node `id`, or nullptr when the node does
  /// not require a gradient.
  Array* grad_sink(std::size_t id);

  /// Reverse pass from a scalar node. Returns the number of records visited.
  std::size_t backward(Var<Scalar> loss);

  const std::vector<Record>& records() const { return records_; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    const Tensor<Scalar>* value = nullptr;
    Tensor<Scalar>* target = nullptr;
    bool requires_grad = false;
    bool is_leaf = true;
    std::optional<Array> grad;
  };

  Var<Scalar> push(Node node);

  std::deque<Tensor<Scalar>> owned_;
  std::vector<Node> nodes_;
  std::vector<Record> records_;
};

struct Conv2dOptions {
  Index stride = 1;
  Index dilation = 1;
  Index padding = 0;

  /// Zero padding that keeps H and W unchanged at stride 1.
  static Conv2dOptions same(Index kernel, Index dilation) {
    return {1, dilation, dilation * (kernel - 1) / 2};
  }
};

/// out[n,o,y,x] = bias[o] + sum_{c,i,j} weight[o,c,i,j] *
///   input[n,c, y*stride - pad + dilation*i, x*stride - pad + dilation*j],
/// out-of-range reads are zero.
template <typename Scalar>
Var<Scalar> conv2d(Var<Scalar> input, Var<Scalar> weight, Var<Scalar> bias,
                   const Conv2dOptions& options);

/// 2x2 max pooling with stride 2; odd trailing rows/cols use truncated
/// windows. Gradient goes to the first maximum in row-major order.
template <typename Scalar>
Var<Scalar> max_pool_2x2(Var<Scalar> input);

/// Align-corners bilinear resampling.
template <typename Scalar>
Var<Scalar> resize_bilinear(Var<Scalar> input, Index out_height, Index out_width);

template <typename Scalar>
Var<Scalar> sigmoid(Var<Scalar> input);

template <typename Scalar>
Var<Scalar> relu(Var<Scalar> input);

template <typename Scalar>
Var<Scalar> add(Var<Scalar> a, Var<Scalar> b);

template <typename Scalar>
Var<Scalar> concat_channels(std::span<const Var<Scalar>> inputs);

/// Reflect-pads the bottom row / right column so H and W become even.
template <typename Scalar>
Var<Scalar> reflect_pad_to_even(Var<Scalar> input);

/// Keeps the top-left height x width window.
template <typename Scalar>
Var<Scalar> crop(Var<Scalar> input, Index height, Index width);

template <typename Scalar>
Var<Scalar> sum(Var<Scalar> input);

/// Numerically stable logistic function.
template <typename Scalar>
inline Scalar stable_sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

/// Align-corners bilinear resize of a raw [N,C,H,W] tensor (no tape).
template <typename Scalar>
Tensor<Scalar> resize_bilinear_values(const Tensor<Scalar>& input, Index out_height,
                                      Index out_width);

}  // namespace tin
