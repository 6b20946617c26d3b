#include "tin/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace tin {

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kConv2d: return "conv2d";
    case OpKind::kMaxPool2x2: return "max_pool_2x2";
    case OpKind::kResizeBilinear: return "resize_bilinear";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kRelu: return "relu";
    case OpKind::kAdd: return "add";
    case OpKind::kConcatChannels: return "concat_channels";
    case OpKind::kReflectPadEven: return "reflect_pad_to_even";
    case OpKind::kCrop: return "crop";
    case OpKind::kSum: return "sum";
    case OpKind::kBalancedCrossEntropy: return "balanced_cross_entropy";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Tape

template <typename Scalar>
Var<Scalar> Tape<Scalar>::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var<Scalar>{this, nodes_.size() - 1};
}

template <typename Scalar>
Var<Scalar> Tape<Scalar>::parameter(Tensor<Scalar>& tensor) {
  Node node;
  node.value = &tensor;
  node.target = &tensor;
  node.requires_grad = tensor.requires_grad();
  return push(std::move(node));
}

template <typename Scalar>
Var<Scalar> Tape<Scalar>::constant(const Tensor<Scalar>& tensor) {
  Node node;
  node.value = &tensor;
  return push(std::move(node));
}

template <typename Scalar>
Var<Scalar> Tape<Scalar>::input(Tensor<Scalar> tensor, bool requires_grad) {
  owned_.push_back(std::move(tensor));
  Node node;
  node.value = &owned_.back();
  node.requires_grad = requires_grad;
  return push(std::move(node));
}

template <typename Scalar>
Var<Scalar> Tape<Scalar>::emit(OpKind kind, std::vector<std::size_t> inputs,
                               Tensor<Scalar> output, BackwardFn backward) {
  bool needs_grad = false;
  for (std::size_t id : inputs) needs_grad = needs_grad || nodes_.at(id).requires_grad;
  owned_.push_back(std::move(output));
  Node node;
  node.value = &owned_.back();
  node.requires_grad = needs_grad;
  node.is_leaf = false;
  Var<Scalar> out = push(std::move(node));
  if (needs_grad) {
    records_.push_back(Record{kind, std::move(inputs), out.id, std::move(backward)});
  }
  return out;
}

template <typename Scalar>
const typename Tape<Scalar>::Array& Tape<Scalar>::grad(std::size_t id) {
  Node& node = nodes_.at(id);
  if (!node.grad) node.grad = Array::Zero(node.value->size());
  return *node.grad;
}

template <typename Scalar>
typename Tape<Scalar>::Array* Tape<Scalar>::grad_sink(std::size_t id) {
  Node& node = nodes_.at(id);
  if (!node.requires_grad) return nullptr;
  if (!node.grad) node.grad = Array::Zero(node.value->size());
  return &*node.grad;
}

template <typename Scalar>
std::size_t Tape<Scalar>::backward(Var<Scalar> loss) {
  if (loss.tape != this) throw std::invalid_argument("loss belongs to another tape");
  Node& root = nodes_.at(loss.id);
  if (root.value->size() != 1) {
    throw ShapeError("backward requires a scalar loss, got shape " +
                     to_string(root.value->shape()));
  }
  // Intermediate and parameter buffers start fresh; owned inputs accumulate.
  for (Node& node : nodes_) {
    if (!node.is_leaf || node.target != nullptr) node.grad.reset();
  }
  if (!root.requires_grad) return 0;
  if (!root.grad) root.grad = Array::Zero(1);
  (*root.grad)[0] += Scalar(1);

  std::size_t visited = 0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    ++visited;
    if (!nodes_[it->output].grad) continue;  // nothing flowed here
    it->backward(*this);
  }
  for (Node& node : nodes_) {
    if (!node.is_leaf || !node.requires_grad) continue;
    if (!node.grad) node.grad = Array::Zero(node.value->size());
    if (node.target != nullptr) node.target->grad() += *node.grad;
  }
  return visited;
}

// ---------------------------------------------------------------------------
// Ops

namespace {

template <typename Scalar>
using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
void require_rank4(const Tensor<Scalar>& t, const char* what) {
  if (t.rank() != 4) {
    throw ShapeError(std::string(what) + ": expected a 4-D tensor, got " +
                     to_string(t.shape()));
  }
}

struct ConvGeometry {
  Index batch, channels, height, width;
  Index out_channels, kernel_h, kernel_w;
  Index out_h, out_w;
  Conv2dOptions opt;

  Index patch() const { return channels * kernel_h * kernel_w; }
  Index pixels() const { return out_h * out_w; }
};

template <typename Scalar>
void im2col(const Scalar* image, const ConvGeometry& g, RowMat<Scalar>& cols) {
  cols.resize(g.patch(), g.pixels());
  for (Index c = 0; c < g.channels; ++c) {
    const Scalar* plane = image + c * g.height * g.width;
    for (Index i = 0; i < g.kernel_h; ++i) {
      for (Index j = 0; j < g.kernel_w; ++j) {
        Scalar* row = cols.data() + ((c * g.kernel_h + i) * g.kernel_w + j) * g.pixels();
        for (Index oy = 0; oy < g.out_h; ++oy) {
          const Index iy = oy * g.opt.stride - g.opt.padding + i * g.opt.dilation;
          Scalar* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= g.height) {
            std::fill(dst, dst + g.out_w, Scalar(0));
            continue;
          }
          const Scalar* src = plane + iy * g.width;
          for (Index ox = 0; ox < g.out_w; ++ox) {
            const Index ix = ox * g.opt.stride - g.opt.padding + j * g.opt.dilation;
            dst[ox] = (ix >= 0 && ix < g.width) ? src[ix] : Scalar(0);
          }
        }
      }
    }
  }
}

template <typename Scalar>
void col2im_add(const RowMat<Scalar>& cols, const ConvGeometry& g, Scalar* image) {
  for (Index c = 0; c < g.channels; ++c) {
    Scalar* plane = image + c * g.height * g.width;
    for (Index i = 0; i < g.kernel_h; ++i) {
      for (Index j = 0; j < g.kernel_w; ++j) {
        const Scalar* row =
            cols.data() + ((c * g.kernel_h + i) * g.kernel_w + j) * g.pixels();
        for (Index oy = 0; oy < g.out_h; ++oy) {
          const Index iy = oy * g.opt.stride - g.opt.padding + i * g.opt.dilation;
          if (iy < 0 || iy >= g.height) continue;
          const Scalar* src = row + oy * g.out_w;
          Scalar* dst = plane + iy * g.width;
          for (Index ox = 0; ox < g.out_w; ++ox) {
            const Index ix = ox * g.opt.stride - g.opt.padding + j * g.opt.dilation;
            if (ix >= 0 && ix < g.width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

struct AxisSample {
  Index lo, hi;
  double frac;
};

std::vector<AxisSample> align_corners_axis(Index in, Index out) {
  std::vector<AxisSample> samples(static_cast<std::size_t>(out));
  for (Index o = 0; o < out; ++o) {
    double src = 0.0;
    if (out > 1) src = static_cast<double>(o * (in - 1)) / static_cast<double>(out - 1);
    Index lo = static_cast<Index>(std::floor(src));
    lo = std::clamp<Index>(lo, 0, in - 1);
    const Index hi = std::min<Index>(lo + 1, in - 1);
    samples[static_cast<std::size_t>(o)] = {lo, hi, src - static_cast<double>(lo)};
  }
  return samples;
}

}  // namespace

template <typename Scalar>
Var<Scalar> conv2d(Var<Scalar> input, Var<Scalar> weight, Var<Scalar> bias,
                   const Conv2dOptions& options) {
  const Tensor<Scalar>& x = input.value();
  const Tensor<Scalar>& w = weight.value();
  const Tensor<Scalar>& b = bias.value();
  require_rank4(x, "conv2d input");
  require_rank4(w, "conv2d weight");
  if (w.dim(1) != x.dim(1)) {
    throw ShapeError("conv2d: input has " + std::to_string(x.dim(1)) +
                     " channels but weight expects " + std::to_string(w.dim(1)));
  }
  if (b.size() != w.dim(0)) throw ShapeError("conv2d: bias length != out channels");
  if (options.stride < 1 || options.dilation < 1 || options.padding < 0) {
    throw std::invalid_argument("conv2d: invalid stride/dilation/padding");
  }

  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(2), w.dim(3),
                 0, 0, options};
  g.out_h = (g.height + 2 * options.padding - options.dilation * (g.kernel_h - 1) - 1) /
                options.stride + 1;
  g.out_w = (g.width + 2 * options.padding - options.dilation * (g.kernel_w - 1) - 1) /
                options.stride + 1;
  if (g.out_h < 1 || g.out_w < 1) throw ShapeError("conv2d: output would be empty");

  Tensor<Scalar> out({g.batch, g.out_channels, g.out_h, g.out_w});
  auto cols = std::make_shared<std::vector<RowMat<Scalar>>>(static_cast<std::size_t>(g.batch));
  Eigen::Map<const RowMat<Scalar>> wm(w.data().data(), g.out_channels, g.patch());
  const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> bv(b.data().data(),
                                                                       g.out_channels);
  for (Index n = 0; n < g.batch; ++n) {
    RowMat<Scalar>& col = (*cols)[static_cast<std::size_t>(n)];
    im2col(x.data().data() + n * g.channels * g.height * g.width, g, col);
    Eigen::Map<RowMat<Scalar>> on(out.data().data() + n * g.out_channels * g.pixels(),
                                  g.out_channels, g.pixels());
    on.noalias() = wm * col;
    on.colwise() += bv;
  }

  const std::size_t xi = input.id, wi = weight.id, bi = bias.id;
  Tape<Scalar>& tape = *input.tape;
  return tape.emit(
      OpKind::kConv2d, {xi, wi, bi}, std::move(out),
      [g, cols, xi, wi, bi, oid = tape.node_count()](Tape<Scalar>& t) {
        const auto& gout = t.grad(oid);
        auto* gx = t.grad_sink(xi);
        auto* gw = t.grad_sink(wi);
        auto* gb = t.grad_sink(bi);
        Eigen::Map<const RowMat<Scalar>> wm(t.value(Var<Scalar>{&t, wi}).data().data(),
                                            g.out_channels, g.patch());
        RowMat<Scalar> dcol;
        for (Index n = 0; n < g.batch; ++n) {
          Eigen::Map<const RowMat<Scalar>> dn(gout.data() + n * g.out_channels * g.pixels(),
                                              g.out_channels, g.pixels());
          const RowMat<Scalar>& col = (*cols)[static_cast<std::size_t>(n)];
          if (gw) {
            Eigen::Map<RowMat<Scalar>> gwm(gw->data(), g.out_channels, g.patch());
            gwm.noalias() += dn * col.transpose();
          }
          if (gb) gb->matrix() += dn.rowwise().sum();
          if (gx) {
            dcol.noalias() = wm.transpose() * dn;
            col2im_add(dcol, g, gx->data() + n * g.channels * g.height * g.width);
          }
        }
      });
}

template <typename Scalar>
Var<Scalar> max_pool_2x2(Var<Scalar> input) {
  const Tensor<Scalar>& x = input.value();
  require_rank4(x, "max_pool_2x2");
  const Index n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h < 2 || w < 2) throw ShapeError("max_pool_2x2: H and W must be >= 2");
  const Index oh = (h + 1) / 2, ow = (w + 1) / 2;
  Tensor<Scalar> out({n, c, oh, ow});
  auto argmax = std::make_shared<std::vector<Index>>(static_cast<std::size_t>(out.size()));
  Index k = 0;
  for (Index p = 0; p < n * c; ++p) {
    const Index base = p * h * w;
    for (Index oy = 0; oy < oh; ++oy) {
      for (Index ox = 0; ox < ow; ++ox, ++k) {
        Index best = base + 2 * oy * w + 2 * ox;
        for (Index y = 2 * oy; y < std::min(2 * oy + 2, h); ++y) {
          for (Index xx = 2 * ox; xx < std::min(2 * ox + 2, w); ++xx) {
            const Index idx = base + y * w + xx;
            if (x.data()[idx] > x.data()[best]) best = idx;
          }
        }
        (*argmax)[static_cast<std::size_t>(k)] = best;
        out.data()[k] = x.data()[best];
      }
    }
  }
  Tape<Scalar>& tape = *input.tape;
  const std::size_t xi = input.id;
  return tape.emit(OpKind::kMaxPool2x2, {xi}, std::move(out),
                   [argmax, xi, oid = tape.node_count()](Tape<Scalar>& t) {
                     auto* gx = t.grad_sink(xi);
                     if (!gx) return;
                     const auto& gout = t.grad(oid);
                     for (std::size_t k = 0; k < argmax->size(); ++k) {
                       (*gx)[(*argmax)[k]] += gout[static_cast<Index>(k)];
                     }
                   });
}

template <typename Scalar>
Tensor<Scalar> resize_bilinear_values(const Tensor<Scalar>& x, Index out_height,
                                      Index out_width) {
  require_rank4(x, "resize_bilinear");
  if (out_height < 1 || out_width < 1) {
    throw std::invalid_argument("resize_bilinear: output size must be >= 1");
  }
  const Index planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  const auto ys = align_corners_axis(h, out_height);
  const auto xs = align_corners_axis(w, out_width);
  Tensor<Scalar> out({x.dim(0), x.dim(1), out_height, out_width});
  for (Index p = 0; p < planes; ++p) {
    const Scalar* src = x.data().data() + p * h * w;
    Scalar* dst = out.data().data() + p * out_height * out_width;
    for (Index oy = 0; oy < out_height; ++oy) {
      const AxisSample& sy = ys[static_cast<std::size_t>(oy)];
      const Scalar fy = static_cast<Scalar>(sy.frac);
      for (Index ox = 0; ox < out_width; ++ox) {
        const AxisSample& sx = xs[static_cast<std::size_t>(ox)];
        const Scalar fx = static_cast<Scalar>(sx.frac);
        dst[oy * out_width + ox] =
            (Scalar(1) - fy) * ((Scalar(1) - fx) * src[sy.lo * w + sx.lo] + fx * src[sy.lo * w + sx.hi]) +
            fy * ((Scalar(1) - fx) * src[sy.hi * w + sx.lo] + fx * src[sy.hi * w + sx.hi]);
      }
    }
  }
  return out;
}

template <typename Scalar>
Var<Scalar> resize_bilinear(Var<Scalar> input, Index out_height, Index out_width) {
  const Tensor<Scalar>& x = input.value();
  Tensor<Scalar> out = resize_bilinear_values(x, out_height, out_width);
  const Index planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  Tape<Scalar>& tape = *input.tape;
  const std::size_t xi = input.id;
  return tape.emit(
      OpKind::kResizeBilinear, {xi}, std::move(out),
      [=, oid = tape.node_count()](Tape<Scalar>& t) {
        auto* gx = t.grad_sink(xi);
        if (!gx) return;
        const auto& gout = t.grad(oid);
        const auto ys = align_corners_axis(h, out_height);
        const auto xs = align_corners_axis(w, out_width);
        for (Index p = 0; p < planes; ++p) {
          Scalar* dst = gx->data() + p * h * w;
          const Scalar* g = gout.data() + p * out_height * out_width;
          for (Index oy = 0; oy < out_height; ++oy) {
            const AxisSample& sy = ys[static_cast<std::size_t>(oy)];
            const Scalar fy = static_cast<Scalar>(sy.frac);
            for (Index ox = 0; ox < out_width; ++ox) {
              const AxisSample& sx = xs[static_cast<std::size_t>(ox)];
              const Scalar fx = static_cast<Scalar>(sx.frac);
              const Scalar v = g[oy * out_width + ox];
              dst[sy.lo * w + sx.lo] += (Scalar(1) - fy) * (Scalar(1) - fx) * v;
              dst[sy.lo * w + sx.hi] += (Scalar(1) - fy) * fx * v;
              dst[sy.hi * w + sx.lo] += fy * (Scalar(1) - fx) * v;
              dst[sy.hi * w + sx.hi] += fy * fx * v;
            }
          }
        }
      });
}

template <typename Scalar>
Var<Scalar> sigmoid(Var<Scalar> input) {
  Tensor<Scalar> out(input.shape(), input.value().data().unaryExpr(
                                        [](Scalar v) { return stable_sigmoid(v); }));
  Tape<Scalar>& tape = *input.tape;
  const std::size_t xi = input.id;
  return tape.emit(OpKind::kSigmoid, {xi}, std::move(out),
                   [xi, oid = tape.node_count()](Tape<Scalar>& t) {
                     auto* gx = t.grad_sink(xi);
                     if (!gx) return;
                     const auto& y = t.value(Var<Scalar>{&t, oid}).data();
                     *gx += t.grad(oid) * y * (Scalar(1) - y);
                   });
}

template <typename Scalar>
Var<Scalar> relu(Var<Scalar> input) {
  Tensor<Scalar> out(input.shape(), input.value().data().max(Scalar(0)));
  Tape<Scalar>& tape = *input.tape;
  const std::size_t xi = input.id;
  return tape.emit(OpKind::kRelu, {xi}, std::move(out),
                   [xi, oid = tape.node_count()](Tape<Scalar>& t) {
                     auto* gx = t.grad_sink(xi);
                     if (!gx) return;
                     const auto& x = t.value(Var<Scalar>{&t, xi}).data();
                     *gx += (x > Scalar(0)).select(t.grad(oid), Scalar(0));
                   });
}

template <typename Scalar>
Var<Scalar> add(Var<Scalar> a, Var<Scalar> b) {
  if (a.tape != b.tape) throw std::invalid_argument("add: operands on different tapes");
  if (a.shape() != b.shape()) {
    throw ShapeError("add: shape mismatch " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
  Tensor<Scalar> out(a.shape(), a.value().data() + b.value().data());
  Tape<Scalar>& tape = *a.tape;
  const std::size_t ai = a.id, bi = b.id;
  return tape.emit(OpKind::kAdd, {ai, bi}, std::move(out),
                   [ai, bi, oid = tape.node_count()](Tape<Scalar>& t) {
                     const auto& g = t.grad(oid);
                     if (auto* ga = t.grad_sink(ai)) *ga += g;
                     if (auto* gb = t.grad_sink(bi)) *gb += g;
                   });
}

template <typename Scalar>
Var<Scalar> concat_channels(std::span<const Var<Scalar>> inputs) {
  if (inputs.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const Shape& first = inputs.front().shape();
  if (first.size() != 4) throw ShapeError("concat_channels: expected 4-D tensors");
  Index channels = 0;
  for (const Var<Scalar>& v : inputs) {
    const Shape& s = v.shape();
    if (s.size() != 4 || s[0] != first[0] || s[2] != first[2] || s[3] != first[3]) {
      throw ShapeError("concat_channels: N/H/W mismatch " + to_string(s) + " vs " +
                       to_string(first));
    }
    channels += s[1];
  }
  const Index n = first[0], plane = first[2] * first[3];
  Tensor<Scalar> out({n, channels, first[2], first[3]});
  std::vector<std::size_t> ids;
  std::vector<Index> widths;
  Index offset = 0;
  for (const Var<Scalar>& v : inputs) {
    const Index ci = v.dim(1);
    for (Index b = 0; b < n; ++b) {
      out.data().segment((b * channels + offset) * plane, ci * plane) =
          v.value().data().segment(b * ci * plane, ci * plane);
    }
    offset += ci;
    ids.push_back(v.id);
    widths.push_back(ci);
  }
  Tape<Scalar>& tape = *inputs.front().tape;
  return tape.emit(OpKind::kConcatChannels, ids, std::move(out),
                   [ids, widths, n, channels, plane, oid = tape.node_count()](Tape<Scalar>& t) {
                     const auto& g = t.grad(oid);
                     Index offset = 0;
                     for (std::size_t k = 0; k < ids.size(); ++k) {
                       const Index ci = widths[k];
                       if (auto* gi = t.grad_sink(ids[k])) {
                         for (Index b = 0; b < n; ++b) {
                           gi->segment(b * ci * plane, ci * plane) +=
                               g.segment((b * channels + offset) * plane, ci * plane);
                         }
                       }
                       offset += ci;
                     }
                   });
}

template <typename Scalar>
Var<Scalar> reflect_pad_to_even(Var<Scalar> input) {
  const Tensor<Scalar>& x = input.value();
  require_rank4(x, "reflect_pad_to_even");
  const Index planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  const Index oh = h + h % 2, ow = w + w % 2;
  auto source = [](Index i, Index n) { return i < n ? i : std::max<Index>(n - 2, 0); };
  Tensor<Scalar> out({x.dim(0), x.dim(1), oh, ow});
  for (Index p = 0; p < planes; ++p) {
    for (Index y = 0; y < oh; ++y) {
      for (Index xx = 0; xx < ow; ++xx) {
        out.data()[(p * oh + y) * ow + xx] =
            x.data()[(p * h + source(y, h)) * w + source(xx, w)];
      }
    }
  }
  Tape<Scalar>& tape = *input.tape;
  const std::size_t xi = input.id;
  return tape.emit(OpKind::kReflectPadEven, {xi}, std::move(out),
                   [=, oid = tape.node_count()](Tape<Scalar>& t) {
                     auto* gx = t.grad_sink(xi);
                     if (!gx) return;
                     const auto& g = t.grad(oid);
                     for (Index p = 0; p < planes; ++p) {
                       for (Index y = 0; y < oh; ++y) {
                         for (Index xx = 0; xx < ow; ++xx) {
                           (*gx)[(p * h + source(y, h)) * w + source(xx, w)] +=
                               g[(p * oh + y) * ow + xx];
                         }
                       }
                     }
                   });
}

template <typename Scalar>
Var<Scalar> crop(Var<Scalar> input, Index height, Index width) {
  const Tensor<Scalar>& x = input.value();
  require_rank4(x, "crop");
  const Index planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  if (height < 1 || width < 1 || height > h || width > w) {
    throw ShapeError("crop: window larger than input");
  }
  Tensor<Scalar> out({x.dim(0), x.dim(1), height, width});
  for (Index p = 0; p < planes; ++p) {
    for (Index y = 0; y < height; ++y) {
      out.data().segment((p * height + y) * width, width) =
          x.data().segment((p * h + y) * w, width);
    }
  }
  Tape<Scalar>& tape = *input.tape;
  const std::size_t xi = input.id;
  return tape.emit(OpKind::kCrop, {xi}, std::move(out),
                   [=, oid = tape.node_count()](Tape<Scalar>& t) {
                     auto* gx = t.grad_sink(xi);
                     if (!gx) return;
                     const auto& g = t.grad(oid);
                     for (Index p = 0; p < planes; ++p) {
                       for (Index y = 0; y < height; ++y) {
                         gx->segment((p * h + y) * w, width) +=
                             g.segment((p * height + y) * width, width);
                       }
                     }
                   });
}

template <typename Scalar>
Var<Scalar> sum(Var<Scalar> input) {
  Tensor<Scalar> out(Shape{});
  out.data()[0] = input.value().data().sum();
  Tape<Scalar>& tape = *input.tape;
  const std::size_t xi = input.id;
  return tape.emit(OpKind::kSum, {xi}, std::move(out),
                   [xi, oid = tape.node_count()](Tape<Scalar>& t) {
                     if (auto* gx = t.grad_sink(xi)) *gx += t.grad(oid)[0];
                   });
}

#define TIN_INSTANTIATE_OPS(S)                                                        \
  template class Tape<S>;                                                             \
  template Var<S> conv2d(Var<S>, Var<S>, Var<S>, const Conv2dOptions&);               \
  template Var<S> max_pool_2x2(Var<S>);                                               \
  template Var<S> resize_bilinear(Var<S>, Index, Index);                              \
  template Tensor<S> resize_bilinear_values(const Tensor<S>&, Index, Index);          \
  template Var<S> sigmoid(Var<S>);                                                    \
  template Var<S> relu(Var<S>);                                                       \
  template Var<S> add(Var<S>, Var<S>);                                                \
  template Var<S> concat_channels(std::span<const Var<S>>);                           \
  template Var<S> reflect_pad_to_even(Var<S>);                                        \
  template Var<S> crop(Var<S>, Index, Index);                                         \
  template Var<S> sum(Var<S>);

TIN_INSTANTIATE_OPS(float)
TIN_INSTANTIATE_OPS(double)

#undef TIN_INSTANTIATE_OPS

}  // namespace tin
