#include "tin/model.hpp"

#include <array>
#include <optional>
#include <random>
#include <stdexcept>

#include "tin/kernels.hpp"

namespace tin {

std::string_view variant_name(Variant v) { return v == Variant::kTin1 ? "tin1" : "tin2"; }

Variant parse_variant(std::string_view name) {
  if (name == "tin1" || name == "TIN1") return Variant::kTin1;
  if (name == "tin2" || name == "TIN2") return Variant::kTin2;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

void EnrichmentSpec::validate() const {
  if (in_channels < 1 || out_channels < 1) {
    throw std::invalid_argument("enrichment channels must be positive");
  }
  if (dilation_rates.empty()) throw std::invalid_argument("enrichment needs at least one branch");
  for (Index r : dilation_rates) {
    if (r < 1) throw std::invalid_argument("dilation rates must be positive");
  }
}

template <typename Scalar>
Tensor<Scalar>& NetworkGraph<Scalar>::param(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p.tensor;
  }
  throw std::out_of_range("no parameter named '" + std::string(name) + "'");
}

template <typename Scalar>
const Tensor<Scalar>& NetworkGraph<Scalar>::param(std::string_view name) const {
  return const_cast<NetworkGraph*>(this)->param(name);
}

template <typename Scalar>
bool NetworkGraph<Scalar>::has_param(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return true;
  }
  return false;
}

template <typename Scalar>
void NetworkGraph<Scalar>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

namespace {

constexpr Index kSummaryChannels = 8;

std::string branch_name(int stage, std::size_t branch, Index rate) {
  return "enrich" + std::to_string(stage) + ".b" + std::to_string(branch) + "_d" +
         std::to_string(rate);
}

}  // namespace

template <typename Scalar>
struct GraphBuilder {
  NetworkGraph<Scalar>& graph;

  void begin(Variant variant, std::vector<EnrichmentSpec> specs) {
    graph.variant_ = variant;
    graph.enrichments_ = std::move(specs);
  }

  void conv(const std::string& name, const std::string& input, Index in, Index out,
            Index kernel, Index dilation = 1) {
    Tensor<Scalar> w({out, in, kernel, kernel});
    Tensor<Scalar> b({out});
    w.set_requires_grad(true);
    b.set_requires_grad(true);
    const Index n = w.size() + b.size();
    graph.params_.push_back({name + ".weight", std::move(w)});
    graph.params_.push_back({name + ".bias", std::move(b)});
    graph.layers_.push_back({name, kernel == 1 ? "conv1x1" : "conv3x3", input, in, out,
                             kernel, dilation, n});
  }

  void op(const std::string& name, const std::string& kind, const std::string& input,
          Index in, Index out) {
    graph.layers_.push_back({name, kind, input, in, out, 0, 0, 0});
  }

  // Enrichment -> Summarizer -> side head for one feature extractor.
  void stage(int k, const std::string& input, const EnrichmentSpec& spec) {
    const std::string tag = std::to_string(k);
    for (std::size_t b = 0; b < spec.dilation_rates.size(); ++b) {
      const Index rate = spec.dilation_rates[b];
      conv(branch_name(k, b, rate), input, spec.in_channels, spec.out_channels, 3, rate);
    }
    op("enrich" + tag, "sum+relu", "enrich" + tag + ".b*", spec.out_channels,
       spec.out_channels);
    conv("summ" + tag, "enrich" + tag, spec.out_channels, kSummaryChannels, 1);
    conv("side" + tag, "summ" + tag, kSummaryChannels, 1, 1);
  }
};

template <typename Scalar>
NetworkGraph<Scalar> build_tin1(const EnrichmentSpec& enrichment) {
  enrichment.validate();
  if (enrichment.in_channels != 16) {
    throw std::invalid_argument("TIN1 enrichment must take 16 input channels");
  }
  NetworkGraph<Scalar> g;
  GraphBuilder<Scalar> b{g};
  b.begin(Variant::kTin1, {enrichment, enrichment});
  b.conv("fe1", "image", 3, 16, 3);
  b.conv("fe2", "fe1", 16, 16, 3);
  b.stage(1, "fe1", enrichment);
  b.stage(2, "fe2", enrichment);
  b.op("summ_sum", "add", "summ1+summ2", kSummaryChannels, kSummaryChannels);
  b.conv("fuse", "summ_sum", kSummaryChannels, 1, 1);
  return g;
}

template <typename Scalar>
NetworkGraph<Scalar> build_tin2(const EnrichmentSpec& enrichment1,
                                const EnrichmentSpec& enrichment2) {
  enrichment1.validate();
  enrichment2.validate();
  if (enrichment1.in_channels != 16 || enrichment2.in_channels != 64) {
    throw std::invalid_argument("TIN2 enrichments must take 16 and 64 input channels");
  }
  NetworkGraph<Scalar> g;
  GraphBuilder<Scalar> b{g};
  b.begin(Variant::kTin2, {enrichment1, enrichment1, enrichment2, enrichment2});
  b.conv("fe1", "image", 3, 16, 3);
  b.conv("fe2", "fe1", 16, 16, 3);
  b.stage(1, "fe1", enrichment1);
  b.stage(2, "fe2", enrichment1);
  b.op("pool", "max_pool_2x2", "fe2", 16, 16);
  b.conv("fe3", "pool", 16, 64, 3);
  b.conv("fe4", "fe3", 64, 64, 3);
  b.stage(3, "fe3", enrichment2);
  b.stage(4, "fe4", enrichment2);
  b.op("upsample", "resize_bilinear", "summ3+summ4", kSummaryChannels, kSummaryChannels);
  b.op("concat", "concat", "summ1+summ2, upsample", 2 * kSummaryChannels,
       2 * kSummaryChannels);
  b.conv("fuse", "concat", 2 * kSummaryChannels, 1, 1);
  return g;
}

template <typename Scalar>
NetworkGraph<Scalar> build_graph(Variant variant, const std::vector<EnrichmentSpec>& specs) {
  if (variant == Variant::kTin1) {
    if (specs.size() != 2 || !(specs[0] == specs[1])) {
      throw std::invalid_argument("TIN1 needs two identical enrichment specs");
    }
    return build_tin1<Scalar>(specs[0]);
  }
  if (specs.size() != 4 || !(specs[0] == specs[1]) || !(specs[2] == specs[3])) {
    throw std::invalid_argument("TIN2 needs four enrichment specs in stage pairs");
  }
  return build_tin2<Scalar>(specs[0], specs[2]);
}

template <typename Scalar>
void init_params(NetworkGraph<Scalar>& graph, std::uint64_t seed, double weight_std) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gaussian(0.0, weight_std);
  const auto bank = directional_bank(16);
  for (auto& p : graph.params()) {
    auto& data = p.tensor.data();
    if (p.name.ends_with(".bias")) {
      data.setZero();
    } else if (p.name == "fe1.weight") {
      const Index in = p.tensor.dim(1);
      for (Index o = 0; o < p.tensor.dim(0); ++o) {
        const Eigen::Matrix3d& k = bank[static_cast<std::size_t>(o % 16)].weights;
        for (Index c = 0; c < in; ++c) {
          for (Index i = 0; i < 3; ++i) {
            for (Index j = 0; j < 3; ++j) {
              p.tensor(o, c, i, j) = static_cast<Scalar>(k(i, j) / static_cast<double>(in));
            }
          }
        }
      }
    } else {
      for (Index i = 0; i < data.size(); ++i) data[i] = static_cast<Scalar>(gaussian(rng));
    }
  }
}

template <typename Scalar>
Index param_count(const NetworkGraph<Scalar>& graph) {
  Index total = 0;
  for (const auto& p : graph.params()) total += p.tensor.size();
  return total;
}

namespace {

template <typename Scalar, typename Bind>
struct Runner {
  Bind bind;

  Var<Scalar> conv(const std::string& name, Var<Scalar> x, Index kernel, Index dilation = 1) {
    return conv2d(x, bind(name + ".weight"), bind(name + ".bias"),
                  Conv2dOptions::same(kernel, dilation));
  }

  struct StageOut {
    Var<Scalar> summary;
    Var<Scalar> side;
  };

  StageOut stage(int k, Var<Scalar> features, const EnrichmentSpec& spec) {
    std::optional<Var<Scalar>> acc;
    for (std::size_t b = 0; b < spec.dilation_rates.size(); ++b) {
      const Index rate = spec.dilation_rates[b];
      Var<Scalar> branch = conv(branch_name(k, b, rate), features, 3, rate);
      acc = acc ? add(*acc, branch) : branch;
    }
    Var<Scalar> enriched = relu(*acc);
    Var<Scalar> summary = conv("summ" + std::to_string(k), enriched, 1);
    Var<Scalar> side = conv("side" + std::to_string(k), summary, 1);
    return {summary, side};
  }
};

template <typename Scalar, typename Graph, typename Bind>
ForwardPass<Scalar> run(Graph& graph, Var<Scalar> image, Bind bind) {
  const Tensor<Scalar>& x = image.value();
  if (x.rank() != 4 || x.dim(0) != 1 || x.dim(1) != 3) {
    throw ShapeError("forward expects a [1,3,H,W] image, got " + to_string(x.shape()));
  }
  if (!x.all_finite()) throw NumericError("forward: image contains non-finite values");
  const Index h = x.dim(2), w = x.dim(3);
  const auto& specs = graph.enrichments();
  Runner<Scalar, Bind> r{bind};
  ForwardPass<Scalar> out;

  if (graph.variant() == Variant::kTin1) {
    Var<Scalar> f1 = relu(r.conv("fe1", image, 3));
    Var<Scalar> f2 = relu(r.conv("fe2", f1, 3));
    auto s1 = r.stage(1, f1, specs[0]);
    auto s2 = r.stage(2, f2, specs[1]);
    out.side_logits = {s1.side, s2.side};
    out.fused_logits = r.conv("fuse", add(s1.summary, s2.summary), 1);
    return out;
  }

  if (h < 2 || w < 2) throw ShapeError("TIN2 needs H, W >= 2");
  const bool padded = (h % 2) || (w % 2);
  Var<Scalar> input = padded ? reflect_pad_to_even(image) : image;
  const Index ph = input.dim(2), pw = input.dim(3);
  Var<Scalar> f1 = relu(r.conv("fe1", input, 3));
  Var<Scalar> f2 = relu(r.conv("fe2", f1, 3));
  auto s1 = r.stage(1, f1, specs[0]);
  auto s2 = r.stage(2, f2, specs[1]);
  Var<Scalar> pooled = max_pool_2x2(f2);
  Var<Scalar> f3 = relu(r.conv("fe3", pooled, 3));
  Var<Scalar> f4 = relu(r.conv("fe4", f3, 3));
  auto s3 = r.stage(3, f3, specs[2]);
  auto s4 = r.stage(4, f4, specs[3]);
  const std::array<Var<Scalar>, 2> parts{
      add(s1.summary, s2.summary),
      resize_bilinear(add(s3.summary, s4.summary), ph, pw)};
  Var<Scalar> fused = r.conv("fuse", concat_channels<Scalar>(parts), 1);
  std::vector<Var<Scalar>> sides{s1.side, s2.side, resize_bilinear(s3.side, ph, pw),
                                 resize_bilinear(s4.side, ph, pw)};
  if (padded) {
    for (auto& s : sides) s = crop(s, h, w);
    fused = crop(fused, h, w);
  }
  out.side_logits = std::move(sides);
  out.fused_logits = fused;
  return out;
}

}  // namespace

template <typename Scalar>
ForwardPass<Scalar> forward(Tape<Scalar>& tape, NetworkGraph<Scalar>& graph,
                            Var<Scalar> image) {
  return run<Scalar>(graph, image, [&](const std::string& name) {
    return tape.parameter(graph.param(name));
  });
}

template <typename Scalar>
ForwardPass<Scalar> forward(Tape<Scalar>& tape, const NetworkGraph<Scalar>& graph,
                            Var<Scalar> image) {
  return run<Scalar>(graph, image, [&](const std::string& name) {
    return tape.constant(graph.param(name));
  });
}

template <typename Scalar>
EdgeMaps forward_maps(const NetworkGraph<Scalar>& graph, const Tensor<Scalar>& image) {
  Tape<Scalar> tape;
  ForwardPass<Scalar> pass = forward(tape, graph, tape.constant(image));
  EdgeMaps maps;
  for (const auto& s : pass.side_logits) maps.side.push_back(plane_of(sigmoid(s).value()));
  maps.fused = plane_of(sigmoid(pass.fused_logits).value());
  return maps;
}

#define TIN_INSTANTIATE_MODEL(S)                                                        \
  template class NetworkGraph<S>;                                                       \
  template NetworkGraph<S> build_tin1<S>(const EnrichmentSpec&);                        \
  template NetworkGraph<S> build_tin2<S>(const EnrichmentSpec&, const EnrichmentSpec&); \
  template NetworkGraph<S> build_graph<S>(Variant, const std::vector<EnrichmentSpec>&); \
  template void init_params(NetworkGraph<S>&, std::uint64_t, double);                   \
  template Index param_count(const NetworkGraph<S>&);                                   \
  template ForwardPass<S> forward(Tape<S>&, NetworkGraph<S>&, Var<S>);                  \
  template ForwardPass<S> forward(Tape<S>&, const NetworkGraph<S>&, Var<S>);            \
  template EdgeMaps forward_maps(const NetworkGraph<S>&, const Tensor<S>&);

TIN_INSTANTIATE_MODEL(float)
TIN_INSTANTIATE_MODEL(double)

#undef TIN_INSTANTIATE_MODEL

}  // namespace tin
