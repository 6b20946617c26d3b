#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tin/autograd.hpp"
#include "tin/types.hpp"

namespace tin {

enum class Variant : std::uint32_t { kTin1 = 1, kTin2 = 2 };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

/// Parallel dilated 3x3 branches whose outputs are summed.
struct EnrichmentSpec {
  Index in_channels = 16;
  Index out_channels = 32;
  std::vector<Index> dilation_rates{1, 2, 4, 8};

  void validate() const;
  static EnrichmentSpec with_input(Index in_channels) {
    EnrichmentSpec spec;
    spec.in_channels = in_channels;
    return spec;
  }
  bool operator==(const EnrichmentSpec&) const = default;
};

/// One row of the layer table printed by `summary`.
struct LayerInfo {
  std::string name;
  std::string kind;
  std::string input;
  Index in_channels = 0;
  Index out_channels = 0;
  Index kernel = 0;
  Index dilation = 0;
  Index params = 0;
};

template <typename Scalar>
struct Parameter {
  std::string name;
  Tensor<Scalar> tensor;
};

/// TIN1/TIN2 layer description plus the parameter tensors it owns.
template <typename Scalar>
class NetworkGraph {
 public:
  Variant variant() const { return variant_; }
  /// Number of supervised side outputs (K).
  int side_output_count() const { return variant_ == Variant::kTin1 ? 2 : 4; }
  const std::vector<EnrichmentSpec>& enrichments() const { return enrichments_; }
  const std::vector<LayerInfo>& layers() const { return layers_; }

  std::vector<Parameter<Scalar>>& params() { return params_; }
  const std::vector<Parameter<Scalar>>& params() const { return params_; }
  Tensor<Scalar>& param(std::string_view name);
  const Tensor<Scalar>& param(std::string_view name) const;
  bool has_param(std::string_view name) const;

  void zero_grad();

  template <typename Other>
  NetworkGraph<Other> cast() const {
    NetworkGraph<Other> out;
    out.variant_ = variant_;
    out.enrichments_ = enrichments_;
    out.layers_ = layers_;
    for (const auto& p : params_) {
      out.params_.push_back({p.name, p.tensor.template cast<Other>()});
    }
    return out;
  }

 private:
  template <typename>
  friend class NetworkGraph;
  template <typename S>
  friend struct GraphBuilder;

  Variant variant_ = Variant::kTin1;
  std::vector<EnrichmentSpec> enrichments_;
  std::vector<LayerInfo> layers_;
  std::vector<Parameter<Scalar>> params_;
};

template <typename Scalar>
NetworkGraph<Scalar> build_tin1(const EnrichmentSpec& enrichment = EnrichmentSpec{});

template <typename Scalar>
NetworkGraph<Scalar> build_tin2(const EnrichmentSpec& enrichment1 = EnrichmentSpec{},
                                const EnrichmentSpec& enrichment2 =
                                    EnrichmentSpec::with_input(64));

/// Rebuilds a graph from its variant and per-stage enrichment specs
/// (two for TIN1, four for TIN2).
template <typename Scalar>
NetworkGraph<Scalar> build_graph(Variant variant, const std::vector<EnrichmentSpec>& specs);

/// Feature Extractor 1 gets the directional gradient bank (split evenly
/// across the RGB channels); other weights are N(0, weight_std); biases 0.
template <typename Scalar>
void init_params(NetworkGraph<Scalar>& graph, std::uint64_t seed, double weight_std = 0.01);

/// Total number of scalars over all parameter tensors.
template <typename Scalar>
Index param_count(const NetworkGraph<Scalar>& graph);

/// Logit-level outputs of one forward pass, all at input resolution.
template <typename Scalar>
struct ForwardPass {
  std::vector<Var<Scalar>> side_logits;
  Var<Scalar> fused_logits;
};

/// Forward pass that records parameter gradients.
template <typename Scalar>
ForwardPass<Scalar> forward(Tape<Scalar>& tape, NetworkGraph<Scalar>& graph,
                            Var<Scalar> image);

/// Forward pass with parameters treated as constants.
template <typename Scalar>
ForwardPass<Scalar> forward(Tape<Scalar>& tape, const NetworkGraph<Scalar>& graph,
                            Var<Scalar> image);

struct EdgeMaps {
  std::vector<EdgeMap> side;
  EdgeMap fused;
};

/// Side and fused probability maps for an image tensor [1,3,H,W].
template <typename Scalar>
EdgeMaps forward_maps(const NetworkGraph<Scalar>& graph, const Tensor<Scalar>& image);

}  // namespace tin
