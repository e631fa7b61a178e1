#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agdn/dataset.hpp"
#include "agdn/layer.hpp"

namespace agdn {

enum class Variant { gcn_ha, gat_ha };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct ModelConfig {
  Variant variant = Variant::gcn_ha;
  index_t layers = 3;
  index_t hops = 3;
  index_t heads = 1;
  index_t hidden_dim = 256;
  index_t input_dim = 0;    // raw feature width, label columns excluded
  index_t num_classes = 0;
  double dropout = 0.5;
  double input_drop = 0.1;
  double attn_drop = 0.05;
  bool use_labels = false;
  bool hop_attn_drop = false;
  double leaky_slope = kDefaultLeakySlope;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;

  /// Width of the first layer's input.
  index_t model_input_dim() const { return input_dim + (use_labels ? num_classes : 0); }
  TransitionKind transition_kind() const {
    return variant == Variant::gcn_ha ? TransitionKind::gcn : TransitionKind::att_gcn;
  }

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

struct ModelParams {
  std::vector<LayerParams> layers;
  std::vector<BatchNormState> norms;  // one per hidden layer

  /// Trainable tensors under stable names, in a fixed order.
  std::vector<std::pair<std::string, Tensor>> named_parameters() const;

  /// Deep copy (gradients dropped).
  ModelParams clone() const;
};

/// Glorot-uniform weights and attention vectors drawn as f32 values; batch
/// norm starts at gamma=1, beta=0.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

/// Appends num_classes columns: the one-hot label for nodes in exposed_mask,
/// zeros elsewhere.
FeatureMatrix augment_with_labels(const FeatureMatrix& x, std::span<const std::int32_t> labels,
                                  std::int32_t num_classes, const std::vector<bool>& exposed_mask);

Tensor to_tensor(const FeatureMatrix& x);

struct ModelTrace {
  std::vector<LayerTrace> layers;
};

/// Pre-softmax logits (N x C). `input` already carries label columns when
/// cfg.use_labels is set.
Tensor forward(Tape& tape, const GraphContext& ctx, const Tensor& input, ModelParams& params,
               const ModelConfig& cfg, Mode mode, Rng& rng, ModelTrace* trace = nullptr);

/// Builds the input from a dataset (exposing the labels in `exposed_mask`
/// when cfg.use_labels) and runs forward.
Tensor forward(Tape& tape, const Dataset& ds, const GraphContext& ctx, ModelParams& params,
               const ModelConfig& cfg, Mode mode, Rng& rng, const std::vector<bool>& exposed_mask);

}  // namespace agdn
