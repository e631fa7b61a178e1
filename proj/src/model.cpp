#include "agdn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace agdn {

std::string to_string(Variant v) { return v == Variant::gcn_ha ? "gcn-ha" : "gat-ha"; }

Variant parse_variant(const std::string& name) {
  if (name == "gcn-ha" || name == "gcn_ha") return Variant::gcn_ha;
  if (name == "gat-ha" || name == "gat_ha") return Variant::gat_ha;
  throw std::invalid_argument("unknown variant '" + name + "' (expected gcn-ha or gat-ha)");
}

void ModelConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p < 1.0))
      throw std::invalid_argument(std::string(name) + " must be in [0, 1)");
  };
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  if (hops < 0) throw std::invalid_argument("hops must be >= 0");
  if (heads < 1) throw std::invalid_argument("heads must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (num_classes < 1) throw std::invalid_argument("num_classes must be >= 1");
  prob(dropout, "dropout");
  prob(input_drop, "input_drop");
  prob(attn_drop, "attn_drop");
  if (!std::isfinite(leaky_slope) || leaky_slope < 0.0)
    throw std::invalid_argument("leaky_slope must be a non-negative number");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"variant", to_string(variant)},   {"layers", layers},
          {"hops", hops},                    {"heads", heads},
          {"hidden_dim", hidden_dim},        {"input_dim", input_dim},
          {"num_classes", num_classes},      {"dropout", dropout},
          {"input_drop", input_drop},        {"attn_drop", attn_drop},
          {"use_labels", use_labels},        {"hop_attn_drop", hop_attn_drop},
          {"leaky_slope", leaky_slope}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.layers = j.at("layers").get<index_t>();
  c.hops = j.at("hops").get<index_t>();
  c.heads = j.at("heads").get<index_t>();
  c.hidden_dim = j.at("hidden_dim").get<index_t>();
  c.input_dim = j.at("input_dim").get<index_t>();
  c.num_classes = j.at("num_classes").get<index_t>();
  c.dropout = j.at("dropout").get<double>();
  c.input_drop = j.at("input_drop").get<double>();
  c.attn_drop = j.at("attn_drop").get<double>();
  c.use_labels = j.at("use_labels").get<bool>();
  c.hop_attn_drop = j.value("hop_attn_drop", false);
  c.leaky_slope = j.at("leaky_slope").get<double>();
  c.validate();
  return c;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l);
    for (std::size_t h = 0; h < layers[l].heads.size(); ++h) {
      const auto& head = layers[l].heads[h];
      const std::string hp = prefix + ".head" + std::to_string(h);
      out.emplace_back(hp + ".weight", head.weight);
      out.emplace_back(hp + ".hop_attention", head.hop_attention);
      if (head.edge_attention.defined()) out.emplace_back(hp + ".edge_attention", head.edge_attention);
    }
    out.emplace_back(prefix + ".residual", layers[l].residual);
  }
  for (std::size_t l = 0; l < norms.size(); ++l) {
    const std::string prefix = "norm" + std::to_string(l);
    out.emplace_back(prefix + ".gamma", norms[l].gamma);
    out.emplace_back(prefix + ".beta", norms[l].beta);
  }
  return out;
}

ModelParams ModelParams::clone() const {
  ModelParams copy;
  for (const auto& layer : layers) {
    LayerParams lp;
    for (const auto& head : layer.heads)
      lp.heads.push_back({head.weight.clone(), head.hop_attention.clone(),
                          head.edge_attention.defined() ? head.edge_attention.clone() : Tensor()});
    lp.residual = layer.residual.clone();
    copy.layers.push_back(std::move(lp));
  }
  for (const auto& norm : norms) {
    BatchNormState bn = norm;
    bn.gamma = norm.gamma.clone();
    bn.beta = norm.beta.clone();
    copy.norms.push_back(std::move(bn));
  }
  return copy;
}

namespace {

Tensor glorot(index_t rows, index_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = static_cast<float>(u(rng));
  return Tensor(rows, cols, std::move(v), true);
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ModelParams params;
  index_t in_dim = cfg.model_input_dim();
  for (index_t l = 0; l < cfg.layers; ++l) {
    const bool last = l + 1 == cfg.layers;
    const index_t out_dim = last ? cfg.num_classes : cfg.hidden_dim;
    LayerParams lp;
    for (index_t h = 0; h < cfg.heads; ++h) {
      HeadParams head;
      head.weight = glorot(in_dim, out_dim, rng);
      head.hop_attention = glorot(2 * out_dim, 1, rng);
      if (cfg.variant == Variant::gat_ha) head.edge_attention = glorot(2 * out_dim, 1, rng);
      lp.heads.push_back(std::move(head));
    }
    lp.residual = glorot(in_dim, out_dim, rng);
    params.layers.push_back(std::move(lp));
    if (!last) params.norms.emplace_back(out_dim);
    in_dim = out_dim;
  }
  return params;
}

FeatureMatrix augment_with_labels(const FeatureMatrix& x, std::span<const std::int32_t> labels,
                                  std::int32_t num_classes, const std::vector<bool>& exposed_mask) {
  if (static_cast<index_t>(labels.size()) != x.rows ||
      static_cast<index_t>(exposed_mask.size()) != x.rows)
    throw ShapeError("augment_with_labels: labels/mask length != feature rows");
  FeatureMatrix out;
  out.rows = x.rows;
  out.cols = x.cols + num_classes;
  out.values.assign(out.rows * out.cols, 0.0f);
  for (index_t i = 0; i < x.rows; ++i) {
    for (index_t c = 0; c < x.cols; ++c) out.at(i, c) = x.at(i, c);
    if (!exposed_mask[i]) continue;
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw std::invalid_argument("augment_with_labels: exposed node " + std::to_string(i) +
                                  " has no valid label");
    out.at(i, x.cols + labels[i]) = 1.0f;
  }
  return out;
}

Tensor to_tensor(const FeatureMatrix& x) {
  return Tensor(x.rows, x.cols, std::vector<double>(x.values.begin(), x.values.end()));
}

Tensor forward(Tape& tape, const GraphContext& ctx, const Tensor& input, ModelParams& params,
               const ModelConfig& cfg, Mode mode, Rng& rng, ModelTrace* trace) {
  if (static_cast<index_t>(params.layers.size()) != cfg.layers ||
      static_cast<index_t>(params.norms.size()) != cfg.layers - 1)
    throw ShapeError("forward: parameters do not match the configured layer count");
  if (input.cols() != cfg.model_input_dim())
    throw ShapeError("forward: input has " + std::to_string(input.cols()) + " columns, model expects " +
                     std::to_string(cfg.model_input_dim()));

  LayerConfig lc;
  lc.kind = cfg.transition_kind();
  lc.hops = cfg.hops;
  lc.leaky_slope = cfg.leaky_slope;
  lc.attn_drop = cfg.attn_drop;
  lc.hop_attn_drop = cfg.hop_attn_drop;

  Tensor h = dropout(tape, input, cfg.input_drop, rng, mode);
  for (index_t l = 0; l < cfg.layers; ++l) {
    LayerTrace* lt = nullptr;
    if (trace) lt = &trace->layers.emplace_back();
    h = layer_forward(tape, ctx, h, params.layers[l], lc, mode, rng, lt);
    if (l + 1 < cfg.layers) {
      h = relu(tape, batch_norm(tape, h, params.norms[l], mode));
      h = dropout(tape, h, cfg.dropout, rng, mode);
    }
  }
  return h;
}

Tensor forward(Tape& tape, const Dataset& ds, const GraphContext& ctx, ModelParams& params,
               const ModelConfig& cfg, Mode mode, Rng& rng, const std::vector<bool>& exposed_mask) {
  Tensor input = cfg.use_labels
                     ? to_tensor(augment_with_labels(ds.features, ds.labels, ds.num_classes,
                                                     exposed_mask))
                     : to_tensor(ds.features);
  return forward(tape, ctx, input, params, cfg, mode, rng);
}

}  // namespace agdn
