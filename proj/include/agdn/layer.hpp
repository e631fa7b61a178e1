#pragma once

#include <optional>
#include <vector>

#include "agdn/ops.hpp"
#include "agdn/transition.hpp"

namespace agdn {

/// Representations [H^0, T H^0, ..., T^K H^0] of one head.
struct HopStack {
  std::vector<Tensor> hops;
  index_t max_hop() const { return static_cast<index_t>(hops.size()) - 1; }
};

/// N x (K+1) per-node weights over hops; each row is a probability vector.
struct HopAttention {
  Tensor weights;
};

struct HeadParams {
  Tensor weight;          // d_in x d_out
  Tensor hop_attention;   // 2 d_out x 1
  Tensor edge_attention;  // 2 d_out x 1, attention transitions only
};

struct LayerParams {
  std::vector<HeadParams> heads;
  Tensor residual;  // d_in x d_out, shared by all heads

  index_t in_dim() const { return residual.rows(); }
  index_t out_dim() const { return residual.cols(); }
};

struct LayerConfig {
  TransitionKind kind = TransitionKind::gcn;
  index_t hops = 3;
  double leaky_slope = kDefaultLeakySlope;
  /// Dropout on edge attention coefficients (attention transitions only).
  double attn_drop = 0.0;
  /// Also apply attn_drop to the hop-attention weights.
  bool hop_attn_drop = false;
  /// Replaces the learned hop attention of every head (N x (K+1)).
  std::optional<Tensor> forced_hop_weights;
};

/// Intermediate values of one layer_forward call, per head.
struct LayerTrace {
  std::vector<TransitionMatrix> transitions;
  std::vector<HopStack> stacks;
  std::vector<HopAttention> attention;
};

Tensor encode(Tape& tape, const Tensor& h_prev, const Tensor& weight);

/// Repeated sparse products; T^k itself is never formed.
HopStack diffuse(Tape& tape, const TransitionMatrix& t, const Tensor& h0, index_t max_hop);

/// theta[i,k] = softmax_k LeakyReLU([H^0_i || H^k_i] . a_hw)
HopAttention hop_attention(Tape& tape, const HopStack& stack, const Tensor& a_hw,
                           double slope = kDefaultLeakySlope);

/// sum_k diag(theta^k) H^k
Tensor combine(Tape& tape, const HopStack& stack, const HopAttention& att);

/// Mean over heads of combine(diffuse(T_i, H W_i), HA_i) plus H W_r.
Tensor layer_forward(Tape& tape, const GraphContext& ctx, const Tensor& h_prev,
                     const LayerParams& params, const LayerConfig& cfg, Mode mode, Rng& rng,
                     LayerTrace* trace = nullptr);

}  // namespace agdn
