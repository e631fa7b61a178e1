#include "agdn/layer.hpp"

#include <stdexcept>

namespace agdn {

Tensor encode(Tape& tape, const Tensor& h_prev, const Tensor& weight) {
  return matmul(tape, h_prev, weight);
}

HopStack diffuse(Tape& tape, const TransitionMatrix& t, const Tensor& h0, index_t max_hop) {
  if (max_hop < 0) throw std::invalid_argument("diffuse: negative hop count");
  HopStack stack;
  stack.hops.reserve(max_hop + 1);
  stack.hops.push_back(h0);
  for (index_t k = 1; k <= max_hop; ++k) stack.hops.push_back(spmm(tape, t, stack.hops.back()));
  return stack;
}

HopAttention hop_attention(Tape& tape, const HopStack& stack, const Tensor& a_hw, double slope) {
  if (stack.hops.empty()) throw std::invalid_argument("hop_attention: empty stack");
  const index_t d = stack.hops[0].cols();
  if (a_hw.rows() != 2 * d || a_hw.cols() != 1)
    throw ShapeError("hop_attention: a_hw must be " + std::to_string(2 * d) + " x 1");
  Tensor query = matmul(tape, stack.hops[0], slice_rows(tape, a_hw, 0, d));
  Tensor key_vec = slice_rows(tape, a_hw, d, d);
  std::vector<Tensor> logits;
  logits.reserve(stack.hops.size());
  for (const auto& h : stack.hops) logits.push_back(add(tape, query, matmul(tape, h, key_vec)));
  Tensor scores = leaky_relu(tape, concat_cols(tape, logits), slope);
  return {row_softmax(tape, scores)};
}

Tensor combine(Tape& tape, const HopStack& stack, const HopAttention& att) {
  return weighted_hop_sum(tape, stack.hops, att.weights);
}

Tensor layer_forward(Tape& tape, const GraphContext& ctx, const Tensor& h_prev,
                     const LayerParams& params, const LayerConfig& cfg, Mode mode, Rng& rng,
                     LayerTrace* trace) {
  const auto num_heads = static_cast<index_t>(params.heads.size());
  if (num_heads < 1) throw std::invalid_argument("layer_forward: need at least one head");
  if (cfg.hops < 0) throw std::invalid_argument("layer_forward: negative hop count");
  if (h_prev.rows() != ctx.num_nodes() || h_prev.cols() != params.in_dim())
    throw ShapeError("layer_forward: input is " + std::to_string(h_prev.rows()) + "x" +
                     std::to_string(h_prev.cols()) + ", layer expects " +
                     std::to_string(ctx.num_nodes()) + "x" + std::to_string(params.in_dim()));
  if (cfg.forced_hop_weights &&
      (cfg.forced_hop_weights->rows() != ctx.num_nodes() ||
       cfg.forced_hop_weights->cols() != cfg.hops + 1))
    throw ShapeError("layer_forward: forced hop weights must be N x (K+1)");

  std::optional<TransitionMatrix> shared_gcn;
  if (cfg.kind == TransitionKind::gcn) shared_gcn = build_gcn_transition(ctx);

  Tensor total;
  for (index_t head = 0; head < num_heads; ++head) {
    const HeadParams& hp = params.heads[head];
    Tensor h0 = encode(tape, h_prev, hp.weight);

    TransitionMatrix t;
    if (shared_gcn) {
      t = *shared_gcn;
    } else {
      t = cfg.kind == TransitionKind::att
              ? build_att_transition(tape, ctx, h0, hp.edge_attention, cfg.leaky_slope)
              : build_att_gcn_transition(tape, ctx, h0, hp.edge_attention, cfg.leaky_slope);
      t.weights = dropout(tape, t.weights, cfg.attn_drop, rng, mode);
    }
    t.head_index = head;

    HopStack stack = diffuse(tape, t, h0, cfg.hops);
    HopAttention att = cfg.forced_hop_weights
                           ? HopAttention{*cfg.forced_hop_weights}
                           : hop_attention(tape, stack, hp.hop_attention, cfg.leaky_slope);
    if (cfg.hop_attn_drop && !cfg.forced_hop_weights)
      att.weights = dropout(tape, att.weights, cfg.attn_drop, rng, mode);

    Tensor head_out = combine(tape, stack, att);
    total = head == 0 ? head_out : add(tape, total, head_out);

    if (trace) {
      trace->transitions.push_back(t);
      trace->stacks.push_back(stack);
      trace->attention.push_back(att);
    }
  }
  if (num_heads > 1) total = scale(tape, total, 1.0 / static_cast<double>(num_heads));
  return add(tape, total, matmul(tape, h_prev, params.residual));
}

}  // namespace agdn
