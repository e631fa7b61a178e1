#include "agdn/transition.hpp"

#include <cmath>
#include <iomanip>

namespace agdn {

std::string_view to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::gcn: return "gcn";
    case TransitionKind::att: return "att";
    case TransitionKind::att_gcn: return "att_gcn";
  }
  return "?";
}

GraphContext GraphContext::build(const Graph& g) {
  const index_t n = g.num_nodes();
  GraphContext ctx;
  ctx.degrees = agdn::degrees(g);
  ctx.self_loop_edge.resize(n);

  std::vector<index_t> offsets(n + 1, 0);
  std::vector<index_t> cols;
  cols.reserve(g.num_edges() + n);
  for (index_t i = 0; i < n; ++i) {
    bool placed = false;
    for (index_t j : g.neighbors(i)) {
      if (!placed && j >= i) {
        ctx.self_loop_edge[i] = static_cast<index_t>(cols.size());
        cols.push_back(i);
        placed = true;
      }
      if (j != i) cols.push_back(j);
    }
    if (!placed) {
      ctx.self_loop_edge[i] = static_cast<index_t>(cols.size());
      cols.push_back(i);
    }
    offsets[i + 1] = static_cast<index_t>(cols.size());
  }
  ctx.pattern = SparsePattern::build(n, std::move(offsets), std::move(cols));
  return ctx;
}

Eigen::MatrixXd TransitionMatrix::to_dense(index_t cap) const {
  const index_t n = num_nodes();
  if (n > cap)
    throw std::length_error("transition to_dense: " + std::to_string(n) +
                            " nodes exceeds oracle cap " + std::to_string(cap));
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  auto w = weights.values();
  for (index_t e = 0; e < num_edges(); ++e)
    dense(pattern->edge_rows[e], pattern->cols[e]) = w[e];
  return dense;
}

void TransitionMatrix::write_coordinates(std::ostream& out) const {
  auto w = weights.values();
  out << std::setprecision(17);
  for (index_t e = 0; e < num_edges(); ++e)
    out << pattern->edge_rows[e] << ' ' << pattern->cols[e] << ' ' << w[e] << '\n';
}

TransitionMatrix build_gcn_transition(const GraphContext& ctx) {
  const auto& p = *ctx.pattern;
  std::vector<double> w(p.num_edges());
  for (index_t e = 0; e < p.num_edges(); ++e) {
    // Integer product first so (i,j) and (j,i) round identically.
    const auto prod = (ctx.degrees[p.edge_rows[e]] + 1) * (ctx.degrees[p.cols[e]] + 1);
    w[e] = 1.0 / std::sqrt(static_cast<double>(prod));
  }
  return {TransitionKind::gcn, ctx.pattern, Tensor(p.num_edges(), 1, std::move(w)), 0};
}

Tensor edge_attention_scores(Tape& tape, const GraphContext& ctx, const Tensor& h,
                             const Tensor& a) {
  const index_t d = h.cols();
  if (a.rows() != 2 * d || a.cols() != 1)
    throw ShapeError("attention vector must be " + std::to_string(2 * d) + " x 1, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  const auto& p = *ctx.pattern;
  Tensor dst_score = matmul(tape, h, slice_rows(tape, a, 0, d));
  Tensor src_score = matmul(tape, h, slice_rows(tape, a, d, d));
  return add(tape, gather_rows(tape, dst_score, p.edge_rows), gather_rows(tape, src_score, p.cols));
}

TransitionMatrix build_att_transition(Tape& tape, const GraphContext& ctx, const Tensor& h,
                                      const Tensor& a, double slope) {
  if (h.rows() != ctx.num_nodes())
    throw ShapeError("attention transition: h has " + std::to_string(h.rows()) + " rows for " +
                     std::to_string(ctx.num_nodes()) + " nodes");
  Tensor logits = leaky_relu(tape, edge_attention_scores(tape, ctx, h, a), slope);
  Tensor w = segment_softmax(tape, logits, ctx.pattern->offsets);
  return {TransitionKind::att, ctx.pattern, w, 0};
}

TransitionMatrix build_att_gcn_transition(Tape& tape, const GraphContext& ctx, const Tensor& h,
                                          const Tensor& a, double slope) {
  TransitionMatrix att = build_att_transition(tape, ctx, h, a, slope);
  const auto& p = *ctx.pattern;
  std::vector<double> factors(p.num_edges());
  for (index_t e = 0; e < p.num_edges(); ++e)
    factors[e] = std::sqrt(static_cast<double>(ctx.degrees[p.edge_rows[e]] + 1)) /
                 std::sqrt(static_cast<double>(ctx.degrees[p.cols[e]] + 1));
  return {TransitionKind::att_gcn, ctx.pattern, mul_const(tape, att.weights, factors), 0};
}

bool check_symmetry_condition(const Tensor& h, const Tensor& a, const Graph& g, double tol) {
  const index_t d = h.cols();
  if (a.rows() != 2 * d || a.cols() != 1) throw ShapeError("symmetry check: a must be 2d x 1");
  auto score = [&](index_t i, index_t j) {
    double s = 0.0;
    for (index_t c = 0; c < d; ++c) s += h.at(i, c) * a.at(c, 0) + h.at(j, c) * a.at(d + c, 0);
    return s;
  };
  for (index_t i = 0; i < g.num_nodes(); ++i)
    for (index_t j : g.neighbors(i))
      if (std::abs(score(i, j) - score(j, i)) > tol) return false;
  return true;
}

Tensor spmm(Tape& tape, const TransitionMatrix& t, const Tensor& h) {
  return spmm(tape, t.pattern, t.weights, h);
}

}  // namespace agdn
