#pragma once

#include <memory>
#include <ostream>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "agdn/graph.hpp"
#include "agdn/ops.hpp"

namespace agdn {

enum class TransitionKind { gcn, att, att_gcn };

std::string_view to_string(TransitionKind kind);

/// Per-graph data shared by every transition matrix: the self-loop-augmented
/// pattern and the (self-loop-free) degrees.
struct GraphContext {
  std::shared_ptr<const SparsePattern> pattern;
  std::vector<index_t> degrees;
  std::vector<index_t> self_loop_edge;

  index_t num_nodes() const { return pattern->num_nodes; }

  static GraphContext build(const Graph& g);
};

/// Sparse N x N matrix over the self-loop-augmented edge set. Weights are an
/// E x 1 tensor; for the attention kinds they stay connected to the tape that
/// built them.
struct TransitionMatrix {
  TransitionKind kind = TransitionKind::gcn;
  std::shared_ptr<const SparsePattern> pattern;
  Tensor weights;
  index_t head_index = 0;

  index_t num_nodes() const { return pattern->num_nodes; }
  index_t num_edges() const { return pattern->num_edges(); }

  Eigen::MatrixXd to_dense(index_t cap = kDenseOracleCap) const;

  /// One `i j w` line per stored entry.
  void write_coordinates(std::ostream& out) const;
};

/// (I+D)^-1/2 (I+A) (I+D)^-1/2. The weights are constants.
TransitionMatrix build_gcn_transition(const GraphContext& ctx);

/// Row-softmax of LeakyReLU([h_i || h_j] . a) over j in N(i) u {i}, where the
/// softmax shift is the row maximum. `a` is 2d x 1.
TransitionMatrix build_att_transition(Tape& tape, const GraphContext& ctx, const Tensor& h,
                                      const Tensor& a, double slope = kDefaultLeakySlope);

/// (I+D)^1/2 T_att (I+D)^-1/2.
TransitionMatrix build_att_gcn_transition(Tape& tape, const GraphContext& ctx, const Tensor& h,
                                          const Tensor& a, double slope = kDefaultLeakySlope);

/// Raw attention scores [h_i || h_j] . a for every stored edge (before the
/// LeakyReLU), as an E x 1 tensor.
Tensor edge_attention_scores(Tape& tape, const GraphContext& ctx, const Tensor& h,
                             const Tensor& a);

/// True iff [h_i || h_j] . a == [h_j || h_i] . a (within tol) for every edge
/// of g, i.e. the attention adjacency is symmetric.
bool check_symmetry_condition(const Tensor& h, const Tensor& a, const Graph& g,
                              double tol = 1e-6);

Tensor spmm(Tape& tape, const TransitionMatrix& t, const Tensor& h);

}  // namespace agdn
