#pragma once

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "agdn/kernels.hpp"
#include "agdn/tensor.hpp"

namespace agdn {

using Rng = std::mt19937_64;

inline constexpr double kDefaultLeakySlope = 0.2;

/// Sparsity pattern shared by every transition matrix built on one graph:
/// CSR rows are destinations, plus the transpose index and each edge's row.
struct SparsePattern {
  index_t num_nodes = 0;
  std::vector<index_t> offsets;
  std::vector<index_t> cols;
  std::vector<index_t> edge_rows;
  kernels::TransposeIndex transpose;

  index_t num_edges() const { return static_cast<index_t>(cols.size()); }
  kernels::CsrView view() const { return {num_nodes, offsets, cols}; }

  static std::shared_ptr<const SparsePattern> build(index_t num_nodes,
                                                    std::vector<index_t> offsets,
                                                    std::vector<index_t> cols);
};

// Each op records a backward closure on `tape` when any input requires grad.

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);
/// Elementwise product with a constant array of the same size.
Tensor mul_const(Tape& tape, const Tensor& a, std::span<const double> factors);
Tensor relu(Tape& tape, const Tensor& x);
/// max(x, slope*x); the derivative at 0 is taken as slope.
Tensor leaky_relu(Tape& tape, const Tensor& x, double slope = kDefaultLeakySlope);
/// 1x1 sum of all entries.
Tensor sum(Tape& tape, const Tensor& a);

Tensor concat_cols(Tape& tape, std::span<const Tensor> parts);
Tensor slice_rows(Tape& tape, const Tensor& a, index_t begin, index_t count);
/// out[r,:] = a[index[r],:]
Tensor gather_rows(Tape& tape, const Tensor& a, std::span<const index_t> index);
/// out[index[r],:] += a[r,:], out has num_rows rows.
Tensor scatter_add_rows(Tape& tape, const Tensor& a, std::span<const index_t> index,
                        index_t num_rows);

/// out[i,:] = sum_e weights[e] * h[col(e),:] over the row-i edges of `pattern`.
/// Differentiable in h and, when they require grad, in the edge weights (E x 1).
Tensor spmm(Tape& tape, const std::shared_ptr<const SparsePattern>& pattern,
            const Tensor& weights, const Tensor& h);

/// Softmax of an E x 1 logit column within each destination row of `offsets`,
/// shifted by the segment maximum.
Tensor segment_softmax(Tape& tape, const Tensor& logits, std::span<const index_t> offsets);

/// Softmax along each row.
Tensor row_softmax(Tape& tape, const Tensor& x);

/// out[i,:] = sum_k weights[i,k] * hops[k][i,:]
Tensor weighted_hop_sum(Tape& tape, std::span<const Tensor> hops, const Tensor& weights);

struct BatchNormState {
  Tensor gamma;  // 1 x d
  Tensor beta;   // 1 x d
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double eps = 1e-5;
  double momentum = 0.1;

  explicit BatchNormState(index_t dim = 0);
  index_t dim() const { return static_cast<index_t>(running_mean.size()); }
};

/// Train mode normalizes each column with the batch mean and biased variance
/// and folds (mean, unbiased variance) into the running statistics, rounded to
/// f32. Eval mode uses the running statistics.
Tensor batch_norm(Tape& tape, const Tensor& x, BatchNormState& state, Mode mode);

/// Inverted dropout: survivors are scaled by 1/(1-rate). Identity in eval mode
/// or when rate == 0 (no random numbers are drawn then).
Tensor dropout(Tape& tape, const Tensor& x, double rate, Rng& rng, Mode mode);

/// Mean negative log-likelihood of the softmax over masked rows.
Tensor softmax_cross_entropy(Tape& tape, const Tensor& logits,
                             std::span<const std::int32_t> labels, const std::vector<bool>& mask);

}  // namespace agdn
