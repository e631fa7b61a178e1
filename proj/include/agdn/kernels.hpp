#pragma once

// Data-parallel inner loops used by the differentiation engine.
//
// Every kernel exists twice: `serial::` is the plain reference and
// `parallel::` is the OpenMP version the engine calls. Each output element is
// produced by exactly one thread and accumulated in the same order as the
// serial loop, so the two agree bit for bit regardless of thread count.

#include <span>
#include <vector>

#include "agdn/graph.hpp"

namespace agdn::kernels {

/// Row-compressed sparsity pattern. Row i owns edges [offsets[i], offsets[i+1]).
struct CsrView {
  index_t rows = 0;
  std::span<const index_t> offsets;
  std::span<const index_t> cols;
};

/// Column-major index over the same edges: column j owns positions
/// [offsets[j], offsets[j+1]) of `edges`/`rows`, ordered by edge id.
struct TransposeIndex {
  std::vector<index_t> offsets;
  std::vector<index_t> edges;
  std::vector<index_t> rows;
};

TransposeIndex build_transpose(CsrView csr, index_t num_cols);

enum class Trans { no, yes };

#define AGDN_KERNEL_DECLS                                                                   \
  /* out[i,:] = sum_e w[e] * h[col(e),:] over row i */                                      \
  void spmm(CsrView t, std::span<const double> w, std::span<const double> h, index_t d,    \
            std::span<double> out);                                                         \
  /* out[j,:] = sum over edges (i,j) of w[e] * g[i,:]; out has num_cols rows */              \
  void spmm_transposed(const TransposeIndex& tr, std::span<const double> w,                 \
                       std::span<const double> g, index_t d, std::span<double> out);        \
  /* out[e] = <g[row(e),:], h[col(e),:]> */                                                  \
  void edge_dot(CsrView t, std::span<const double> g, std::span<const double> h, index_t d, \
                std::span<double> out);                                                     \
  /* c (n x m) = op(a) * op(b), with inner dimension k */                                   \
  void gemm(Trans ta, Trans tb, index_t n, index_t m, index_t k, std::span<const double> a, \
            std::span<const double> b, std::span<double> c);                                \
  /* softmax within each segment [offsets[s], offsets[s+1]), shifted by the segment max */  \
  void segment_softmax(std::span<const index_t> offsets, std::span<const double> logits,    \
                       std::span<double> out);                                              \
  /* gx[e] = y[e] * (gy[e] - sum_{f in seg} y[f] gy[f]) */                                   \
  void segment_softmax_backward(std::span<const index_t> offsets, std::span<const double> y, \
                                std::span<const double> gy, std::span<double> gx);

namespace serial {
AGDN_KERNEL_DECLS
}  // namespace serial

namespace parallel {
AGDN_KERNEL_DECLS
}  // namespace parallel

#undef AGDN_KERNEL_DECLS

/// Threads the parallel kernels will use.
int max_threads();

}  // namespace agdn::kernels
