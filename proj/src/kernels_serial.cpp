#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agdn/kernels.hpp"

namespace agdn::kernels {

TransposeIndex build_transpose(CsrView csr, index_t num_cols) {
  TransposeIndex tr;
  tr.offsets.assign(num_cols + 1, 0);
  for (index_t j : csr.cols) ++tr.offsets[j + 1];
  for (index_t j = 0; j < num_cols; ++j) tr.offsets[j + 1] += tr.offsets[j];
  tr.edges.resize(csr.cols.size());
  tr.rows.resize(csr.cols.size());
  std::vector<index_t> cursor(tr.offsets.begin(), tr.offsets.end() - 1);
  // Row-major traversal visits edge ids in increasing order.
  for (index_t i = 0; i < csr.rows; ++i)
    for (index_t e = csr.offsets[i]; e < csr.offsets[i + 1]; ++e) {
      index_t slot = cursor[csr.cols[e]]++;
      tr.edges[slot] = e;
      tr.rows[slot] = i;
    }
  return tr;
}

namespace serial {

void spmm(CsrView t, std::span<const double> w, std::span<const double> h, index_t d,
          std::span<double> out) {
  for (index_t i = 0; i < t.rows; ++i) {
    double* o = out.data() + i * d;
    std::fill(o, o + d, 0.0);
    for (index_t e = t.offsets[i]; e < t.offsets[i + 1]; ++e) {
      const double we = w[e];
      const double* src = h.data() + t.cols[e] * d;
      for (index_t c = 0; c < d; ++c) o[c] += we * src[c];
    }
  }
}

void spmm_transposed(const TransposeIndex& tr, std::span<const double> w,
                     std::span<const double> g, index_t d, std::span<double> out) {
  const auto cols = static_cast<index_t>(tr.offsets.size()) - 1;
  for (index_t j = 0; j < cols; ++j) {
    double* o = out.data() + j * d;
    std::fill(o, o + d, 0.0);
    for (index_t p = tr.offsets[j]; p < tr.offsets[j + 1]; ++p) {
      const double we = w[tr.edges[p]];
      const double* src = g.data() + tr.rows[p] * d;
      for (index_t c = 0; c < d; ++c) o[c] += we * src[c];
    }
  }
}

void edge_dot(CsrView t, std::span<const double> g, std::span<const double> h, index_t d,
              std::span<double> out) {
  for (index_t i = 0; i < t.rows; ++i) {
    const double* gi = g.data() + i * d;
    for (index_t e = t.offsets[i]; e < t.offsets[i + 1]; ++e) {
      const double* hj = h.data() + t.cols[e] * d;
      double acc = 0.0;
      for (index_t c = 0; c < d; ++c) acc += gi[c] * hj[c];
      out[e] = acc;
    }
  }
}

void gemm(Trans ta, Trans tb, index_t n, index_t m, index_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c) {
  for (index_t i = 0; i < n; ++i) {
    double* ci = c.data() + i * m;
    std::fill(ci, ci + m, 0.0);
    for (index_t p = 0; p < k; ++p) {
      const double aip = ta == Trans::no ? a[i * k + p] : a[p * n + i];
      if (tb == Trans::no) {
        const double* bp = b.data() + p * m;
        for (index_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
      } else {
        for (index_t j = 0; j < m; ++j) ci[j] += aip * b[j * k + p];
      }
    }
  }
}

void segment_softmax(std::span<const index_t> offsets, std::span<const double> logits,
                     std::span<double> out) {
  const auto segs = static_cast<index_t>(offsets.size()) - 1;
  for (index_t s = 0; s < segs; ++s) {
    const index_t lo = offsets[s], hi = offsets[s + 1];
    if (lo == hi) throw std::domain_error("segment_softmax: empty segment " + std::to_string(s));
    double shift = logits[lo];
    for (index_t e = lo + 1; e < hi; ++e) shift = std::max(shift, logits[e]);
    double total = 0.0;
    for (index_t e = lo; e < hi; ++e) {
      out[e] = std::exp(logits[e] - shift);
      total += out[e];
    }
    for (index_t e = lo; e < hi; ++e) out[e] /= total;
  }
}

void segment_softmax_backward(std::span<const index_t> offsets, std::span<const double> y,
                              std::span<const double> gy, std::span<double> gx) {
  const auto segs = static_cast<index_t>(offsets.size()) - 1;
  for (index_t s = 0; s < segs; ++s) {
    double dot = 0.0;
    for (index_t e = offsets[s]; e < offsets[s + 1]; ++e) dot += y[e] * gy[e];
    for (index_t e = offsets[s]; e < offsets[s + 1]; ++e) gx[e] = y[e] * (gy[e] - dot);
  }
}

}  // namespace serial
}  // namespace agdn::kernels
