#include "agdn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace agdn {

namespace kp = kernels::parallel;
using kernels::Trans;

namespace {

std::string shape_of(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_of(a) + " vs " + shape_of(b));
}

template <class... Ts>
bool any_requires_grad(const Ts&... ts) {
  return (ts.requires_grad() || ...);
}

void accumulate(const Tensor& t, std::span<const double> g) {
  auto dst = t.ensure_grad();
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

}  // namespace

std::shared_ptr<const SparsePattern> SparsePattern::build(index_t num_nodes,
                                                          std::vector<index_t> offsets,
                                                          std::vector<index_t> cols) {
  auto p = std::make_shared<SparsePattern>();
  p->num_nodes = num_nodes;
  p->offsets = std::move(offsets);
  p->cols = std::move(cols);
  p->edge_rows.resize(p->cols.size());
  for (index_t i = 0; i < num_nodes; ++i)
    for (index_t e = p->offsets[i]; e < p->offsets[i + 1]; ++e) p->edge_rows[e] = i;
  p->transpose = kernels::build_transpose(p->view(), num_nodes);
  return p;
}

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions differ (" + shape_of(a) + " * " + shape_of(b) + ")");
  const index_t n = a.rows(), k = a.cols(), m = b.cols();
  Tensor out(n, m, any_requires_grad(a, b));
  kp::gemm(Trans::no, Trans::no, n, m, k, a.values(), b.values(), out.values());
  if (out.requires_grad()) {
    tape.record(out, [a, b, out, n, k, m]() mutable {
      if (!out.has_grad()) return;
      if (a.requires_grad()) {
        std::vector<double> ga(n * k);
        kp::gemm(Trans::no, Trans::yes, n, k, m, out.grad(), b.values(), ga);
        accumulate(a, ga);
      }
      if (b.requires_grad()) {
        std::vector<double> gb(k * m);
        kp::gemm(Trans::yes, Trans::no, k, m, n, a.values(), out.grad(), gb);
        accumulate(b, gb);
      }
    });
  }
  return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  Tensor out(a.rows(), a.cols(), any_requires_grad(a, b));
  auto o = out.values();
  auto av = a.values(), bv = b.values();
  for (index_t i = 0; i < out.size(); ++i) o[i] = av[i] + bv[i];
  if (out.requires_grad()) {
    tape.record(out, [a, b, out]() mutable {
      if (!out.has_grad()) return;
      if (a.requires_grad()) accumulate(a, out.grad());
      if (b.requires_grad()) accumulate(b, out.grad());
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& a, double factor) {
  Tensor out(a.rows(), a.cols(), a.requires_grad());
  auto o = out.values();
  auto av = a.values();
  for (index_t i = 0; i < out.size(); ++i) o[i] = factor * av[i];
  if (out.requires_grad()) {
    tape.record(out, [a, out, factor]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto ga = a.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
    });
  }
  return out;
}

Tensor mul_const(Tape& tape, const Tensor& a, std::span<const double> factors) {
  if (static_cast<index_t>(factors.size()) != a.size())
    throw ShapeError("mul_const: " + std::to_string(factors.size()) + " factors for " + shape_of(a));
  Tensor out(a.rows(), a.cols(), a.requires_grad());
  auto o = out.values();
  auto av = a.values();
  for (index_t i = 0; i < out.size(); ++i) o[i] = av[i] * factors[i];
  if (out.requires_grad()) {
    std::vector<double> f(factors.begin(), factors.end());
    tape.record(out, [a, out, f = std::move(f)]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto ga = a.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += f[i] * g[i];
    });
  }
  return out;
}

Tensor leaky_relu(Tape& tape, const Tensor& x, double slope) {
  Tensor out(x.rows(), x.cols(), x.requires_grad());
  auto o = out.values();
  auto xv = x.values();
  for (index_t i = 0; i < out.size(); ++i) o[i] = xv[i] > 0.0 ? xv[i] : slope * xv[i];
  if (out.requires_grad()) {
    tape.record(out, [x, out, slope]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto gx = x.ensure_grad();
      auto xv = x.values();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += (xv[i] > 0.0 ? 1.0 : slope) * g[i];
    });
  }
  return out;
}

Tensor relu(Tape& tape, const Tensor& x) { return leaky_relu(tape, x, 0.0); }

Tensor sum(Tape& tape, const Tensor& a) {
  Tensor out(1, 1, a.requires_grad());
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  out.values()[0] = acc;
  if (out.requires_grad()) {
    tape.record(out, [a, out]() mutable {
      if (!out.has_grad()) return;
      const double g = out.grad()[0];
      for (double& v : a.ensure_grad()) v += g;
    });
  }
  return out;
}

Tensor concat_cols(Tape& tape, std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const index_t rows = parts[0].rows();
  index_t cols = 0;
  bool grad = false;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.cols();
    grad = grad || p.requires_grad();
  }
  Tensor out(rows, cols, grad);
  index_t offset = 0;
  for (const auto& p : parts) {
    for (index_t r = 0; r < rows; ++r)
      for (index_t c = 0; c < p.cols(); ++c) out.at(r, offset + c) = p.at(r, c);
    offset += p.cols();
  }
  if (grad) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape.record(out, [inputs, out]() mutable {
      if (!out.has_grad()) return;
      index_t offset = 0;
      for (auto& p : inputs) {
        if (p.requires_grad()) {
          auto gp = p.ensure_grad();
          for (index_t r = 0; r < p.rows(); ++r)
            for (index_t c = 0; c < p.cols(); ++c)
              gp[r * p.cols() + c] += out.grad()[r * out.cols() + offset + c];
        }
        offset += p.cols();
      }
    });
  }
  return out;
}

Tensor slice_rows(Tape& tape, const Tensor& a, index_t begin, index_t count) {
  if (begin < 0 || count < 0 || begin + count > a.rows())
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside " + shape_of(a));
  Tensor out(count, a.cols(), a.requires_grad());
  const index_t width = a.cols();
  std::copy_n(a.values().begin() + begin * width, count * width, out.values().begin());
  if (out.requires_grad()) {
    tape.record(out, [a, out, begin, width]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto ga = a.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[begin * width + i] += g[i];
    });
  }
  return out;
}

Tensor gather_rows(Tape& tape, const Tensor& a, std::span<const index_t> index) {
  const index_t width = a.cols();
  Tensor out(static_cast<index_t>(index.size()), width, a.requires_grad());
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] < 0 || index[r] >= a.rows()) throw ShapeError("gather_rows: index out of range");
    std::copy_n(a.values().begin() + index[r] * width, width, out.values().begin() + r * width);
  }
  if (out.requires_grad()) {
    std::vector<index_t> idx(index.begin(), index.end());
    tape.record(out, [a, out, idx = std::move(idx), width]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto ga = a.ensure_grad();
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (index_t c = 0; c < width; ++c) ga[idx[r] * width + c] += g[r * width + c];
    });
  }
  return out;
}

Tensor scatter_add_rows(Tape& tape, const Tensor& a, std::span<const index_t> index,
                        index_t num_rows) {
  if (static_cast<index_t>(index.size()) != a.rows())
    throw ShapeError("scatter_add_rows: index length != rows");
  const index_t width = a.cols();
  Tensor out(num_rows, width, a.requires_grad());
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] < 0 || index[r] >= num_rows)
      throw ShapeError("scatter_add_rows: index out of range");
    for (index_t c = 0; c < width; ++c) out.at(index[r], c) += a.at(static_cast<index_t>(r), c);
  }
  if (out.requires_grad()) {
    std::vector<index_t> idx(index.begin(), index.end());
    tape.record(out, [a, out, idx = std::move(idx), width]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto ga = a.ensure_grad();
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (index_t c = 0; c < width; ++c) ga[r * width + c] += g[idx[r] * width + c];
    });
  }
  return out;
}

Tensor spmm(Tape& tape, const std::shared_ptr<const SparsePattern>& pattern,
            const Tensor& weights, const Tensor& h) {
  if (weights.rows() != pattern->num_edges() || weights.cols() != 1)
    throw ShapeError("spmm: weights must be E x 1 with E=" + std::to_string(pattern->num_edges()) +
                     ", got " + shape_of(weights));
  if (h.rows() != pattern->num_nodes)
    throw ShapeError("spmm: h has " + std::to_string(h.rows()) + " rows, transition is " +
                     std::to_string(pattern->num_nodes) + " square");
  const index_t d = h.cols();
  Tensor out(h.rows(), d, any_requires_grad(weights, h));
  kp::spmm(pattern->view(), weights.values(), h.values(), d, out.values());
  if (out.requires_grad()) {
    tape.record(out, [pattern, weights, h, out, d]() mutable {
      if (!out.has_grad()) return;
      if (h.requires_grad()) {
        std::vector<double> gh(h.size());
        kp::spmm_transposed(pattern->transpose, weights.values(), out.grad(), d, gh);
        accumulate(h, gh);
      }
      if (weights.requires_grad()) {
        std::vector<double> gw(weights.size());
        kp::edge_dot(pattern->view(), out.grad(), h.values(), d, gw);
        accumulate(weights, gw);
      }
    });
  }
  return out;
}

Tensor segment_softmax(Tape& tape, const Tensor& logits, std::span<const index_t> offsets) {
  if (logits.cols() != 1 || offsets.empty() || offsets.back() != logits.rows())
    throw ShapeError("segment_softmax: logits must be E x 1 matching the segment offsets");
  Tensor out(logits.rows(), 1, logits.requires_grad());
  kp::segment_softmax(offsets, logits.values(), out.values());
  if (out.requires_grad()) {
    std::vector<index_t> segs(offsets.begin(), offsets.end());
    tape.record(out, [logits, out, segs = std::move(segs)]() mutable {
      if (!out.has_grad()) return;
      std::vector<double> gx(logits.size());
      kp::segment_softmax_backward(segs, out.values(), out.grad(), gx);
      accumulate(logits, gx);
    });
  }
  return out;
}

Tensor row_softmax(Tape& tape, const Tensor& x) {
  std::vector<index_t> offsets(x.rows() + 1);
  for (index_t i = 0; i <= x.rows(); ++i) offsets[i] = i * x.cols();
  Tensor out(x.rows(), x.cols(), x.requires_grad());
  kp::segment_softmax(offsets, x.values(), out.values());
  if (out.requires_grad()) {
    tape.record(out, [x, out, offsets = std::move(offsets)]() mutable {
      if (!out.has_grad()) return;
      std::vector<double> gx(x.size());
      kp::segment_softmax_backward(offsets, out.values(), out.grad(), gx);
      accumulate(x, gx);
    });
  }
  return out;
}

Tensor weighted_hop_sum(Tape& tape, std::span<const Tensor> hops, const Tensor& weights) {
  if (hops.empty()) throw ShapeError("weighted_hop_sum: empty hop stack");
  const index_t n = hops[0].rows(), d = hops[0].cols();
  const auto k1 = static_cast<index_t>(hops.size());
  if (weights.rows() != n || weights.cols() != k1)
    throw ShapeError("weighted_hop_sum: weights " + shape_of(weights) + " for " +
                     std::to_string(k1) + " hops of " + std::to_string(n) + " rows");
  bool grad = weights.requires_grad();
  for (const auto& h : hops) {
    if (h.rows() != n || h.cols() != d) throw ShapeError("weighted_hop_sum: hop shapes differ");
    grad = grad || h.requires_grad();
  }
  Tensor out(n, d, grad);
  auto o = out.values();
  for (index_t i = 0; i < n; ++i)
    for (index_t k = 0; k < k1; ++k) {
      const double w = weights.at(i, k);
      auto hv = hops[k].values();
      for (index_t c = 0; c < d; ++c) o[i * d + c] += w * hv[i * d + c];
    }
  if (grad) {
    std::vector<Tensor> stack(hops.begin(), hops.end());
    tape.record(out, [stack, weights, out, n, d, k1]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      for (index_t k = 0; k < k1; ++k) {
        auto& h = stack[k];
        if (h.requires_grad()) {
          auto gh = h.ensure_grad();
          for (index_t i = 0; i < n; ++i) {
            const double w = weights.at(i, k);
            for (index_t c = 0; c < d; ++c) gh[i * d + c] += w * g[i * d + c];
          }
        }
        if (weights.requires_grad()) {
          auto gw = weights.ensure_grad();
          auto hv = h.values();
          for (index_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (index_t c = 0; c < d; ++c) acc += g[i * d + c] * hv[i * d + c];
            gw[i * k1 + k] += acc;
          }
        }
      }
    });
  }
  return out;
}

BatchNormState::BatchNormState(index_t dim)
    : gamma(1, dim, std::vector<double>(dim, 1.0), true),
      beta(1, dim, true),
      running_mean(dim, 0.0),
      running_var(dim, 1.0) {}

Tensor batch_norm(Tape& tape, const Tensor& x, BatchNormState& state, Mode mode) {
  const index_t n = x.rows(), d = x.cols();
  if (d != state.dim())
    throw ShapeError("batch_norm: input has " + std::to_string(d) + " columns, state has " +
                     std::to_string(state.dim()));
  if (mode == Mode::train && n < 1) throw ShapeError("batch_norm: empty batch");

  std::vector<double> mean(d), inv_std(d);
  if (mode == Mode::train) {
    std::vector<double> var(d, 0.0);
    for (index_t c = 0; c < d; ++c) {
      double m = 0.0;
      for (index_t i = 0; i < n; ++i) m += x.at(i, c);
      m /= static_cast<double>(n);
      double v = 0.0;
      for (index_t i = 0; i < n; ++i) v += (x.at(i, c) - m) * (x.at(i, c) - m);
      v /= static_cast<double>(n);
      mean[c] = m;
      var[c] = v;
      inv_std[c] = 1.0 / std::sqrt(v + state.eps);
      double unbiased = n > 1 ? v * static_cast<double>(n) / static_cast<double>(n - 1) : v;
      state.running_mean[c] = static_cast<float>((1.0 - state.momentum) * state.running_mean[c] +
                                                 state.momentum * m);
      state.running_var[c] = static_cast<float>((1.0 - state.momentum) * state.running_var[c] +
                                                state.momentum * unbiased);
    }
  } else {
    for (index_t c = 0; c < d; ++c) {
      mean[c] = state.running_mean[c];
      inv_std[c] = 1.0 / std::sqrt(state.running_var[c] + state.eps);
    }
  }

  Tensor normalized(n, d);
  Tensor out(n, d, any_requires_grad(x, state.gamma, state.beta));
  for (index_t i = 0; i < n; ++i)
    for (index_t c = 0; c < d; ++c) {
      double xh = (x.at(i, c) - mean[c]) * inv_std[c];
      normalized.at(i, c) = xh;
      out.at(i, c) = state.gamma.at(0, c) * xh + state.beta.at(0, c);
    }

  if (out.requires_grad()) {
    Tensor gamma = state.gamma, beta = state.beta;
    tape.record(out, [x, gamma, beta, out, normalized, inv_std, mode, n, d]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      std::vector<double> sum_g(d, 0.0), sum_gx(d, 0.0);
      for (index_t i = 0; i < n; ++i)
        for (index_t c = 0; c < d; ++c) {
          sum_g[c] += g[i * d + c];
          sum_gx[c] += g[i * d + c] * normalized.at(i, c);
        }
      if (gamma.requires_grad()) {
        auto gg = gamma.ensure_grad();
        for (index_t c = 0; c < d; ++c) gg[c] += sum_gx[c];
      }
      if (beta.requires_grad()) {
        auto gb = beta.ensure_grad();
        for (index_t c = 0; c < d; ++c) gb[c] += sum_g[c];
      }
      if (!x.requires_grad()) return;
      auto gx = x.ensure_grad();
      const double inv_n = 1.0 / static_cast<double>(n);
      for (index_t i = 0; i < n; ++i)
        for (index_t c = 0; c < d; ++c) {
          const double scale_c = gamma.at(0, c) * inv_std[c];
          if (mode == Mode::train)
            gx[i * d + c] += scale_c * (g[i * d + c] - inv_n * sum_g[c] -
                                        normalized.at(i, c) * inv_n * sum_gx[c]);
          else
            gx[i * d + c] += scale_c * g[i * d + c];
        }
    });
  }
  return out;
}

Tensor dropout(Tape& tape, const Tensor& x, double rate, Rng& rng, Mode mode) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (mode == Mode::eval || rate == 0.0) return x;
  std::vector<double> mask(x.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (auto& m : mask) m = u(rng) < rate ? 0.0 : keep_scale;
  return mul_const(tape, x, mask);
}

Tensor softmax_cross_entropy(Tape& tape, const Tensor& logits,
                             std::span<const std::int32_t> labels, const std::vector<bool>& mask) {
  const index_t n = logits.rows(), c = logits.cols();
  if (static_cast<index_t>(labels.size()) != n || static_cast<index_t>(mask.size()) != n)
    throw ShapeError("softmax_cross_entropy: labels/mask length != rows");
  index_t count = 0;
  for (index_t i = 0; i < n; ++i)
    if (mask[i]) {
      if (labels[i] < 0 || labels[i] >= c)
        throw std::invalid_argument("softmax_cross_entropy: masked row " + std::to_string(i) +
                                    " has label outside [0, " + std::to_string(c) + ")");
      ++count;
    }
  if (count == 0) throw std::invalid_argument("softmax_cross_entropy: empty mask");

  std::vector<double> probs(n * c, 0.0);
  double total = 0.0;
  for (index_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    double shift = logits.at(i, 0);
    for (index_t k = 1; k < c; ++k) shift = std::max(shift, logits.at(i, k));
    double z = 0.0;
    for (index_t k = 0; k < c; ++k) {
      probs[i * c + k] = std::exp(logits.at(i, k) - shift);
      z += probs[i * c + k];
    }
    for (index_t k = 0; k < c; ++k) probs[i * c + k] /= z;
    total += -(logits.at(i, labels[i]) - shift - std::log(z));
  }
  Tensor out(1, 1, logits.requires_grad());
  out.values()[0] = total / static_cast<double>(count);
  if (out.requires_grad()) {
    std::vector<std::int32_t> lab(labels.begin(), labels.end());
    tape.record(out, [logits, out, probs = std::move(probs), lab = std::move(lab), mask, count, n,
                      c]() mutable {
      if (!out.has_grad()) return;
      const double g = out.grad()[0] / static_cast<double>(count);
      auto gl = logits.ensure_grad();
      for (index_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        for (index_t k = 0; k < c; ++k)
          gl[i * c + k] += g * (probs[i * c + k] - (k == lab[i] ? 1.0 : 0.0));
      }
    });
  }
  return out;
}

}  // namespace agdn
