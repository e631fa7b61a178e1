#include "agdn/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace agdn::oracle {

DenseMatrix to_dense(const Tensor& t) {
  DenseMatrix m(t.rows(), t.cols());
  for (index_t r = 0; r < t.rows(); ++r)
    for (index_t c = 0; c < t.cols(); ++c) m(r, c) = t.at(r, c);
  return m;
}

namespace {

Eigen::VectorXd self_loop_degrees(const DenseMatrix& adj) {
  return adj.rowwise().sum().array() + 1.0;
}

}  // namespace

DenseMatrix gcn_transition(const Graph& g) {
  const DenseMatrix adj = agdn::to_dense(g);
  const index_t n = adj.rows();
  const Eigen::VectorXd inv_sqrt = self_loop_degrees(adj).array().rsqrt();
  DenseMatrix a_hat = adj + DenseMatrix::Identity(n, n);
  return inv_sqrt.asDiagonal() * a_hat * inv_sqrt.asDiagonal();
}

namespace {

DenseMatrix attention_adjacency(const Graph& g, const DenseMatrix& h, const Eigen::VectorXd& a,
                                double slope, bool shift) {
  const DenseMatrix adj = agdn::to_dense(g);
  const index_t n = adj.rows(), d = h.cols();
  if (a.size() != 2 * d) throw std::invalid_argument("oracle attention: a must have 2d entries");
  DenseMatrix logits = DenseMatrix::Constant(n, n, -INFINITY);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) {
      if (i != j && adj(i, j) == 0.0) continue;
      const double raw = h.row(i).dot(a.head(d)) + h.row(j).dot(a.tail(d));
      logits(i, j) = raw > 0.0 ? raw : slope * raw;
    }
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (index_t i = 0; i < n; ++i) {
    const double s = shift ? logits.row(i).maxCoeff() : 0.0;
    for (index_t j = 0; j < n; ++j)
      if (std::isfinite(logits(i, j))) out(i, j) = std::exp(logits(i, j) - s);
  }
  return out;
}

}  // namespace

DenseMatrix att_transition(const Graph& g, const DenseMatrix& h, const Eigen::VectorXd& a,
                           double slope, bool shift) {
  DenseMatrix a_att = attention_adjacency(g, h, a, slope, shift);
  Eigen::VectorXd row_sum = a_att.rowwise().sum();
  return row_sum.cwiseInverse().asDiagonal() * a_att;
}

AttGcnForms att_gcn_transition_forms(const Graph& g, const DenseMatrix& h,
                                     const Eigen::VectorXd& a, double slope) {
  const DenseMatrix adj = agdn::to_dense(g);
  const Eigen::VectorXd deg1 = self_loop_degrees(adj);
  const Eigen::VectorXd sqrt_deg = deg1.array().sqrt();
  const Eigen::VectorXd inv_sqrt_deg = deg1.array().rsqrt();
  const DenseMatrix a_att = attention_adjacency(g, h, a, slope, true);
  const Eigen::VectorXd d_att_inv = a_att.rowwise().sum().cwiseInverse();

  AttGcnForms forms;
  const DenseMatrix t_att = att_transition(g, h, a, slope, true);
  forms.pre_scale = sqrt_deg.asDiagonal() * t_att * inv_sqrt_deg.asDiagonal();
  forms.factored =
      sqrt_deg.asDiagonal() * (d_att_inv.asDiagonal() * a_att) * inv_sqrt_deg.asDiagonal();
  const Eigen::VectorXd left = sqrt_deg.cwiseProduct(d_att_inv);
  forms.final_form = left.asDiagonal() * a_att * inv_sqrt_deg.asDiagonal();
  return forms;
}

DenseMatrix dense_adaptive_diffusion(const DenseMatrix& t, const DenseMatrix& theta,
                                     const DenseMatrix& h) {
  const index_t n = t.rows();
  if (n > kDenseOracleCap) throw std::length_error("dense_adaptive_diffusion: N exceeds cap");
  if (t.cols() != n || theta.rows() != n || h.rows() != n)
    throw std::invalid_argument("dense_adaptive_diffusion: shape mismatch");
  DenseMatrix power = DenseMatrix::Identity(n, n);
  DenseMatrix out = DenseMatrix::Zero(n, h.cols());
  for (index_t k = 0; k < theta.cols(); ++k) {
    if (k > 0) power = power * t;
    out += theta.col(k).asDiagonal() * (power * h);
  }
  return out;
}

std::vector<double> polynomial_coefficients(std::span<const double> theta) {
  const auto k_max = static_cast<index_t>(theta.size()) - 1;
  std::vector<double> xi(theta.size(), 0.0);
  for (index_t j = 0; j <= k_max; ++j) {
    double acc = 0.0;
    double binom = 1.0;  // C(k, j), starting at k = j
    for (index_t k = j; k <= k_max; ++k) {
      if (k > j) binom = binom * static_cast<double>(k) / static_cast<double>(k - j);
      acc += binom * theta[k];
    }
    xi[j] = (j % 2 == 0 ? 1.0 : -1.0) * acc;
  }
  return xi;
}

PolyFilterResult poly_filter_reference(const DenseMatrix& t, std::span<const double> theta,
                                       const DenseMatrix& h) {
  const index_t n = t.rows();
  if (n > kSpectralCap) throw std::length_error("poly_filter_reference: N exceeds 64");
  if (t.cols() != n || h.rows() != n) throw std::invalid_argument("poly_filter_reference: shapes");
  if (theta.empty()) throw std::invalid_argument("poly_filter_reference: empty theta");
  if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("poly_filter_reference: transition is not symmetric");

  const DenseMatrix lap = DenseMatrix::Identity(n, n) - t;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(lap);
  if (eig.info() != Eigen::Success) throw std::runtime_error("poly_filter_reference: eig failed");
  const DenseMatrix& u = eig.eigenvectors();
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const DenseMatrix spectral_h = u.transpose() * h;

  PolyFilterResult res;
  res.xi = polynomial_coefficients(theta);
  res.eigenvalues.assign(lambda.data(), lambda.data() + n);

  Eigen::VectorXd power_response = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd poly_response = Eigen::VectorXd::Zero(n);
  for (index_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < theta.size(); ++k)
      power_response(i) += theta[k] * std::pow(1.0 - lambda(i), static_cast<double>(k));
    for (std::size_t j = 0; j < res.xi.size(); ++j)
      poly_response(i) += res.xi[j] * std::pow(lambda(i), static_cast<double>(j));
  }
  res.power_form = u * (power_response.asDiagonal() * spectral_h);
  res.output = u * (poly_response.asDiagonal() * spectral_h);
  res.identity_error = (res.output - res.power_form).cwiseAbs().maxCoeff();
  if (res.identity_error > 1e-8)
    throw std::logic_error("poly_filter_reference: power and polynomial forms differ by " +
                           std::to_string(res.identity_error));
  return res;
}

DenseMatrix gcn_layer_reference(const Graph& g, const DenseMatrix& h, const DenseMatrix& w) {
  return gcn_transition(g) * (h * w);
}

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> params, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_grad: eps must be positive");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + eps;
    const double up = f(p);
    p[i] = saved - eps;
    const double down = f(p);
    p[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw std::domain_error("finite_diff_grad: non-finite evaluation");
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

std::vector<double> finite_diff_grad(const std::function<double()>& f, Tensor& param, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_grad: eps must be positive");
  auto values = param.values();
  std::vector<double> grad(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + eps;
    const double up = f();
    values[i] = saved - eps;
    const double down = f();
    values[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw std::domain_error("finite_diff_grad: non-finite evaluation");
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

double scaled_error(double a, double b, double rel_tol, double abs_floor) {
  const double denom = std::max({std::abs(a), std::abs(b), abs_floor / rel_tol});
  return std::abs(a - b) / denom;
}

double scalar_schedule_residual(const DenseMatrix& t, index_t max_hop, const DenseMatrix& h,
                                const DenseMatrix& target) {
  const index_t entries = target.size();
  DenseMatrix basis(entries, max_hop + 1);
  DenseMatrix hop = h;
  for (index_t k = 0; k <= max_hop; ++k) {
    if (k > 0) hop = t * hop;
    basis.col(k) = Eigen::Map<const Eigen::VectorXd>(hop.data(), entries);
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(target.data(), entries);
  const Eigen::VectorXd coeffs = basis.colPivHouseholderQr().solve(y);
  return (basis * coeffs - y).norm() / y.norm();
}

}  // namespace agdn::oracle
