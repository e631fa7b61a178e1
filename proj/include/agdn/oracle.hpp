#pragma once

// Brute-force dense references. Everything here works on Eigen double
// matrices built straight from the adjacency or from explicit inputs; none of
// it goes through the sparse kernels or the tape.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "agdn/graph.hpp"
#include "agdn/tensor.hpp"

namespace agdn::oracle {

using DenseMatrix = Eigen::MatrixXd;

inline constexpr index_t kSpectralCap = 64;

DenseMatrix to_dense(const Tensor& t);

/// (I+D)^-1/2 (I+A) (I+D)^-1/2 computed from the dense adjacency.
DenseMatrix gcn_transition(const Graph& g);

/// Attention transition straight from its definition: A_att[i][j] =
/// exp(LeakyReLU([h_i||h_j].a) - s_i) on N(i) u {i}, rows divided by their sum.
/// `shift` selects s_i: the row maximum when true, zero otherwise.
DenseMatrix att_transition(const Graph& g, const DenseMatrix& h, const Eigen::VectorXd& a,
                           double slope, bool shift = true);

/// The three written forms of the normalized attention transition:
///   (I+D)^1/2 T_att (I+D)^-1/2,
///   (I+D)^1/2 (D_att^-1 A_att) (I+D)^-1/2,
///   ((I+D)^1/2 D_att^-1) A_att (I+D)^-1/2.
struct AttGcnForms {
  DenseMatrix pre_scale;
  DenseMatrix factored;
  DenseMatrix final_form;
};
AttGcnForms att_gcn_transition_forms(const Graph& g, const DenseMatrix& h,
                                     const Eigen::VectorXd& a, double slope);

/// sum_k diag(theta[:,k]) T^k H with explicit dense powers of T.
DenseMatrix dense_adaptive_diffusion(const DenseMatrix& t, const DenseMatrix& theta,
                                     const DenseMatrix& h);

/// xi_j = (-1)^j sum_{k=j}^{K} C(k, j) theta_k, the coefficients of
/// sum_k theta_k (I - L)^k rewritten as a polynomial in L.
std::vector<double> polynomial_coefficients(std::span<const double> theta);

struct PolyFilterResult {
  DenseMatrix output;            // U (sum_j xi_j Lambda^j) U^T H
  DenseMatrix power_form;        // sum_k theta_k U (I - Lambda)^k U^T H
  std::vector<double> xi;
  std::vector<double> eigenvalues;  // of L = I - T
  double identity_error = 0.0;      // max |output - power_form|
};

/// Eigendecomposes L = I - T for symmetric T (N <= 64) and evaluates the
/// hop-weighted diffusion both as a power series and as a polynomial filter
/// in L. Throws std::logic_error if the two disagree by more than 1e-8.
PolyFilterResult poly_filter_reference(const DenseMatrix& t, std::span<const double> theta,
                                       const DenseMatrix& h);

/// T_gcn (H W) for the reference single-hop GCN layer.
DenseMatrix gcn_layer_reference(const Graph& g, const DenseMatrix& h, const DenseMatrix& w);

/// Central differences (f(p + eps e_i) - f(p - eps e_i)) / (2 eps).
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> params, double eps);

/// Same, perturbing `param`'s values in place and restoring them afterwards.
std::vector<double> finite_diff_grad(const std::function<double()>& f, Tensor& param, double eps);

/// |a - b| scaled by max(|a|, |b|, floor / rel_tol); <= rel_tol iff the pair
/// agrees within rel_tol relative or floor absolute.
double scaled_error(double a, double b, double rel_tol, double abs_floor);

/// Least-squares residual of fitting the adaptive output with a single scalar
/// hop schedule: min_c || sum_k c_k T^k H - target ||_F / ||target||_F.
double scalar_schedule_residual(const DenseMatrix& t, index_t max_hop, const DenseMatrix& h,
                                const DenseMatrix& target);

}  // namespace agdn::oracle
