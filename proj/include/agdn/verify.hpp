#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "agdn/layer.hpp"
#include "agdn/model.hpp"

namespace agdn::verify {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
  bool informational = false;  // reported, never fails the run
};

/// Collects the worst hop-attention row-sum deviation seen by other checks.
struct HopAudit {
  double max_row_error = 0.0;
  double min_entry = 1.0;
  double max_entry = 0.0;
  index_t rows_checked = 0;

  void record(const HopAttention& att);
};

struct Options {
  bool full = false;
  std::uint64_t seed = 2021;
  bool inject_fault = false;  // perturbs one attention weight before the row-sum check
};

// Generators shared with the test suites.
Graph random_graph(index_t n, double p, Rng& rng);
Tensor random_tensor(index_t rows, index_t cols, Rng& rng, double scale = 1.0,
                     bool requires_grad = false);
/// Small random dataset: labels in [0, classes), about half the nodes train.
Dataset random_dataset(index_t n, index_t feature_dim, std::int32_t classes, double p, Rng& rng);

struct GradientReport {
  double max_scaled_error = 0.0;  // see oracle::scaled_error
  std::string worst_parameter;
  index_t scalars_checked = 0;
  index_t refined = 0;  // rechecked with eps/10, eps/100, ... down to 1e-6
};

/// Compares backward() with central differences for every scalar parameter
/// of the model on a train-mode loss (dropout masks fixed by re-seeding).
GradientReport model_gradient_check(const Dataset& ds, const ModelConfig& cfg,
                                    std::uint64_t seed, double eps = 1e-4,
                                    HopAudit* audit = nullptr);

CheckResult gradient_fidelity(int configs, std::uint64_t seed, HopAudit* audit = nullptr);
CheckResult diffusion_oracle(int graphs, std::uint64_t seed, HopAudit* audit = nullptr);
/// Layer output vs polynomial filter, and the filter's internal identity.
std::vector<CheckResult> spectral_degradation(int trials, std::uint64_t seed);
/// Row sums, exact symmetry, definitional form, constant-feature reduction.
std::vector<CheckResult> transition_invariants(int trials, std::uint64_t seed,
                                               bool inject_fault = false);
CheckResult gcn_reduction(int trials, std::uint64_t seed, HopAudit* audit = nullptr);
CheckResult hop_normalization(const HopAudit& audit);
CheckResult kernel_parity(std::uint64_t seed);
CheckResult gcn_spectral_radius(int trials, std::uint64_t seed);
CheckResult permutation_equivariance(int trials, std::uint64_t seed);
/// How far a strictly node-varying hop attention is from any scalar schedule.
CheckResult nonpolynomial_evidence(std::uint64_t seed);

std::vector<CheckResult> run_all(const Options& opts);
void print_report(std::ostream& out, const std::vector<CheckResult>& results);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace agdn::verify
