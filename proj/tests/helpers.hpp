#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "agdn/oracle.hpp"
#include "agdn/ops.hpp"
#include "agdn/verify.hpp"

namespace agdn::test {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("agdn_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Entries drawn with |x| in [0.1, 1.1] so a +-1e-3 step never crosses a kink at 0.
inline Tensor away_from_zero(index_t rows, index_t cols, Rng& rng, bool requires_grad = true) {
  std::uniform_real_distribution<double> u(0.1, 1.1);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = sign(rng) ? u(rng) : -u(rng);
  return Tensor(rows, cols, std::move(v), requires_grad);
}

/// sum(out .* r) for fixed random r, so every output entry gets its own weight.
inline Tensor probe(Tape& tape, const Tensor& out, std::uint64_t seed = 99) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> r(out.size());
  for (auto& x : r) x = u(rng);
  return sum(tape, mul_const(tape, out, r));
}

/// Worst oracle::scaled_error (1e-4 relative, 1e-6 floor) between backward()
/// and central differences with step eps over every scalar of `leaves`.
inline double grad_check(std::vector<Tensor> leaves, const std::function<Tensor(Tape&)>& loss_fn,
                         double eps = 1e-3) {
  for (auto& t : leaves) t.zero_grad();
  {
    Tape tape;
    Tensor loss = loss_fn(tape);
    tape.backward(loss);
  }
  std::vector<std::vector<double>> analytic;
  for (auto& t : leaves)
    analytic.emplace_back(t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                                       : std::vector<double>(t.size(), 0.0));
  double worst = 0.0;
  for (std::size_t p = 0; p < leaves.size(); ++p) {
    auto numeric = oracle::finite_diff_grad(
        [&] {
          Tape tape;
          return loss_fn(tape).item();
        },
        leaves[p], eps);
    for (std::size_t i = 0; i < numeric.size(); ++i)
      worst = std::max(worst, oracle::scaled_error(analytic[p][i], numeric[i], 1e-4, 1e-6));
  }
  return worst;
}

inline Graph k2() { return Graph::from_edges(2, std::vector<std::pair<index_t, index_t>>{{0, 1}}); }
inline Graph k3() {
  return Graph::from_edges(3, std::vector<std::pair<index_t, index_t>>{{0, 1}, {1, 2}, {0, 2}});
}

}  // namespace agdn::test
