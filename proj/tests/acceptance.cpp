// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "agdn/train.hpp"
#include "agdn/verify.hpp"

using namespace agdn;

namespace {

constexpr std::uint64_t kSeed = 2021;
const std::vector<std::uint64_t> kTaskSeeds{0, 1, 2};

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs of %.0fs", secs, budget_s);
  std::cout << (ok ? "PASS" : "FAIL") << "  " << id << " " << name << ": " << o.detail << " ("
            << timing << (in_time ? "" : ", over budget") << ")" << std::endl;
}

Outcome from_checks(const std::vector<verify::CheckResult>& checks) {
  Outcome o{true, ""};
  for (const auto& c : checks) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s %.2e <= %.0e%s", o.detail.empty() ? "" : "; ", c.name.c_str(),
                  c.measured, c.tolerance, c.passed ? "" : " FAILED");
    o.detail += buf;
    o.passed = o.passed && c.passed;
  }
  return o;
}

Dataset task(std::uint64_t seed) {
  SbmParams p;
  p.num_nodes = 300;
  p.num_classes = 3;
  p.p_in = 0.1;
  p.p_out = 0.01;
  p.seed = seed;
  return synth_sbm(p);
}

ModelConfig task_model(const Dataset& ds, bool use_labels) {
  ModelConfig cfg;
  cfg.variant = Variant::gcn_ha;
  cfg.layers = 2;
  cfg.hops = 3;
  cfg.hidden_dim = 64;
  cfg.input_dim = ds.features.cols;
  cfg.num_classes = ds.num_classes;
  cfg.use_labels = use_labels;
  return cfg;
}

TrainConfig task_train(std::uint64_t seed) {
  TrainConfig tc;
  tc.learning_rate = 0.1;
  tc.epochs = 200;
  tc.seed = seed;
  return tc;
}

struct TaskRun {
  Metrics metrics;
  std::string log;  // JSON lines, as the CLI writes them
  double best_train = 0.0;
};

TaskRun run_task(std::uint64_t seed, bool use_labels, const InputObserver& on_input = {}) {
  Dataset ds = task(seed);
  TaskRun run;
  run.metrics = train(
                    ds, task_model(ds, use_labels), task_train(seed),
                    [&](const EpochRecord& r) {
                      run.log += r.to_json().dump() + "\n";
                      run.best_train = std::max(run.best_train, r.train_acc);
                    },
                    on_input)
                    .metrics;
  return run;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Label columns of `input` that are nonzero on a row outside `exposed`.
index_t leaked_cells(const FeatureMatrix& input, index_t raw_cols, const std::vector<bool>& exposed) {
  index_t leaks = 0;
  for (index_t i = 0; i < input.rows; ++i) {
    if (exposed[i]) continue;
    for (index_t c = raw_cols; c < input.cols; ++c)
      if (input.at(i, c) != 0.0f) ++leaks;
  }
  return leaks;
}

}  // namespace

int main() {
  verify::HopAudit audit;

  criterion(1, "gradient fidelity", 120, [&] {
    return from_checks({verify::gradient_fidelity(20, kSeed + 1, &audit)});
  });
  criterion(2, "diffusion oracle", 30, [&] {
    return from_checks({verify::diffusion_oracle(50, kSeed + 2, &audit)});
  });
  criterion(3, "spectral degradation", 30, [&] {
    return from_checks(verify::spectral_degradation(30, kSeed + 3));
  });
  criterion(4, "transition invariants", 30, [&] {
    return from_checks(verify::transition_invariants(100, kSeed + 4));
  });
  criterion(5, "gcn reduction", 30, [&] {
    return from_checks({verify::gcn_reduction(30, kSeed + 5, &audit)});
  });
  criterion(6, "hop attention normalization", 5, [&] {
    return from_checks({verify::hop_normalization(audit)});
  });

  std::vector<TaskRun> plain;
  criterion(7, "end-to-end learning", 300, [&] {
    std::vector<double> test, base;
    bool trained = true;
    std::string per_seed;
    for (std::uint64_t s : kTaskSeeds) {
      plain.push_back(run_task(s, false));
      const TaskRun& r = plain.back();
      Metrics lin = train_linear_baseline(task(s), task_train(s));
      test.push_back(r.metrics.test_acc_at_best);
      base.push_back(lin.test_acc_at_best);
      trained = trained && r.best_train >= 0.95;
      per_seed += " seed" + std::to_string(s) + " train " + fmt(r.best_train) + " test " +
                  fmt(r.metrics.test_acc_at_best) + " linear " + fmt(lin.test_acc_at_best) + ";";
    }
    const double gap = mean(test) - mean(base);
    return Outcome{trained && gap >= 0.05, "mean test " + fmt(mean(test)) + " vs linear " + fmt(mean(base)) +
                                               " (gap " + fmt(gap) + " >= 0.050);" + per_seed};
  });

  criterion(8, "determinism", 300, [&] {
    if (plain.size() != kTaskSeeds.size()) return Outcome{false, "criterion 7 did not complete"};
    index_t lines = 0;
    for (std::size_t i = 0; i < kTaskSeeds.size(); ++i) {
      TaskRun again = run_task(kTaskSeeds[i], false);
      if (again.log != plain[i].log)
        return Outcome{false, "metrics log differs for seed " + std::to_string(kTaskSeeds[i])};
      lines += std::count(again.log.begin(), again.log.end(), '\n');
    }
    return Outcome{true, std::to_string(lines) + " metrics lines identical across two runs"};
  });

  criterion(9, "label augmentation", 300, [&] {
    if (plain.size() != kTaskSeeds.size()) return Outcome{false, "criterion 7 did not complete"};
    std::vector<double> with, without;
    index_t leaks = 0, outside_train = 0, steps = 0;
    for (std::size_t i = 0; i < kTaskSeeds.size(); ++i) {
      const Dataset ds = task(kTaskSeeds[i]);
      TaskRun r = run_task(kTaskSeeds[i], true, [&](const FeatureMatrix& input, const std::vector<bool>& exposed) {
        ++steps;
        leaks += leaked_cells(input, ds.features.cols, exposed);
        for (index_t n = 0; n < ds.num_nodes(); ++n)
          if (exposed[n] && !ds.train_mask[n]) ++outside_train;
      });
      // evaluation exposes exactly the training set
      leaks += leaked_cells(augment_with_labels(ds.features, ds.labels, ds.num_classes, ds.train_mask),
                            ds.features.cols, ds.train_mask);
      with.push_back(r.metrics.test_acc_at_best);
      without.push_back(plain[i].metrics.test_acc_at_best);
    }
    const double drop = mean(without) - mean(with);
    return Outcome{drop <= 0.01 && leaks == 0 && outside_train == 0 && steps > 0,
                   "mean test " + fmt(mean(with)) + " with labels vs " + fmt(mean(without)) + " without (drop " +
                       fmt(drop) + " <= 0.010); " + std::to_string(leaks) + " leaked label cells, " +
                       std::to_string(outside_train) + " exposed nodes outside train over " +
                       std::to_string(steps) + " steps"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
