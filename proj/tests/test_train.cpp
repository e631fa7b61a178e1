#include <doctest.h>

#include <cmath>

#include "agdn/checkpoint.hpp"
#include "agdn/train.hpp"
#include "helpers.hpp"

using namespace agdn;

namespace {

Dataset sbm(std::uint64_t seed, index_t n = 120) {
  SbmParams p;
  p.num_nodes = n;
  p.seed = seed;
  return synth_sbm(p);
}

ModelConfig gcn_config(const Dataset& ds) {
  ModelConfig cfg;
  cfg.layers = 2;
  cfg.hops = 3;
  cfg.hidden_dim = 16;
  cfg.input_dim = ds.features.cols;
  cfg.num_classes = ds.num_classes;
  return cfg;
}

std::vector<double> flat(const ModelParams& p) {
  std::vector<double> out;
  for (const auto& [name, t] : p.named_parameters()) out.insert(out.end(), t.values().begin(), t.values().end());
  for (const auto& bn : p.norms) {
    out.insert(out.end(), bn.running_mean.begin(), bn.running_mean.end());
    out.insert(out.end(), bn.running_var.begin(), bn.running_var.end());
  }
  return out;
}

}  // namespace

TEST_CASE("accuracy and evaluate") {
  Tensor perfect(3, 3);
  std::vector<std::int32_t> y{0, 2, 1};
  for (index_t i = 0; i < 3; ++i) perfect.at(i, y[i]) = 5;
  std::vector<bool> all{true, true, true};
  CHECK(accuracy(perfect, y, all) == 1.0);

  Tensor uniform(3, 3);
  std::vector<std::int32_t> zeros{0, 0, 0}, ones{1, 1, 1};
  CHECK(accuracy(uniform, zeros, all) == 1.0);
  CHECK(accuracy(uniform, ones, all) == 0.0);

  Tensor two_right = perfect.clone();
  two_right.at(2, 1) = 0;
  two_right.at(2, 0) = 9;
  CHECK(accuracy(two_right, y, all) == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(accuracy(perfect, y, {false, false, false}), std::invalid_argument);
}

TEST_CASE("sgd_step") {
  Tensor p(1, 3, {1, 2, 3}, true);
  std::vector<Tensor> ps{p};
  p.ensure_grad();
  sgd_step(ps, 0.5);
  CHECK(std::vector<double>(p.values().begin(), p.values().end()) == std::vector<double>{1, 2, 3});

  for (std::size_t i = 0; i < 3; ++i) p.grad()[i] = p.values()[i];
  sgd_step(ps, 1.0);
  for (double v : p.values()) CHECK(v == 0.0);

  p.grad()[1] = NAN;
  CHECK_THROWS_AS(sgd_step(ps, 0.1), DivergenceError);
}

TEST_CASE("sgd_step descends a quadratic bowl monotonically") {
  // f(p) = 0.5 * sum c_i (p_i - t_i)^2
  const std::vector<double> c{1.0, 3.0, 0.5}, target{0.25, -1.0, 2.0};
  Tensor p(1, 3, {2.0, 1.0, -1.0}, true);
  std::vector<Tensor> ps{p};
  auto f = [&] {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += 0.5 * c[i] * std::pow(p.values()[i] - target[i], 2);
    return s;
  };
  double prev = f();
  for (int step = 0; step < 400; ++step) {
    p.zero_grad();
    auto g = p.ensure_grad();
    for (int i = 0; i < 3; ++i) g[i] = c[i] * (p.values()[i] - target[i]);
    sgd_step(ps, 0.1);
    const double now = f();
    CHECK(now <= prev);
    prev = now;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("learning rate zero leaves parameters unchanged") {
  Dataset ds = sbm(1, 60);
  ModelConfig cfg = gcn_config(ds);
  TrainConfig tc;
  tc.learning_rate = 0.0;
  tc.epochs = 4;
  tc.seed = 3;
  TrainResult r = train(ds, cfg, tc);
  ModelParams fresh = init_params(cfg, 3);
  auto a = fresh.named_parameters(), b = r.final_params.named_parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::vector<double>(a[i].second.values().begin(), a[i].second.values().end()) ==
          std::vector<double>(b[i].second.values().begin(), b[i].second.values().end()));
}

TEST_CASE("training is deterministic per seed") {
  Dataset ds = sbm(2, 90);
  for (Variant v : {Variant::gcn_ha, Variant::gat_ha}) {
    ModelConfig cfg = gcn_config(ds);
    cfg.variant = v;
    cfg.use_labels = true;
    TrainConfig tc;
    tc.learning_rate = 0.1;
    tc.epochs = 8;
    tc.seed = 5;
    TrainResult a = train(ds, cfg, tc), b = train(ds, cfg, tc);
    CHECK(a.metrics == b.metrics);
    CHECK(flat(a.final_params) == flat(b.final_params));
    tc.seed = 6;
    CHECK_FALSE(train(ds, cfg, tc).metrics == a.metrics);
  }
}

TEST_CASE("loss strictly decreases over the first 5 epochs at lr 0.01") {
  for (std::uint64_t seed : {0, 1, 2}) {
    Dataset ds = sbm(seed, 300);
    ModelConfig cfg = gcn_config(ds);
    cfg.dropout = 0;
    cfg.input_drop = 0;
    cfg.attn_drop = 0;
    TrainConfig tc;
    tc.learning_rate = 0.01;
    tc.epochs = 6;
    tc.seed = seed;
    auto recs = train(ds, cfg, tc).metrics.records;
    CAPTURE(seed);
    for (std::size_t e = 1; e < 6; ++e) CHECK(recs[e].train_loss < recs[e - 1].train_loss);
  }
}

TEST_CASE("model selection reports the earliest best valid epoch") {
  Dataset ds = sbm(3, 90);
  ModelConfig cfg = gcn_config(ds);
  TrainConfig tc;
  tc.learning_rate = 0.1;
  tc.epochs = 30;
  tc.seed = 1;
  Metrics m = train(ds, cfg, tc).metrics;
  double best = -1;
  index_t epoch = 0;
  for (const auto& r : m.records) {
    CHECK(r.train_acc >= 0);
    CHECK(r.valid_acc <= 1);
    if (r.valid_acc > best) {
      best = r.valid_acc;
      epoch = r.epoch;
    }
  }
  CHECK(m.best_epoch == epoch);
  CHECK(m.best_valid_acc == best);
  CHECK(m.test_acc_at_best == m.records[epoch - 1].test_acc);

  tc.patience = 3;
  Metrics early = train(ds, cfg, tc).metrics;
  CHECK(early.records.size() <= m.records.size());
  CHECK(early.records.back().epoch - early.best_epoch <= 3);
}

TEST_CASE("evaluate on the best snapshot reproduces the reported accuracies") {
  Dataset ds = sbm(4, 90);
  ModelConfig cfg = gcn_config(ds);
  cfg.variant = Variant::gat_ha;
  TrainConfig tc;
  tc.learning_rate = 0.1;
  tc.epochs = 10;
  tc.seed = 2;
  TrainResult r = train(ds, cfg, tc);
  CHECK(evaluate(ds, r.params, cfg, ds.test_mask) == r.metrics.test_acc_at_best);
  CHECK(evaluate(ds, r.params, cfg, ds.valid_mask) == r.metrics.best_valid_acc);

  auto dir = test::temp_dir("train_ckpt");
  save_checkpoint(dir / "c.bin", cfg, r.params);
  Checkpoint ck = load_checkpoint(dir / "c.bin");
  CHECK(flat(ck.params) == flat(r.params));
  CHECK(evaluate(ds, ck.params, ck.config, ds.test_mask) == r.metrics.test_acc_at_best);
}

TEST_CASE("divergence and invalid configs are reported") {
  Dataset ds = sbm(5, 60);
  ModelConfig cfg = gcn_config(ds);
  TrainConfig tc;
  tc.learning_rate = 1e30;
  tc.epochs = 20;
  CHECK_THROWS_AS(train(ds, cfg, tc), DivergenceError);
  tc.learning_rate = 0.1;
  tc.epochs = 0;
  CHECK_THROWS_AS(train(ds, cfg, tc), std::invalid_argument);
  tc.epochs = 1;
  Dataset empty = ds;
  empty.test_mask.assign(60, false);
  CHECK_THROWS_AS(train(empty, cfg, tc), std::invalid_argument);
}

TEST_CASE("linear baseline learns the feature signal") {
  Dataset ds = sbm(6, 300);
  TrainConfig tc;
  tc.learning_rate = 0.1;
  tc.epochs = 100;
  Metrics m = train_linear_baseline(ds, tc);
  CHECK(m.records.size() == 100);
  CHECK(m.best_valid_acc > 0.4);
}
