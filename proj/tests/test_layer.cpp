#include <doctest.h>

#include "agdn/layer.hpp"
#include "helpers.hpp"

using namespace agdn;
using agdn::test::grad_check;
using agdn::test::probe;

namespace {

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

TransitionMatrix identity_transition(index_t n) {
  GraphContext ctx = GraphContext::build(Graph::from_edges(n, {}));
  Tensor w(n, 1);
  for (auto& v : w.values()) v = 1.0;
  return {TransitionKind::gcn, ctx.pattern, w, 0};
}

}  // namespace

TEST_CASE("encode") {
  Rng rng(1);
  Tensor h = verify::random_tensor(5, 3, rng);
  Tensor eye(3, 3);
  for (index_t i = 0; i < 3; ++i) eye.at(i, i) = 1;
  Tape tape;
  CHECK(oracle::to_dense(encode(tape, h, eye)) == oracle::to_dense(h));
  CHECK(oracle::to_dense(encode(tape, h, Tensor(3, 2))).isZero(0));
  Tensor hg = verify::random_tensor(6, 3, rng, 1.0, true), w = verify::random_tensor(3, 4, rng, 1.0, true);
  CHECK(grad_check({hg, w}, [&](Tape& t) { return probe(t, encode(t, hg, w)); }) < 1e-4);
}

TEST_CASE("diffuse") {
  Rng rng(2);
  Tape tape;
  Tensor h0 = verify::random_tensor(8, 3, rng);
  TransitionMatrix eye = identity_transition(8);
  CHECK(diffuse(tape, eye, h0, 0).hops.size() == 1);
  HopStack same = diffuse(tape, eye, h0, 4);
  REQUIRE(same.hops.size() == 5);
  for (const auto& hk : same.hops) CHECK(oracle::to_dense(hk) == oracle::to_dense(h0));
  CHECK_THROWS_AS(diffuse(tape, eye, h0, -1), std::invalid_argument);

  Graph g = verify::random_graph(50, 0.08, rng);
  TransitionMatrix t = build_gcn_transition(GraphContext::build(g));
  Tensor x = verify::random_tensor(50, 4, rng);
  HopStack stack = diffuse(tape, t, x, 4);
  Eigen::MatrixXd td = t.to_dense(), power = Eigen::MatrixXd::Identity(50, 50);
  for (index_t k = 0; k <= 4; ++k) {
    if (k > 0) power = power * td;
    CHECK(max_diff(oracle::to_dense(stack.hops[k]), power * oracle::to_dense(x)) < 1e-5);
  }
}

TEST_CASE("hop_attention") {
  Rng rng(3);
  Tape tape;
  Graph g = verify::random_graph(15, 0.3, rng);
  TransitionMatrix t = build_gcn_transition(GraphContext::build(g));
  HopStack stack = diffuse(tape, t, verify::random_tensor(15, 4, rng), 3);

  HopAttention flat = hop_attention(tape, stack, Tensor(8, 1));
  for (double v : flat.weights.values()) CHECK(v == doctest::Approx(0.25));

  HopAttention single = hop_attention(tape, diffuse(tape, t, stack.hops[0], 0),
                                      verify::random_tensor(8, 1, rng));
  for (double v : single.weights.values()) CHECK(v == 1.0);

  HopStack dup = diffuse(tape, identity_transition(15), stack.hops[0], 2);
  HopAttention even = hop_attention(tape, dup, verify::random_tensor(8, 1, rng, 5.0));
  for (double v : even.weights.values()) CHECK(v == doctest::Approx(1.0 / 3));

  HopAttention att = hop_attention(tape, stack, verify::random_tensor(8, 1, rng, 4.0));
  verify::HopAudit audit;
  audit.record(att);
  CHECK(audit.max_row_error < 1e-6);
  CHECK(audit.min_entry >= 0);
  CHECK(audit.max_entry <= 1);
  CHECK_THROWS_AS(hop_attention(tape, stack, Tensor(3, 1)), ShapeError);
}

TEST_CASE("combine") {
  Rng rng(4);
  Tape tape;
  Graph g = verify::random_graph(10, 0.3, rng);
  TransitionMatrix t = build_gcn_transition(GraphContext::build(g));
  HopStack stack = diffuse(tape, t, verify::random_tensor(10, 3, rng), 1);

  Tensor hop0(10, 2);
  for (index_t i = 0; i < 10; ++i) hop0.at(i, 0) = 1;
  CHECK(oracle::to_dense(combine(tape, stack, {hop0})) == oracle::to_dense(stack.hops[0]));

  Tensor half(10, 2);
  for (auto& v : half.values()) v = 0.5;
  Eigen::MatrixXd avg = (oracle::to_dense(stack.hops[0]) + oracle::to_dense(stack.hops[1])) / 2;
  CHECK(max_diff(oracle::to_dense(combine(tape, stack, {half})), avg) < 1e-15);

  CHECK(verify::diffusion_oracle(20, 5).passed);
}

TEST_CASE("layer_forward reductions") {
  CHECK(verify::gcn_reduction(10, 6).passed);

  // W_r = 0, a_hw = 0, K = 0: mean over heads of H W_i
  Rng rng(7);
  Graph g = verify::random_graph(12, 0.3, rng);
  GraphContext ctx = GraphContext::build(g);
  Tensor h = verify::random_tensor(12, 3, rng);
  LayerParams lp;
  for (int i = 0; i < 3; ++i)
    lp.heads.push_back({verify::random_tensor(3, 4, rng), Tensor(8, 1), verify::random_tensor(8, 1, rng)});
  lp.residual = Tensor(3, 4);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(12, 4);
  for (const auto& head : lp.heads) expect += oracle::to_dense(h) * oracle::to_dense(head.weight) / 3;
  for (TransitionKind kind : {TransitionKind::gcn, TransitionKind::att_gcn}) {
    LayerConfig cfg;
    cfg.kind = kind;
    cfg.hops = 0;
    Tape tape;
    Rng r(0);
    CHECK(max_diff(oracle::to_dense(layer_forward(tape, ctx, h, lp, cfg, Mode::eval, r)), expect) <
          1e-12);
  }

  // residual is added once, after averaging
  lp.residual = verify::random_tensor(3, 4, rng);
  LayerConfig cfg;
  cfg.hops = 0;
  Tape tape;
  Rng r(0);
  Eigen::MatrixXd with_res = expect + oracle::to_dense(h) * oracle::to_dense(lp.residual);
  CHECK(max_diff(oracle::to_dense(layer_forward(tape, ctx, h, lp, cfg, Mode::eval, r)), with_res) <
        1e-12);

  LayerParams empty;
  empty.residual = Tensor(3, 4);
  CHECK_THROWS_AS(layer_forward(tape, ctx, h, empty, cfg, Mode::eval, r), std::invalid_argument);
  cfg.hops = -1;
  CHECK_THROWS_AS(layer_forward(tape, ctx, h, lp, cfg, Mode::eval, r), std::invalid_argument);
}

TEST_CASE("gcn-ha heads share one transition, attention heads build their own") {
  Rng rng(8);
  Graph g = verify::random_graph(10, 0.3, rng);
  GraphContext ctx = GraphContext::build(g);
  Tensor h = verify::random_tensor(10, 3, rng);
  LayerParams lp;
  for (int i = 0; i < 2; ++i)
    lp.heads.push_back({verify::random_tensor(3, 4, rng), verify::random_tensor(8, 1, rng),
                        verify::random_tensor(8, 1, rng)});
  lp.residual = Tensor(3, 4);
  for (TransitionKind kind : {TransitionKind::gcn, TransitionKind::att_gcn}) {
    LayerConfig cfg;
    cfg.kind = kind;
    cfg.hops = 2;
    Tape tape;
    Rng r(0);
    LayerTrace trace;
    layer_forward(tape, ctx, h, lp, cfg, Mode::eval, r, &trace);
    CHECK(trace.attention.size() == 2);
    CHECK(trace.stacks.size() == 2);
    const bool shared = trace.transitions.size() == 1 ||
                        trace.transitions[0].weights.same(trace.transitions[1].weights);
    CHECK(shared == (kind == TransitionKind::gcn));
  }
}

TEST_CASE("layer_forward: spectral degradation and equivariance") {
  for (const auto& r : verify::spectral_degradation(8, 9)) {
    CAPTURE(r.name);
    CHECK(r.passed);
  }
  CHECK(verify::permutation_equivariance(6, 10).passed);
}

TEST_CASE("layer_forward: parameter gradients on N <= 20") {
  Rng rng(11);
  Graph g = verify::random_graph(14, 0.3, rng);
  GraphContext ctx = GraphContext::build(g);
  Tensor h = verify::random_tensor(14, 3, rng);
  for (TransitionKind kind : {TransitionKind::gcn, TransitionKind::att_gcn}) {
    LayerParams lp;
    std::vector<Tensor> leaves;
    for (int i = 0; i < 2; ++i) {
      lp.heads.push_back({verify::random_tensor(3, 4, rng, 1.0, true),
                          verify::random_tensor(8, 1, rng, 1.0, true),
                          verify::random_tensor(8, 1, rng, 1.0, kind != TransitionKind::gcn)});
      leaves.push_back(lp.heads.back().weight);
      leaves.push_back(lp.heads.back().hop_attention);
      if (kind != TransitionKind::gcn) leaves.push_back(lp.heads.back().edge_attention);
    }
    lp.residual = verify::random_tensor(3, 4, rng, 1.0, true);
    leaves.push_back(lp.residual);
    LayerConfig cfg;
    cfg.kind = kind;
    cfg.hops = 3;
    // LeakyReLU kinks sit at zero logits; a smaller step keeps the check on one linear piece
    CHECK(grad_check(
              leaves,
              [&](Tape& t) {
                Rng r(0);
                return probe(t, layer_forward(t, ctx, h, lp, cfg, Mode::eval, r));
              },
              1e-5) < 1e-4);
  }
}
