// Serial reference vs OpenMP kernels on a synthetic block-model graph.

#include <benchmark/benchmark.h>

#include <random>

#include "agdn/dataset.hpp"
#include "agdn/kernels.hpp"

using namespace agdn;
namespace k = agdn::kernels;

namespace {

struct Fixture {
  Graph graph;
  k::CsrView csr;
  std::vector<double> w, h, out;
  index_t d;

  Fixture(index_t n, index_t width) : d(width) {
    SbmParams p;
    p.num_nodes = n;
    p.p_in = 20.0 / (n / 3.0);
    p.p_out = 2.0 / n;
    graph = synth_sbm(p).graph;
    csr = {n, graph.row_offsets(), graph.col_indices()};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    w.resize(graph.num_edges());
    h.resize(n * d);
    out.resize(n * d);
    for (auto& v : w) v = u(rng);
    for (auto& v : h) v = u(rng);
  }
};

template <bool Parallel>
void BM_spmm(benchmark::State& state) {
  Fixture f(state.range(0), 64);
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::spmm(f.csr, f.w, f.h, f.d, f.out);
    else
      k::serial::spmm(f.csr, f.w, f.h, f.d, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(state.iterations() * f.graph.num_edges() * f.d);
}

template <bool Parallel>
void BM_segment_softmax(benchmark::State& state) {
  Fixture f(state.range(0), 1);
  std::vector<double> y(f.w.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::segment_softmax(f.graph.row_offsets(), f.w, y);
    else
      k::serial::segment_softmax(f.graph.row_offsets(), f.w, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * f.graph.num_edges());
}

template <bool Parallel>
void BM_gemm(benchmark::State& state) {
  const index_t n = state.range(0), m = 64, inner = 64;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> a(n * inner), b(inner * m), c(n * m);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng);
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::gemm(k::Trans::no, k::Trans::no, n, m, inner, a, b, c);
    else
      k::serial::gemm(k::Trans::no, k::Trans::no, n, m, inner, a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * n * m * inner);
}

}  // namespace

BENCHMARK(BM_spmm<false>)->Name("spmm/serial")->Arg(3000)->Arg(30000);
BENCHMARK(BM_spmm<true>)->Name("spmm/parallel")->Arg(3000)->Arg(30000);
BENCHMARK(BM_segment_softmax<false>)->Name("segment_softmax/serial")->Arg(30000);
BENCHMARK(BM_segment_softmax<true>)->Name("segment_softmax/parallel")->Arg(30000);
BENCHMARK(BM_gemm<false>)->Name("gemm/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_gemm<true>)->Name("gemm/parallel")->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
