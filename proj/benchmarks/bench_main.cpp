#include <benchmark/benchmark.h>

#include <vector>

#include "mkvnet/mlp.hpp"
#include "mkvnet/network.hpp"
#include "mkvnet/noise_tree.hpp"
#include "mkvnet/problem.hpp"
#include "mkvnet/synthesis.hpp"

using namespace mkvnet;

namespace {

void BM_SynthesizeMlp(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const TestProblem p = relu_problem(d, 1, 1.0);
  const NoiseTree tree(1, 1.0, d, n, n);
  for (auto _ : state) {
    auto rep = synthesize_mlp_network(p, tree, ThetaIndex{1}, n, n, 1.0);
    benchmark::DoNotOptimize(rep.param_count);
  }
}
BENCHMARK(BM_SynthesizeMlp)->Args({2, 2})->Args({3, 2})->Args({3, 5})->Unit(benchmark::kMillisecond);

void BM_Realize(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const std::size_t d = 5;
  const TestProblem p = relu_problem(d, 1, 1.0);
  const NoiseTree tree(1, 1.0, d, n, n);
  const auto rep = synthesize_mc_network(p, tree, 4, n, n);
  const std::vector<double> x(d, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(realize(rep.network, x));
  state.counters["nnz"] = static_cast<double>(rep.network.nnz());
}
BENCHMARK(BM_Realize)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_MlpEstimate(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const std::size_t d = 5;
  const TestProblem p = relu_problem(d, 1, 1.0);
  const NoiseTree tree(1, 1.0, d, n, n);
  const std::vector<double> x(d, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_estimate(p, tree, ThetaIndex{1}, n, n, 1.0, x));
}
BENCHMARK(BM_MlpEstimate)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
