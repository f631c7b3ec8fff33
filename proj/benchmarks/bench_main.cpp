#include <benchmark/benchmark.h>

#include "embedclust/cluster.hpp"
#include "embedclust/linalg.hpp"
#include "embedclust/loss.hpp"
#include "embedclust/metrics.hpp"
#include "embedclust/network.hpp"
#include "embedclust/rng.hpp"
#include "embedclust/trainer.hpp"

using namespace embedclust;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data) {
    v = rng.uniform(-1.0, 1.0);
  }
  return m;
}

Network make_net(std::size_t d, std::size_t hidden, std::size_t k) {
  Rng rng(7);
  return init({{d, hidden, Activation::linear, 1e-4},
               {hidden, k, Activation::relu, 0.0}},
              rng);
}

void BM_Matmul(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul(a, b));
  }
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128);

void BM_SymEig(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      s(i, j) = rng.uniform(-1.0, 1.0);
      s(j, i) = s(i, j);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_eig(s));
  }
}
BENCHMARK(BM_SymEig)->Arg(16)->Arg(64);

void BM_ForwardBackward(benchmark::State& state) {
  const Network net = make_net(32, 64, 16);
  Rng rng(11);
  std::vector<double> x(32);
  for (double& v : x) {
    v = rng.uniform(-1.0, 1.0);
  }
  std::vector<double> cot(16, 1.0);
  for (auto _ : state) {
    const ForwardTrace trace = forward(net, x);
    benchmark::DoNotOptimize(backward(net, trace, cot));
  }
}
BENCHMARK(BM_ForwardBackward);

void BM_ContrastivePair(benchmark::State& state) {
  Rng rng(13);
  std::vector<double> z1(16);
  std::vector<double> z2(16);
  for (std::size_t i = 0; i < 16; ++i) {
    z1[i] = rng.uniform(-1.0, 1.0);
    z2[i] = rng.uniform(-1.0, 1.0);
  }
  const ContrastiveConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(contrastive_loss(cfg, 0, z1, z2));
  }
}
BENCHMARK(BM_ContrastivePair);

void BM_KmeansRestart(benchmark::State& state) {
  const Matrix points = random_matrix(600, 16, 17);
  for (auto _ : state) {
    Rng rng(23);
    benchmark::DoNotOptimize(kmeans(points, 3, 1, 100, 1e-6, rng));
  }
}
BENCHMARK(BM_KmeansRestart);

void BM_Nmi(benchmark::State& state) {
  Rng rng(29);
  std::vector<int> a(2000);
  std::vector<int> b(2000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<int>(rng.uniform_index(8));
    b[i] = static_cast<int>(rng.uniform_index(8));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(nmi(a, b));
  }
}
BENCHMARK(BM_Nmi);

}  // namespace

BENCHMARK_MAIN();
