#include <benchmark/benchmark.h>

#include <vector>

#include "lc/losses.hpp"
#include "lc/matmul.hpp"
#include "lc/numerics.hpp"
#include "lc/rng.hpp"

namespace {

void BM_MatmulNN(benchmark::State& state) {
  const std::size_t n = state.range(0), k = state.range(1),
                    m = state.range(2);
  lc::Rng rng(1);
  std::vector<float> a(n * k), b(k * m), c(n * m);
  for (auto& v : a) v = float(rng.normal());
  for (auto& v : b) v = float(rng.normal());
  for (auto _ : state) {
    lc::detail::matmul_nn(a.data(), b.data(), c.data(), n, k, m);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * n * k * m);
}
BENCHMARK(BM_MatmulNN)->Args({256, 2352, 100})->Args({256, 100, 100});

void BM_MatmulNT(benchmark::State& state) {
  const std::size_t n = state.range(0), k = state.range(1),
                    m = state.range(2);
  lc::Rng rng(2);
  std::vector<float> a(n * k), b(m * k), c(n * m);
  for (auto& v : a) v = float(rng.normal());
  for (auto& v : b) v = float(rng.normal());
  for (auto _ : state) {
    lc::detail::matmul_nt(a.data(), b.data(), c.data(), n, k, m);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * n * k * m);
}
BENCHMARK(BM_MatmulNT)->Args({256, 100, 2352});

void BM_LcLossBatch(benchmark::State& state) {
  const std::size_t n = 256, L = 10;
  lc::Rng rng(3);
  std::vector<double> logits(n * L), grad(L), scratch(L);
  for (auto& v : logits) v = rng.normal();
  std::vector<lc::CorrectionRow> rows(n);
  for (auto& r : rows) {
    std::vector<double> p(L);
    double s = 0;
    for (auto& v : p) s += (v = rng.uniform() + 0.01);
    for (auto& v : p) v /= s;
    r = lc::CorrectionRow::from_probs(p);
  }
  for (auto _ : state) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const double> row(logits.data() + i * L, L);
      total += lc::lc_loss(row, i % L, rows[i], std::span<double>(grad),
                           std::span<double>(scratch));
    }
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LcLossBatch);

void BM_SoftmaxLse(benchmark::State& state) {
  lc::Rng rng(4);
  std::vector<double> v(state.range(0)), out(state.range(0));
  for (auto& x : v) x = rng.normal() * 3.0;
  for (auto _ : state) {
    lc::softmax(std::span<const double>(v), std::span<double>(out));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_SoftmaxLse)->Arg(10)->Arg(100);

} // namespace

BENCHMARK_MAIN();
