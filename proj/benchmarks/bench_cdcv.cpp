#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cdcv/backtest.hpp"
#include "cdcv/bicop.hpp"
#include "cdcv/model.hpp"
#include "cdcv/rank.hpp"
#include "cdcv/synthetic.hpp"

using namespace cdcv;

namespace {

std::vector<double> uniforms(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(g);
  return x;
}

// Pair with Kendall tau around 0.4.
std::pair<std::vector<double>, std::vector<double>> dependent_pair(std::size_t n) {
  auto u = uniforms(n, 1);
  const auto w = uniforms(n, 2);
  std::vector<double> v(n);
  const BivariateCopula c{BicopFamily::Clayton, 1.3, 0.0};
  for (std::size_t i = 0; i < n; ++i) v[i] = h_inv(c, w[i], u[i]);
  return {u, v};
}

ReturnPanel factor_panel(std::size_t sectors, std::size_t per, std::size_t rows) {
  FactorSpec s;
  s.sectors = sectors;
  s.assets_per_sector = per;
  s.rows = rows;
  return generate_factor_panel(s).panel;
}

CdcvConfig config_b(std::size_t b) {
  CdcvConfig c;
  c.clustering.stop = StoppingRule::cluster_count(b);
  return c;
}

}  // namespace

static void BM_KendallTau(benchmark::State& state) {
  auto [u, v] = dependent_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(u, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->Arg(150)->Arg(1000)->Arg(10000)->Complexity(benchmark::oNLogN);

static void BM_FitBicop(benchmark::State& state) {
  const auto family = static_cast<BicopFamily>(state.range(0));
  auto [u, v] = dependent_pair(150);
  for (auto _ : state) benchmark::DoNotOptimize(fit_bicop(u, v, family));
  state.SetLabel(std::string(to_string(family)));
}
BENCHMARK(BM_FitBicop)
    ->Arg(static_cast<int>(BicopFamily::Gaussian))
    ->Arg(static_cast<int>(BicopFamily::StudentT))
    ->Arg(static_cast<int>(BicopFamily::Clayton))
    ->Arg(static_cast<int>(BicopFamily::Frank));

static void BM_SelectBicop(benchmark::State& state) {
  auto [u, v] = dependent_pair(150);
  for (auto _ : state) benchmark::DoNotOptimize(select_bicop(u, v));
}
BENCHMARK(BM_SelectBicop);

static void BM_H(benchmark::State& state) {
  const BivariateCopula c{static_cast<BicopFamily>(state.range(0)), 0.5, 5.0};
  const auto u = uniforms(1024, 3), v = uniforms(1024, 4);
  for (auto _ : state) {
    for (std::size_t i = 0; i < u.size(); ++i) benchmark::DoNotOptimize(h(c, u[i], v[i]));
  }
  state.SetItemsProcessed(state.iterations() * 1024);
  state.SetLabel(std::string(to_string(c.family)));
}
BENCHMARK(BM_H)
    ->Arg(static_cast<int>(BicopFamily::Gaussian))
    ->Arg(static_cast<int>(BicopFamily::StudentT))
    ->Arg(static_cast<int>(BicopFamily::Clayton))
    ->Arg(static_cast<int>(BicopFamily::Frank));

static void BM_HInv(benchmark::State& state) {
  const BivariateCopula c{static_cast<BicopFamily>(state.range(0)), 0.5, 5.0};
  const auto w = uniforms(1024, 5), v = uniforms(1024, 6);
  for (auto _ : state) {
    for (std::size_t i = 0; i < w.size(); ++i) benchmark::DoNotOptimize(h_inv(c, w[i], v[i]));
  }
  state.SetItemsProcessed(state.iterations() * 1024);
  state.SetLabel(std::string(to_string(c.family)));
}
BENCHMARK(BM_HInv)
    ->Arg(static_cast<int>(BicopFamily::Gaussian))
    ->Arg(static_cast<int>(BicopFamily::StudentT))
    ->Arg(static_cast<int>(BicopFamily::Clayton))
    ->Arg(static_cast<int>(BicopFamily::Frank));

static void BM_FitCdcv(benchmark::State& state) {
  const auto per = static_cast<std::size_t>(state.range(0));
  const auto panel = factor_panel(4, per, 150);
  for (auto _ : state) benchmark::DoNotOptimize(fit_cdcv(panel, config_b(std::min<std::size_t>(15, 4 * per))));
  state.SetLabel(std::to_string(4 * per) + " assets");
}
BENCHMARK(BM_FitCdcv)->Arg(3)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_PortfolioVar(benchmark::State& state) {
  const auto panel = factor_panel(3, 4, 150);
  const auto model = fit_cdcv(panel, config_b(3));
  const std::vector<double> w(12, 1.0 / 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(portfolio_var(model, w, 95.0, static_cast<std::size_t>(state.range(0)), 1));
  }
}
BENCHMARK(BM_PortfolioVar)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
