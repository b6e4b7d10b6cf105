#include "doctest.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "cdcv/backtest.hpp"
#include "cdcv/error.hpp"
#include "cdcv/synthetic.hpp"

using namespace cdcv;

namespace {

// Direct evaluation of the proportion-of-failures likelihood ratio.
double oracle_lr(double x, double n, double q) {
  auto xlogy = [](double a, double b) { return a == 0.0 ? 0.0 : a * std::log(b); };
  const double p = x / n;
  return -2.0 * (xlogy(n - x, 1 - q) + xlogy(x, q) - xlogy(n - x, 1 - p) - xlogy(x, p));
}

CdcvConfig config_b(std::size_t b) {
  CdcvConfig c;
  c.clustering.stop = StoppingRule::cluster_count(b);
  return c;
}

// All copulas Independence and every asset Normal(mu, sigma).
CdcvModel degenerate_model(std::size_t m, double mu, double sigma) {
  FactorSpec s;
  s.sectors = 1;
  s.assets_per_sector = m;
  s.rows = 150;
  auto model = fit_cdcv(generate_factor_panel(s).panel, config_b(1));
  for (auto& c : model.clusters) {
    c.lambda = {};
    for (auto& a : c.assets) a.pi = a.omega = {};
  }
  model.joint.family = JointFamily::Gaussian;
  model.joint.corr = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  model.joint.nu = 0.0;
  for (auto& f : model.asset_marginals) f = make_marginal(MarginalFamily::Normal, mu, sigma);
  return model;
}

double stddev(const std::vector<double>& x) {
  double mean = 0.0, ss = 0.0;
  for (double v : x) mean += v / static_cast<double>(x.size());
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

TEST_SUITE("backtest") {
  TEST_CASE("Kupiec statistic reference values") {
    struct Row {
      std::size_t x, n;
      double q, lr, p;
    };
    for (const Row& r : {Row{50, 850, 0.05, 1.322, 0.250}, Row{52, 850, 0.05, 2.093, 0.147},
                         Row{15, 850, 0.01, 4.090, 0.043}, Row{16, 850, 0.01, 5.308, 0.021},
                         Row{51, 750, 0.05, 4.621, 0.032}}) {
      auto k = kupiec_pof(r.x, r.n, r.q);
      CHECK(std::abs(k.lr - r.lr) <= 0.005);
      CHECK(std::abs(k.p_value - r.p) <= 0.002);
    }
    CHECK(std::abs(kupiec_pof(50, 850, 0.05).lr - 1.322) <= 0.001);
    CHECK(std::abs(kupiec_pof(50, 850, 0.05).p_value - 0.250) <= 0.001);
    CHECK(std::abs(kupiec_pof(70, 850, 0.05).lr - 15.806) <= 0.001);
  }

  TEST_CASE("Kupiec statistic against direct evaluation") {
    boost::math::chi_squared chi(1.0);
    for (std::size_t n : {20u, 200u, 850u}) {
      for (double q : {0.01, 0.05, 0.2}) {
        for (std::size_t x = 0; x <= n; x += std::max<std::size_t>(1, n / 40)) {
          auto k = kupiec_pof(x, n, q);
          const double lr = oracle_lr(static_cast<double>(x), static_cast<double>(n), q);
          CHECK(k.lr == doctest::Approx(lr).epsilon(1e-9).scale(1.0));
          // the tail has a square-root cusp at 0, so round-off in lr of 1e-15 moves p by ~1e-8
          CHECK(std::abs(k.p_value - boost::math::cdf(boost::math::complement(chi, std::max(lr, 0.0)))) < 1e-7);
        }
      }
    }
  }

  TEST_CASE("LR is zero at the nominal rate and grows away from it") {
    auto k = kupiec_pof(10, 200, 0.05);
    CHECK(k.lr == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(k.p_value == doctest::Approx(1.0));
    const std::size_t n = 1000;
    const std::size_t mid = 50;
    for (std::size_t x = mid; x < n; ++x) CHECK(kupiec_pof(x + 1, n, 0.05).lr > kupiec_pof(x, n, 0.05).lr);
    for (std::size_t x = mid; x > 0; --x) CHECK(kupiec_pof(x - 1, n, 0.05).lr > kupiec_pof(x, n, 0.05).lr);
    CHECK(kupiec_pof(0, n, 0.05).lr >= 0.0);
    CHECK(kupiec_pof(n, n, 0.05).lr >= 0.0);
  }

  TEST_CASE("Kupiec domain errors") {
    CHECK_THROWS_AS(kupiec_pof(5, 4, 0.05), InputError);
    CHECK_THROWS_AS(kupiec_pof(1, 10, 0.0), InputError);
    CHECK_THROWS_AS(kupiec_pof(1, 10, 1.0), InputError);
    CHECK_THROWS_AS(kupiec_pof(0, 0, 0.05), InputError);
  }

  TEST_CASE("report flags follow the p-value") {
    for (std::size_t hits = 0; hits <= 40; ++hits) {
      std::vector<double> var(200, 1.0), realized(200, 0.0);
      for (std::size_t i = 0; i < hits; ++i) realized[i] = -2.0;
      auto r = make_report(BacktestMode::OutOfSample, 95.0, var, realized);
      CHECK(r.hits == hits);
      CHECK(r.trials == 200);
      CHECK(r.hit_rate == doctest::Approx(hits / 200.0));
      CHECK(r.lr >= 0.0);
      CHECK(r.p_value >= 0.0);
      CHECK(r.p_value <= 1.0);
      CHECK(r.reject_95 == (r.p_value < 0.05));
      CHECK(r.reject_99 == (r.p_value < 0.01));
    }
    // A loss equal to the threshold is not a hit.
    std::vector<double> var{0.5, 0.5}, realized{-0.5, -0.6};
    CHECK(make_report(BacktestMode::WithinSample, 95.0, var, realized).hits == 1);
  }

  TEST_CASE("degenerate model VaR matches the Gaussian closed form") {
    const std::size_t m = 4;
    const double mu = 0.001, sigma = 0.02;
    auto model = degenerate_model(m, mu, sigma);
    std::vector<double> w(m, 1.0 / m);
    const double sp = sigma / std::sqrt(static_cast<double>(m));
    // Standard error of the 5% sample quantile at 1e4 draws is about 0.021 sp.
    const double var95 = portfolio_var(model, w, 95.0, 10000, 1);
    CHECK(std::abs(var95 - (1.6448536269514722 * sp - mu)) < 4 * 0.0211 * sp);
    const double var50 = portfolio_var(model, w, 50.0, 10000, 2);
    CHECK(std::abs(var50 + mu) < 4 * 0.0125 * sp);
    CHECK(portfolio_var(model, w, 95.0, 10000, 1) == var95);
  }

  TEST_CASE("VaR estimate converges at the Monte Carlo rate") {
    auto model = degenerate_model(4, 0.0, 0.01);
    std::vector<double> w(4, 0.25);
    std::vector<double> small, large;
    for (std::uint64_t s = 0; s < 100; ++s) {
      small.push_back(portfolio_var(model, w, 95.0, 1000, 100 + s));
      large.push_back(portfolio_var(model, w, 95.0, 2000, 100 + s));
    }
    const double ratio = stddev(large) / stddev(small);
    CHECK(ratio > std::sqrt(0.5) * 0.7);
    CHECK(ratio < std::sqrt(0.5) * 1.3);
  }

  TEST_CASE("portfolio_var validation") {
    auto model = degenerate_model(3, 0.0, 0.01);
    CHECK_THROWS_AS(portfolio_var(model, std::vector<double>{0.5, 0.5, 0.5}, 95.0, 1000, 1), InputError);
    CHECK_THROWS_AS(portfolio_var(model, std::vector<double>{0.5, 0.5}, 95.0, 1000, 1), InputError);
    CHECK_THROWS_AS(portfolio_var(model, std::vector<double>{0.5, 0.25, 0.25}, 95.0, 10, 1), InputError);
  }

  TEST_CASE("window longer than the panel is rejected") {
    FactorSpec s;
    s.rows = 100;
    auto p = generate_factor_panel(s).panel;
    BacktestConfig cfg;
    cfg.window = 150;
    CHECK_THROWS_AS(rolling_backtest(p, cfg), InputError);
  }

  TEST_CASE("steps, determinism and report layout") {
    FactorSpec s;
    s.sectors = 2;
    s.assets_per_sector = 2;
    s.rows = 160;
    auto p = generate_factor_panel(s).panel;
    BacktestConfig cfg;
    cfg.model = config_b(2);
    cfg.n_sims = 1000;
    cfg.modes = {BacktestMode::WithinSample, BacktestMode::OutOfSample};
    auto a = rolling_backtest(p, cfg);
    auto b = rolling_backtest(p, cfg);
    REQUIRE(a.steps.size() == 10);
    CHECK(a.steps.front().t == 150);
    CHECK(a.reports.size() == 4);
    CHECK(a.reports[0].mode == BacktestMode::WithinSample);
    CHECK(a.reports[2].mode == BacktestMode::OutOfSample);
    CHECK(a.reports[1].alpha == 99.0);
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].var == b.steps[i].var);
      CHECK(a.steps[i].var[1] > a.steps[i].var[0]);
    }
    for (const auto& r : a.reports) CHECK(r.trials == 10);
    CHECK(format_report_table(a.reports).find("OutOfSample") != std::string::npos);
  }

  TEST_CASE("self-consistent hit rate on data simulated from the model") {
    FactorSpec s;
    s.sectors = 2;
    s.assets_per_sector = 3;
    s.rows = 150;
    s.seed = 3;
    auto src = generate_factor_panel(s).panel;
    auto model = fit_cdcv(src, config_b(2));
    ReturnPanel p;
    p.assets = src.assets;
    p.returns = simulate_cdcv(model, 950, 77);
    for (int t = 0; t < 950; ++t) p.dates.push_back(parse_date("2001-01-01") + std::chrono::days(t));
    BacktestConfig cfg;
    cfg.model = config_b(2);
    cfg.n_sims = 2000;
    cfg.modes = {BacktestMode::WithinSample, BacktestMode::OutOfSample};
    cfg.alphas = {95.0};
    auto r = rolling_backtest(p, cfg);
    REQUIRE(r.reports.size() == 2);
    const auto& within = r.reports[0];
    const auto& out = r.reports[1];
    CHECK(out.trials >= 800);
    CHECK(out.hit_rate >= 0.035);
    CHECK(out.hit_rate <= 0.065);
    CHECK(within.p_value > 0.01);
  }
}
