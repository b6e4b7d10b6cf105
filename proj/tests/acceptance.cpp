// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdcv/analysis.hpp"
#include "cdcv/backtest.hpp"
#include "cdcv/clustering.hpp"
#include "cdcv/cvine.hpp"
#include "cdcv/model.hpp"
#include "cdcv/rng.hpp"
#include "cdcv/synthetic.hpp"
#include "commands.hpp"
#include "support.hpp"

using namespace cdcv;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kKupiecLrTol = 0.005;
constexpr double kKupiecPTol = 0.002;
constexpr double kKupiecSeconds = 1e-3;
constexpr double kHTol = 1e-5;
constexpr double kHInvTol = 1e-8;
constexpr double kHSeconds = 1.0;
constexpr double kBivariateMassTol = 1e-3;
constexpr double kVineMassTol = 0.01;
constexpr double kDensitySeconds = 30.0;
constexpr double kClosureTol = 0.05;
constexpr double kClosureStability = 0.8;
constexpr double kClosureSeconds = 120.0;
constexpr double kClusteringSeconds = 10.0;
constexpr int kEfficacySeeds = 8;  // of 10
constexpr double kEfficacySeconds = 60.0;
constexpr int kSweepSeeds = 7;  // of 10
constexpr double kSweepSeconds = 300.0;
constexpr double kFitSeconds = 10.0;
constexpr double kBacktestSeconds = 3600.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<BivariateCopula> copula_cases() {
  return {{BicopFamily::Gaussian, -0.5, 0.0}, {BicopFamily::Gaussian, 0.3, 0.0},   {BicopFamily::Gaussian, 0.8, 0.0},
          {BicopFamily::StudentT, 0.3, 4.0},  {BicopFamily::StudentT, 0.6, 8.0},   {BicopFamily::StudentT, -0.4, 5.0},
          {BicopFamily::Clayton, 0.5, 0.0},   {BicopFamily::Clayton, 2.0, 0.0},    {BicopFamily::Clayton, 5.0, 0.0},
          {BicopFamily::Frank, -3.0, 0.0},    {BicopFamily::Frank, 1.0, 0.0},      {BicopFamily::Frank, 8.0, 0.0}};
}

double oracle_C(const BivariateCopula& c, double u, double v) {
  switch (c.family) {
    case BicopFamily::Gaussian: return oracle::gaussian_C(u, v, c.param);
    case BicopFamily::StudentT: return oracle::t_C(u, v, c.param, c.nu);
    case BicopFamily::Clayton: return oracle::clayton_C(u, v, c.param);
    case BicopFamily::Frank: return oracle::frank_C(u, v, c.param);
    case BicopFamily::Independence: return u * v;
  }
  return 0.0;
}

Outcome kupiec() {
  struct Row {
    std::size_t x, n;
    double q, lr, p;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<Row> rows{{50, 850, 0.05, 1.322, 0.250}, {52, 850, 0.05, 2.093, 0.147},
                              {15, 850, 0.01, 4.090, 0.043}, {16, 850, 0.01, 5.308, 0.021},
                              {70, 850, 0.05, 15.806, nan},  {51, 750, 0.05, 4.621, 0.032}};
  double worst_lr = 0.0, worst_p = 0.0, slowest = 0.0;
  for (const auto& r : rows) {
    constexpr int reps = 1000;
    KupiecResult k;
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) k = kupiec_pof(r.x, r.n, r.q);
    slowest = std::max(slowest, seconds_since(t0) / reps);
    worst_lr = std::max(worst_lr, std::abs(k.lr - r.lr));
    if (!std::isnan(r.p)) worst_p = std::max(worst_p, std::abs(k.p_value - r.p));
  }
  return {worst_lr <= kKupiecLrTol && worst_p <= kKupiecPTol && slowest < kKupiecSeconds,
          "max |dLR| " + fmt("%.2e", worst_lr) + ", max |dp| " + fmt("%.2e", worst_p) + ", " +
              fmt("%.2e", slowest) + " s per call"};
}

Outcome h_integrity() {
  const auto t0 = Clock::now();
  double worst_fd = 0.0, worst_inv = 0.0;
  const double e = 1e-5;
  for (const auto& c : copula_cases()) {
    for (int i = 1; i <= 9; ++i) {
      for (int j = 1; j <= 9; ++j) {
        const double u = 0.1 * i, v = 0.1 * j;
        const double fd = (oracle_C(c, u, v + e) - oracle_C(c, u, v - e)) / (2 * e);
        const double w = h(c, u, v);
        worst_fd = std::max(worst_fd, std::abs(w - fd));
        worst_inv = std::max(worst_inv, std::abs(h_inv(c, w, v) - u));
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst_fd <= kHTol && worst_inv <= kHInvTol && t < kHSeconds,
          "max |h - dC/dv| " + fmt("%.2e", worst_fd) + ", max round trip " + fmt("%.2e", worst_inv) + ", " +
              fmt("%.2f", t) + " s"};
}

// Mass of a bivariate density in normal-score coordinates, where the
// integrand is smooth and decays like a Gaussian.
double bivariate_mass(const BivariateCopula& c) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto inner = [&](double x) {
    const double u = oracle::phi(x);
    auto f = [&](double y) {
      const double v = oracle::phi(y);
      if (u <= 0.0 || u >= 1.0 || v <= 0.0 || v >= 1.0) return 0.0;
      return copula_density(c, u, v) * std::exp(-0.5 * (x * x + y * y)) / (2 * M_PI);
    };
    return GK::integrate(f, -8.5, 8.5, 8, 1e-9);
  };
  return GK::integrate(inner, -8.5, 8.5, 8, 1e-9);
}

BivariateCopulaFit pair_fit(BicopFamily f, double p, double nu = 0.0) {
  BivariateCopulaFit q;
  q.copula = {f, p, nu};
  return q;
}

CVineModel vine3() {
  CVineModel m;
  m.ordering = {0, 1, 2};
  m.pairs = {{pair_fit(BicopFamily::Gaussian, 0.6), pair_fit(BicopFamily::Clayton, 1.5)},
             {pair_fit(BicopFamily::Frank, 4.0)}};
  return m;
}

CVineModel vine4() {
  CVineModel m;
  m.ordering = {2, 0, 3, 1};
  m.pairs = {{pair_fit(BicopFamily::Gaussian, 0.5), pair_fit(BicopFamily::StudentT, 0.4, 6.0),
              pair_fit(BicopFamily::Frank, 3.0)},
             {pair_fit(BicopFamily::Clayton, 1.0), pair_fit(BicopFamily::Gaussian, -0.3)},
             {pair_fit(BicopFamily::Frank, -2.0)}};
  return m;
}

Outcome density_normalization() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& c : copula_cases()) worst = std::max(worst, std::abs(bivariate_mass(c) - 1.0));
  const auto vine = vine3();
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 1000000;
  double s = 0.0;
  std::vector<double> p(3);
  for (int i = 0; i < n; ++i) {
    for (auto& x : p) x = unif(g);
    s += cvine_density(vine, p);
  }
  const double vine_err = std::abs(s / n - 1.0);
  const double t = seconds_since(t0);
  return {worst <= kBivariateMassTol && vine_err <= kVineMassTol && t < kDensitySeconds,
          "max bivariate |mass - 1| " + fmt("%.2e", worst) + ", C-vine |mass - 1| " + fmt("%.2e", vine_err) + ", " +
              fmt("%.1f", t) + " s"};
}

double tau(const BivariateCopula& c) {
  switch (c.family) {
    case BicopFamily::Gaussian:
    case BicopFamily::StudentT: return oracle::gaussian_tau(c.param);
    case BicopFamily::Clayton: return oracle::clayton_tau(c.param);
    case BicopFamily::Frank: return oracle::frank_tau(c.param);
    case BicopFamily::Independence: return 0.0;
  }
  return 0.0;
}

// Tallies for one set of pair copulas compared across refits.
struct PairTally {
  std::vector<int> same_family;
  double worst = 0.0;  // max primary-parameter difference over matching families
  double worst_tau = 0.0;  // the same on the Kendall tau scale, reported only
  std::string worst_where;

  void compare(std::size_t idx, const std::string& name, const BivariateCopula& truth, const BivariateCopula& refit) {
    if (same_family.size() <= idx) same_family.resize(idx + 1, 0);
    if (truth.family != refit.family) return;
    ++same_family[idx];
    const double d = std::abs(truth.param - refit.param);
    worst_tau = std::max(worst_tau, std::abs(tau(truth) - tau(refit)));
    if (d > worst) {
      worst = d;
      worst_where = name + " " + std::string(to_string(truth.family));
    }
  }
  double stable_fraction(int seeds) const {
    int ok = 0;
    for (int k : same_family) ok += k >= kClosureStability * seeds;
    return same_family.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(same_family.size());
  }
};

CdcvConfig config_b(std::size_t b, std::uint64_t seed = 1) {
  CdcvConfig c;
  c.clustering.stop = StoppingRule::cluster_count(b);
  c.seed = seed;
  return c;
}

ReturnPanel as_panel(const Eigen::MatrixXd& x, const std::vector<std::string>& assets) {
  ReturnPanel p;
  p.assets = assets;
  p.returns = x;
  for (Eigen::Index t = 0; t < x.rows(); ++t) p.dates.push_back(parse_date("1990-01-01") + std::chrono::days(t));
  return p;
}

Outcome closure() {
  const auto t0 = Clock::now();
  constexpr int seeds = 5;
  constexpr std::size_t T = 10000;

  PairTally vine_tally;
  const auto truth = vine4();
  for (int s = 0; s < seeds; ++s) {
    const auto refit = fit_cvine(simulate_cvine(truth, T, 100 + s), truth.ordering);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < truth.pairs.size(); ++j) {
      for (std::size_t k = 0; k < truth.pairs[j].size(); ++k, ++idx) {
        vine_tally.compare(idx, "vine tree " + std::to_string(j + 1) + " pair " + std::to_string(k),
                           truth.pairs[j][k].copula, refit.pairs[j][k].copula);
      }
    }
  }

  FactorSpec spec;
  spec.rows = T;
  spec.seed = 1;
  const auto gen = generate_factor_panel(spec);
  const auto model = fit_cdcv(gen.panel, config_b(3));
  PairTally cdcv_tally;
  int partitions_recovered = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto refit = fit_cdcv(as_panel(simulate_cdcv(model, T, 200 + s), gen.panel.assets), config_b(3));
    if (refit.partition.clusters != model.partition.clusters) continue;
    ++partitions_recovered;
    std::size_t idx = 0;
    for (std::size_t e = 0; e < model.clusters.size(); ++e) {
      const auto& a = model.clusters[e];
      const auto& b = refit.clusters[e];
      cdcv_tally.compare(idx++, "Lambda " + std::to_string(e), a.lambda.copula, b.lambda.copula);
      for (std::size_t z = 0; z < a.assets.size(); ++z) {
        const auto& id = model.assets[a.assets[z].column];
        cdcv_tally.compare(idx++, "Pi " + id, a.assets[z].pi.copula, b.assets[z].pi.copula);
        cdcv_tally.compare(idx++, "Omega " + id, a.assets[z].omega.copula, b.assets[z].omega.copula);
      }
    }
  }
  const double t = seconds_since(t0);
  const double vine_stable = vine_tally.stable_fraction(seeds);
  const double cdcv_stable = cdcv_tally.stable_fraction(seeds);
  const bool pass = vine_stable == 1.0 && vine_tally.worst <= kClosureTol && partitions_recovered == seeds &&
                    cdcv_stable == 1.0 && cdcv_tally.worst <= kClosureTol && t < kClosureSeconds;
  return {pass, "C-vine: stable pairs " + fmt("%.0f%%", 100 * vine_stable) + ", max |dparam| " +
                    fmt("%.3f", vine_tally.worst) + " (" + vine_tally.worst_where + "), tau scale " +
                    fmt("%.3f", vine_tally.worst_tau) + "; CDCV: partitions " +
                    std::to_string(partitions_recovered) + "/5, stable pairs " + fmt("%.0f%%", 100 * cdcv_stable) +
                    ", max |dparam| " + fmt("%.3f", cdcv_tally.worst) + " (" + cdcv_tally.worst_where + "), tau scale " +
                    fmt("%.3f", cdcv_tally.worst_tau) + "; " +
                    fmt("%.1f", t) + " s"};
}

// Single linkage recomputed from scratch at every step.
std::vector<Merge> single_linkage_oracle(const Eigen::MatrixXd& d) {
  const std::size_t n = static_cast<std::size_t>(d.rows());
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, {i}});
  std::vector<Merge> trace;
  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        double l = std::numeric_limits<double>::infinity();
        for (auto a : active[i].second) {
          for (auto b : active[j].second) l = std::min(l, d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        }
        auto key = std::minmax(active[i].first, active[j].first);
        auto bkey = std::minmax(active[bi].first, active[bj].first);
        if (l < best || (l == best && key < bkey)) {
          best = l;
          bi = i;
          bj = j;
        }
      }
    }
    auto [x, y] = std::minmax(active[bi].first, active[bj].first);
    trace.push_back({x, y, best});
    auto members = active[bi].second;
    members.insert(members.end(), active[bj].second.begin(), active[bj].second.end());
    active.erase(active.begin() + static_cast<long>(bj));
    active.erase(active.begin() + static_cast<long>(bi));
    active.push_back({n + trace.size() - 1, members});
  }
  return trace;
}

Eigen::MatrixXd random_distances(std::size_t n, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) d(i, j) = d(j, i) = u(g);
  }
  return d;
}

Outcome clustering_oracle() {
  const auto t0 = Clock::now();
  int identical = 0, violations = 0, configs = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937_64 g(seed);
    const std::size_t n = 3 + seed % 5;
    DistanceMatrix dm{DistanceMetric::Euclidean, random_distances(n, g)};
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("A" + std::to_string(i));

    ClusteringConfig single;
    single.linkage = Linkage::Single;
    single.stop = StoppingRule::cluster_count(1);
    const auto expected = single_linkage_oracle(dm.d);
    const auto got = agglomerate(dm, names, single).trace;
    bool same = got.size() == expected.size();
    for (std::size_t q = 0; same && q < got.size(); ++q) {
      same = got[q].x == expected[q].x && got[q].y == expected[q].y &&
             std::abs(got[q].distance - expected[q].distance) <= 1e-12;
    }
    identical += same;

    for (std::size_t a = 2; a <= n; ++a) {
      for (std::size_t b = 1; b <= n; ++b) {
        ClusteringConfig adapted;
        adapted.linkage = Linkage::AdaptedSingle;
        adapted.max_size = a;
        adapted.stop = StoppingRule::cluster_count(b);
        const auto p = agglomerate(dm, names, adapted);
        ++configs;
        std::map<std::size_t, std::size_t> size;
        for (std::size_t i = 0; i < n; ++i) size[i] = 1;
        for (std::size_t q = 0; q < p.trace.size(); ++q) {
          const auto& m = p.trace[q];
          const std::size_t sx = size[m.x], sy = size[m.y];
          if ((sx > 1 && sy > 1) || sx + sy > a) ++violations;
          size[n + q] = sx + sy;
          size.erase(m.x);
          size.erase(m.y);
        }
        for (const auto& c : p.clusters) violations += c.size() > a;
      }
    }
  }
  const double t = seconds_since(t0);
  return {identical == 20 && violations == 0 && t < kClusteringSeconds,
          std::to_string(identical) + "/20 Single traces identical, " + std::to_string(violations) +
              " AdaptedSingle violations over " + std::to_string(configs) + " configurations, " + fmt("%.2f", t) +
              " s"};
}

Outcome conditioning_efficacy() {
  const auto t0 = Clock::now();
  int efficacious = 0, monotone = 0, both = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    FactorSpec spec;
    spec.rows = 150;
    spec.seed = s;
    const auto gen = generate_factor_panel(spec);
    const auto m = fit_cdcv(gen.panel, config_b(3, s));
    const auto d = conditioning_diagnostics(m, gen.panel.returns);
    const bool eff = d[2].abs_summary.mean < 0.5 * d[0].abs_summary.mean;
    const bool mono = d[0].summary.std > d[1].summary.std && d[1].summary.std > d[2].summary.std;
    efficacious += eff;
    monotone += mono;
    both += eff && mono;
  }
  const double t = seconds_since(t0);
  return {both >= kEfficacySeeds && t < kEfficacySeconds,
          "seeds meeting both clauses " + std::to_string(both) + "/10 (|rho| halved " + std::to_string(efficacious) +
              "/10, std monotone " + std::to_string(monotone) + "/10), " + fmt("%.1f", t) + " s"};
}

Outcome sweep_sanity() {
  const auto t0 = Clock::now();
  int at_truth = 0;
  std::string argmins;
  std::vector<double> values;
  for (double b = 3; b <= 12; ++b) values.push_back(b);
  int pathology = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    FactorSpec spec;
    spec.rows = 300;
    spec.seed = s;
    const auto panel = generate_factor_panel(spec).panel;
    const auto starts = window_starts(panel.rows(), 150, 3);
    const auto rows = sweep(panel, config_b(3, s), SweepAxis::Clusters, values, 150, starts);
    const auto best = std::min_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
      return a.fully_conditioned.std < b.fully_conditioned.std;
    });
    at_truth += best->value == 3.0;
    argmins += (argmins.empty() ? "" : ",") + std::to_string(static_cast<int>(best->value));

    // Singleton-heavy partition with and without index noise.
    const auto noisy = sweep(panel, config_b(10, s), SweepAxis::Upsilon, {0.0, 11.0}, 150, starts);
    pathology += noisy[0].fully_conditioned.q1 < noisy[1].fully_conditioned.q1;
  }
  const double t = seconds_since(t0);
  return {at_truth >= kSweepSeeds && pathology == 10 && t < kSweepSeconds,
          "std minimised at b=3 in " + std::to_string(at_truth) + "/10 seeds (argmin b: " + argmins +
              "), q1 lower without noise in " + std::to_string(pathology) + "/10, " + fmt("%.1f", t) + " s"};
}

ReturnPanel paper_scale_panel(std::size_t rows) {
  FactorSpec spec;
  spec.sectors = 8;
  spec.assets_per_sector = 8;
  spec.rows = rows;
  spec.seed = 62;
  auto p = generate_factor_panel(spec).panel;
  p.returns = p.returns.leftCols(62).eval();
  p.assets.resize(62);
  return p;
}

Outcome performance() {
  const auto panel = paper_scale_panel(1000);
  auto t0 = Clock::now();
  const auto m = fit_cdcv(panel.window({0, 150}), cli::RunConfig::default_model());
  const double fit_s = seconds_since(t0);

  BacktestConfig bc;
  bc.window = 150;
  bc.model = cli::RunConfig::default_model();
  bc.n_sims = 10000;
  bc.alphas = {95.0, 99.0};
  t0 = Clock::now();
  const auto r = rolling_backtest(panel, bc);
  const double bt_s = seconds_since(t0);
  const std::size_t steps = r.steps.size() + r.failures.size();
  return {fit_s < kFitSeconds && steps == 850 && bt_s < kBacktestSeconds,
          "62-asset fit (" + std::to_string(m.clusters.size()) + " clusters) " + fmt("%.2f", fit_s) + " s; " +
              std::to_string(steps) + "-step backtest " + fmt("%.0f", bt_s) + " s (" +
              std::to_string(r.failures.size()) + " failed steps)"};
}

}  // namespace

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

Outcome determinism() {
  const auto t0 = Clock::now();
  const auto root = fs::temp_directory_path() / "cdcv_acceptance_determinism";
  const std::string data = (root / "gen" / "panel.csv").string();
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"gen", {"generate", "--rows", "200", "--generator-seed", "4"}},
      {"fit", {"fit", "--data", data, "--b", "3", "--seed", "7"}},
      {"simulate", {"simulate", "--model", (root / "fit" / "model.json").string(), "--samples", "500", "--seed", "7"}},
      {"backtest", {"backtest", "--data", data, "--b", "3", "--seed", "7", "--n-sims", "1000", "--max-steps", "5",
                    "--modes", "WithinSample", "OutOfSample"}},
      {"sweep", {"sweep", "--data", data, "--values", "3", "4", "--windows", "2", "--seed", "7"}},
      {"diagnostics", {"diagnostics", "--data", data, "--b", "3", "--windows", "2", "--seed", "7"}}};
  std::vector<std::string> differing;
  std::vector<std::map<std::string, std::string>> first;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(root);
    for (std::size_t i = 0; i < commands.size(); ++i) {
      auto args = commands[i].second;
      args.push_back("--out");
      args.push_back((root / commands[i].first).string());
      std::ostringstream out, err;
      if (cli::run(args, out, err) != 0) return {false, commands[i].first + " failed: " + err.str()};
      auto files = snapshot(root / commands[i].first);
      files["<stdout>"] = out.str();
      if (pass == 0) {
        first.push_back(files);
      } else if (files != first[i]) {
        differing.push_back(commands[i].first);
      }
    }
  }
  fs::remove_all(root);
  std::string list;
  for (const auto& d : differing) list += " " + d;
  return {differing.empty(), std::to_string(commands.size() - differing.size()) + "/" +
                                 std::to_string(commands.size()) + " commands byte-identical" +
                                 (list.empty() ? "" : ", differing:" + list) + ", " +
                                 fmt("%.1f", seconds_since(t0)) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by name.
  const std::set<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"kupiec_exactness", kupiec},
      {"h_function_integrity", h_integrity},
      {"density_normalization", density_normalization},
      {"fit_simulate_refit_closure", closure},
      {"clustering_oracle_equivalence", clustering_oracle},
      {"conditioning_efficacy", conditioning_efficacy},
      {"sweep_sanity", sweep_sanity},
      {"determinism", determinism},
      {"performance_envelope", performance},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
