#include "cdcv/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cdcv/error.hpp"
#include "cdcv/parallel.hpp"
#include "cdcv/rng.hpp"
#include "cdcv/special.hpp"

namespace cdcv {
namespace {

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

std::vector<double> resolve_weights(const BacktestConfig& c, std::size_t cols) {
  if (!c.weights.empty()) return c.weights;
  return std::vector<double>(cols, 1.0 / static_cast<double>(cols));
}

void check_weights(std::span<const double> w, std::size_t cols) {
  if (w.size() != cols) throw InputError("portfolio weights: expected one weight per asset");
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-9) throw InputError("portfolio weights must sum to 1");
}

double portfolio_return(const Eigen::MatrixXd& r, Eigen::Index row, std::span<const double> w) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < r.cols(); ++j) s += w[static_cast<std::size_t>(j)] * r(row, j);
  return s;
}

}  // namespace

KupiecResult kupiec_pof(std::size_t x, std::size_t n, double q) {
  if (n == 0) throw InputError("kupiec_pof: need at least one trial");
  if (x > n) throw InputError("kupiec_pof: more hits than trials");
  if (!(q > 0.0 && q < 1.0)) throw InputError("kupiec_pof: rate must lie in (0, 1)");
  const double xs = static_cast<double>(x), ns = static_cast<double>(n);
  const double p = xs / ns;
  const double null_ll = xlogy(ns - xs, 1.0 - q) + xlogy(xs, q);
  const double alt_ll = xlogy(ns - xs, 1.0 - p) + xlogy(xs, p);
  const double lr = std::max(0.0, -2.0 * (null_ll - alt_ll));
  return {lr, special::chi2_1df_upper_tail(lr)};
}

double portfolio_var(const Eigen::MatrixXd& sims, std::span<const double> weights, double alpha_percent) {
  if (!(alpha_percent > 0.0 && alpha_percent < 100.0)) throw InputError("VaR level must lie in (0, 100)");
  check_weights(weights, static_cast<std::size_t>(sims.cols()));
  if (sims.rows() < 1) throw InputError("portfolio_var: no simulations");
  std::vector<double> port(static_cast<std::size_t>(sims.rows()));
  for (Eigen::Index r = 0; r < sims.rows(); ++r) port[static_cast<std::size_t>(r)] = portfolio_return(sims, r, weights);
  std::sort(port.begin(), port.end());
  return -sample_quantile(port, 1.0 - alpha_percent / 100.0);
}

double portfolio_var(const CdcvModel& model, std::span<const double> weights, double alpha_percent,
                     std::size_t n_sims, std::uint64_t seed) {
  if (n_sims < 1000) throw InputError("portfolio_var: n_sims must be >= 1000");
  check_weights(weights, model.asset_count());
  return portfolio_var(simulate_cdcv(model, n_sims, seed), weights, alpha_percent);
}

std::string_view to_string(BacktestMode m) { return m == BacktestMode::WithinSample ? "WithinSample" : "OutOfSample"; }

BacktestMode backtest_mode_from_string(std::string_view s) {
  if (s == "WithinSample") return BacktestMode::WithinSample;
  if (s == "OutOfSample") return BacktestMode::OutOfSample;
  throw InputError("unknown backtest mode '" + std::string(s) + "'");
}

void BacktestConfig::validate(std::size_t rows, std::size_t cols) const {
  if (window < RollingWindow::kMinLength) throw InputError("backtest: window must be >= 30 rows");
  if (window >= rows) {
    throw InputError("backtest: window length " + std::to_string(window) + " leaves no steps in a panel of " +
                     std::to_string(rows) + " rows");
  }
  if (alphas.empty()) throw InputError("backtest: no VaR levels given");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 100.0)) throw InputError("backtest: VaR level must lie in (0, 100)");
  }
  if (modes.empty()) throw InputError("backtest: no modes given");
  if (n_sims < 1000) throw InputError("backtest: n_sims must be >= 1000");
  if (!weights.empty()) check_weights(weights, cols);
  model.validate();
}

VaRBacktestReport make_report(BacktestMode mode, double alpha, std::span<const double> var,
                              std::span<const double> realized) {
  VaRBacktestReport r;
  r.mode = mode;
  r.alpha = alpha;
  r.trials = var.size();
  if (r.trials == 0) throw NumericalError("backtest: every step failed");
  for (std::size_t i = 0; i < var.size(); ++i) {
    if (-realized[i] > var[i]) ++r.hits;
  }
  r.var_mean = std::accumulate(var.begin(), var.end(), 0.0) / static_cast<double>(var.size());
  r.hit_rate = static_cast<double>(r.hits) / static_cast<double>(r.trials);
  const auto k = kupiec_pof(r.hits, r.trials, 1.0 - alpha / 100.0);
  r.lr = k.lr;
  r.p_value = k.p_value;
  r.reject_95 = r.p_value < 0.05;
  r.reject_99 = r.p_value < 0.01;
  return r;
}

BacktestResult rolling_backtest(const ReturnPanel& panel, const BacktestConfig& config) {
  panel.validate();
  config.validate(panel.rows(), panel.cols());
  const auto weights = resolve_weights(config, panel.cols());
  std::size_t steps = panel.rows() - config.window;
  if (config.max_steps > 0) steps = std::min(steps, config.max_steps);

  std::vector<BacktestStep> slots(steps);
  std::vector<std::string> errors(steps);
  parallel_for(
      steps,
      [&](std::size_t k) {
        const std::size_t t = config.window + k;
        const std::size_t start = t - config.window;
        auto& s = slots[k];
        s.t = t;
        s.realized_within = portfolio_return(panel.returns, static_cast<Eigen::Index>(t - 1), weights);
        s.realized_out = portfolio_return(panel.returns, static_cast<Eigen::Index>(t), weights);
        try {
          const Eigen::MatrixXd w =
              panel.returns.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(config.window));
          const auto model = fit_cdcv(w, panel.assets, config.model, start);
          const auto sims = simulate_cdcv(model, config.n_sims, derive_seed(config.model.seed, t, 0x5eed));
          for (double a : config.alphas) s.var.push_back(portfolio_var(sims, weights, a));
        } catch (const NumericalError& e) {
          errors[k] = e.what();
        } catch (const InputError& e) {
          errors[k] = e.what();
        }
      },
      config.workers);

  BacktestResult out;
  for (std::size_t k = 0; k < steps; ++k) {
    if (errors[k].empty()) {
      out.steps.push_back(std::move(slots[k]));
    } else {
      out.failures.push_back({config.window + k, errors[k]});
    }
  }
  for (auto mode : config.modes) {
    for (std::size_t a = 0; a < config.alphas.size(); ++a) {
      std::vector<double> var, realized;
      for (const auto& s : out.steps) {
        var.push_back(s.var[a]);
        realized.push_back(mode == BacktestMode::WithinSample ? s.realized_within : s.realized_out);
      }
      out.reports.push_back(make_report(mode, config.alphas[a], var, realized));
    }
  }
  return out;
}

std::string format_report_table(std::span<const VaRBacktestReport> reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-13s %6s %10s %6s %7s %6s %9s %8s %-10s %-10s\n", "mode", "alpha", "VaR",
                "hits", "trials", "hit%", "LR_POF", "p-value", "95% conf", "99% conf");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-13s %6.1f %10.6f %6zu %7zu %6.2f %9.3f %8.3f %-10s %-10s\n",
                  std::string(to_string(r.mode)).c_str(), r.alpha, r.var_mean, r.hits, r.trials, 100.0 * r.hit_rate,
                  r.lr, r.p_value, r.reject_95 ? "reject" : "accept", r.reject_99 ? "reject" : "accept");
    os << line;
  }
  return os.str();
}

}  // namespace cdcv
