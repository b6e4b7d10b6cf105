#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdcv/model.hpp"
#include "cdcv/panel.hpp"

namespace cdcv {

struct KupiecResult {
  double lr = 0.0;
  double p_value = 1.0;
};

/// Proportion-of-failures likelihood ratio for x exceptions in n trials at
/// nominal rate q, with 0 log 0 = 0. The p-value is the chi-square(1) upper tail.
KupiecResult kupiec_pof(std::size_t x, std::size_t n, double q);

/// Loss threshold exceeded with probability 1 - alpha/100 under the model:
/// minus the empirical (1 - alpha/100) quantile of simulated w'r.
/// `alpha_percent` is e.g. 95 or 99; weights must sum to 1.
double portfolio_var(const CdcvModel& model, std::span<const double> weights, double alpha_percent,
                     std::size_t n_sims, std::uint64_t seed);

/// The same statistic on an already simulated return matrix.
double portfolio_var(const Eigen::MatrixXd& sims, std::span<const double> weights, double alpha_percent);

enum class BacktestMode { WithinSample, OutOfSample };
std::string_view to_string(BacktestMode m);
BacktestMode backtest_mode_from_string(std::string_view s);

struct BacktestConfig {
  std::size_t window = 150;
  CdcvConfig model;
  std::vector<double> alphas{95.0, 99.0};
  std::vector<BacktestMode> modes{BacktestMode::OutOfSample};
  std::size_t n_sims = 10000;
  std::vector<double> weights;  // empty: equal weights
  /// Optional cap on the number of steps (0 = all), taken from the start.
  std::size_t max_steps = 0;
  unsigned workers = 0;

  void validate(std::size_t rows, std::size_t cols) const;
};

struct BacktestStep {
  std::size_t t = 0;               // first out-of-window row
  std::vector<double> var;         // per alpha
  double realized_within = 0.0;    // portfolio return on row t - 1
  double realized_out = 0.0;       // portfolio return on row t
};

struct StepFailure {
  std::size_t t = 0;
  std::string message;
};

struct VaRBacktestReport {
  BacktestMode mode = BacktestMode::OutOfSample;
  double alpha = 95.0;
  double var_mean = 0.0;  // mean predicted VaR over the counted steps
  std::size_t hits = 0;
  std::size_t trials = 0;
  double hit_rate = 0.0;
  double lr = 0.0;
  double p_value = 1.0;
  bool reject_95 = false;
  bool reject_99 = false;
};

struct BacktestResult {
  std::vector<BacktestStep> steps;
  std::vector<StepFailure> failures;
  std::vector<VaRBacktestReport> reports;  // mode-major, then alpha
};

/// For each t in [window, T): fits on rows [t - window, t), predicts VaR by
/// simulation and compares with the realised portfolio return on row t - 1
/// (WithinSample) or row t (OutOfSample). A hit is a loss strictly above VaR.
/// Steps whose fit fails are recorded and excluded from the trial count.
BacktestResult rolling_backtest(const ReturnPanel& panel, const BacktestConfig& config);

VaRBacktestReport make_report(BacktestMode mode, double alpha, std::span<const double> var,
                              std::span<const double> realized);

/// Aligned text table: mode, alpha, VaR, hits, hit %, LR, p-value, decisions.
std::string format_report_table(std::span<const VaRBacktestReport> reports);

}  // namespace cdcv
