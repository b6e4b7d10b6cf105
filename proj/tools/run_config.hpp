#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdcv/analysis.hpp"
#include "cdcv/backtest.hpp"
#include "cdcv/serialize.hpp"
#include "cdcv/synthetic.hpp"

namespace cdcv::cli {

/// Resolved settings for one command. JSON keys match the field names;
/// clustering/index settings are flattened (metric, linkage, a, b, ...).
struct RunConfig {
  std::string data;
  std::size_t window = 150;
  std::optional<std::size_t> start;  // fit window start; unset: most recent window
  CdcvConfig model = default_model();
  std::map<std::string, double> market_caps;
  std::vector<double> alphas{95.0, 99.0};
  std::vector<BacktestMode> modes{BacktestMode::OutOfSample};
  std::size_t n_sims = 10000;
  std::size_t max_steps = 0;
  unsigned workers = 0;
  std::string model_path;
  std::size_t samples = 1000;
  SweepAxis axis = SweepAxis::Clusters;
  std::vector<double> values;  // empty: the axis default range
  std::size_t windows = 50;
  FactorSpec generator;
  std::string out = ".";

  static CdcvConfig default_model();
  std::vector<double> sweep_values() const;
};

/// Applies the keys present in `j` on top of `config`. Unknown keys and
/// malformed values raise InputError.
void apply_json(RunConfig& config, const Json& j);
Json to_json(const RunConfig& config);

}  // namespace cdcv::cli
