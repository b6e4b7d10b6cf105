#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "cdcv/model.hpp"
#include "cdcv/panel.hpp"

namespace cdcv {

/// `count` window starts spread evenly over [0, rows - length]; all starts
/// when count is 0 or exceeds the number available.
std::vector<std::size_t> window_starts(std::size_t rows, std::size_t length, std::size_t count);

enum class SweepAxis { Clusters, Upsilon };
std::string_view to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view s);

/// Applies one sweep setting to a configuration.
CdcvConfig with_setting(CdcvConfig config, SweepAxis axis, double value);

struct SweepRow {
  double value = 0.0;
  std::size_t windows = 0;
  RhoSummary fully_conditioned;      // mean over windows of each statistic
  RhoSummary fully_conditioned_abs;
  double mean_clusters = 0.0;
};

/// For each setting, fits every sampled window and averages the
/// fully-conditioned rank-correlation summaries.
std::vector<SweepRow> sweep(const ReturnPanel& panel, const CdcvConfig& base, SweepAxis axis,
                            const std::vector<double>& values, std::size_t window_length,
                            const std::vector<std::size_t>& starts);

struct WindowDiagnostics {
  std::size_t start = 0;
  std::array<ConditioningDiagnostics, 3> stages;
  int parameters = 0;
  std::size_t clusters = 0;
  CdcvModel model;
};

std::vector<WindowDiagnostics> rolling_diagnostics(const ReturnPanel& panel, const CdcvConfig& config,
                                                   std::size_t window_length,
                                                   const std::vector<std::size_t>& starts);

}  // namespace cdcv
