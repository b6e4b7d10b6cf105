#include "cdcv/analysis.hpp"

#include <cmath>
#include <string>

#include "cdcv/error.hpp"
#include "cdcv/parallel.hpp"

namespace cdcv {
namespace {

void accumulate(RhoSummary& acc, const RhoSummary& s) {
  acc.mean += s.mean;
  acc.std += s.std;
  acc.q1 += s.q1;
  acc.q25 += s.q25;
  acc.q50 += s.q50;
  acc.q75 += s.q75;
  acc.q99 += s.q99;
}

void scale(RhoSummary& s, double f) {
  s.mean *= f;
  s.std *= f;
  s.q1 *= f;
  s.q25 *= f;
  s.q50 *= f;
  s.q75 *= f;
  s.q99 *= f;
}

Eigen::MatrixXd rows_of(const ReturnPanel& panel, std::size_t start, std::size_t length) {
  RollingWindow{start, length}.validate(panel.rows());
  return panel.returns.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(length));
}

}  // namespace

std::vector<std::size_t> window_starts(std::size_t rows, std::size_t length, std::size_t count) {
  if (length > rows) throw InputError("window length exceeds the panel");
  const std::size_t available = rows - length + 1;
  std::vector<std::size_t> out;
  if (count == 0 || count >= available) {
    for (std::size_t s = 0; s < available; ++s) out.push_back(s);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(count == 1 ? 0 : i * (available - 1) / (count - 1));
  }
  return out;
}

std::string_view to_string(SweepAxis a) { return a == SweepAxis::Clusters ? "clusters" : "upsilon"; }

SweepAxis sweep_axis_from_string(std::string_view s) {
  if (s == "clusters" || s == "b") return SweepAxis::Clusters;
  if (s == "upsilon" || s == "noise") return SweepAxis::Upsilon;
  throw InputError("unknown sweep axis '" + std::string(s) + "' (expected clusters or upsilon)");
}

CdcvConfig with_setting(CdcvConfig config, SweepAxis axis, double value) {
  if (axis == SweepAxis::Clusters) {
    if (!(value >= 1.0) || value != std::floor(value)) throw InputError("cluster count must be a positive integer");
    config.clustering.stop = StoppingRule::cluster_count(static_cast<std::size_t>(value));
  } else {
    config.index.upsilon = value;
  }
  return config;
}

std::vector<SweepRow> sweep(const ReturnPanel& panel, const CdcvConfig& base, SweepAxis axis,
                            const std::vector<double>& values, std::size_t window_length,
                            const std::vector<std::size_t>& starts) {
  panel.validate();
  if (values.empty()) throw InputError("sweep: no settings given");
  if (starts.empty()) throw InputError("sweep: no windows given");
  std::vector<SweepRow> rows(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    const auto config = with_setting(base, axis, values[v]);
    std::vector<std::array<ConditioningDiagnostics, 3>> diag(starts.size());
    std::vector<std::size_t> clusters(starts.size());
    parallel_for(starts.size(), [&](std::size_t w) {
      const auto window = rows_of(panel, starts[w], window_length);
      const auto model = fit_cdcv(window, panel.assets, config, starts[w]);
      diag[w] = conditioning_diagnostics(model, window);
      clusters[w] = model.partition.size();
    });
    auto& row = rows[v];
    row.value = values[v];
    row.windows = starts.size();
    for (std::size_t w = 0; w < starts.size(); ++w) {
      accumulate(row.fully_conditioned, diag[w][2].summary);
      accumulate(row.fully_conditioned_abs, diag[w][2].abs_summary);
      row.mean_clusters += static_cast<double>(clusters[w]);
    }
    const double f = 1.0 / static_cast<double>(starts.size());
    scale(row.fully_conditioned, f);
    scale(row.fully_conditioned_abs, f);
    row.mean_clusters *= f;
  }
  return rows;
}

std::vector<WindowDiagnostics> rolling_diagnostics(const ReturnPanel& panel, const CdcvConfig& config,
                                                   std::size_t window_length,
                                                   const std::vector<std::size_t>& starts) {
  panel.validate();
  std::vector<WindowDiagnostics> out(starts.size());
  parallel_for(starts.size(), [&](std::size_t w) {
    const auto window = rows_of(panel, starts[w], window_length);
    auto& d = out[w];
    d.start = starts[w];
    d.model = fit_cdcv(window, panel.assets, config, starts[w]);
    d.stages = conditioning_diagnostics(d.model, window);
    d.parameters = parameter_count(d.model);
    d.clusters = d.model.partition.size();
  });
  return out;
}

}  // namespace cdcv
