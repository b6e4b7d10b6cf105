#include "cdcv/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdcv/error.hpp"
#include "cdcv/parallel.hpp"
#include "cdcv/rank.hpp"
#include "cdcv/rng.hpp"

namespace cdcv {
namespace {

std::vector<double> pit_series(const MarginalFit& fit, std::span<const double> x) {
  std::vector<double> u(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) u[t] = std::clamp(marginal_cdf(fit, x[t]), kClamp, 1.0 - kClamp);
  return u;
}

MarginalFit fit_index_marginal(const std::vector<double>& values, const std::string& what) {
  try {
    return fit_marginal(values);
  } catch (const InputError& e) {
    throw InputError(what + ": " + e.what());
  }
}

// Market-conditioned cluster index uniforms for every cluster, window row order.
std::vector<std::vector<double>> conditioned_indexes(const CdcvModel& m, const std::vector<double>& u_market) {
  std::vector<std::vector<double>> v(m.clusters.size());
  for (std::size_t e = 0; e < m.clusters.size(); ++e) {
    const auto& c = m.clusters[e];
    v[e] = h_series(c.lambda.copula, pit_series(c.marginal, c.index.values), u_market);
  }
  return v;
}

}  // namespace

std::string_view to_string(IndexSampling s) { return s == IndexSampling::Historical ? "Historical" : "Model"; }

IndexSampling index_sampling_from_string(std::string_view s) {
  if (s == "Historical") return IndexSampling::Historical;
  if (s == "Model") return IndexSampling::Model;
  throw InputError("unknown index sampling '" + std::string(s) + "'");
}

void CdcvConfig::validate() const {
  clustering.validate();
  if (!(index.upsilon >= 0.0)) throw InputError("noise parameter must be >= 0");
  if (families.members().empty()) throw InputError("copula family whitelist is empty");
}

std::vector<std::size_t> CdcvModel::joint_order() const {
  std::vector<std::size_t> out;
  for (const auto& c : clusters) {
    for (const auto& a : c.assets) out.push_back(a.column);
  }
  return out;
}

void CdcvModel::validate() const {
  partition.validate();
  if (partition.assets != assets) throw InputError("model: partition assets differ from model assets");
  if (clusters.size() != partition.size()) throw InputError("model: one cluster fit per partition cluster expected");
  if (asset_marginals.size() != assets.size()) throw InputError("model: one marginal per asset expected");
  std::size_t total = 0;
  for (std::size_t e = 0; e < clusters.size(); ++e) {
    const auto& c = clusters[e];
    if (c.assets.size() != partition.clusters[e].size()) throw InputError("model: cluster size mismatch");
    for (std::size_t z = 0; z < c.assets.size(); ++z) {
      if (c.assets[z].column != partition.clusters[e][z]) throw InputError("model: asset order differs from partition");
      c.assets[z].pi.copula.validate();
      c.assets[z].omega.copula.validate();
    }
    c.lambda.copula.validate();
    c.marginal.validate();
    if (c.index.values.size() != market.values.size()) throw InputError("model: index lengths differ");
    total += c.assets.size();
  }
  if (total != assets.size()) throw InputError("model: assets not covered by clusters");
  market_marginal.validate();
  for (const auto& m : asset_marginals) m.validate();
  joint.validate();
  if (joint.dimension() != assets.size()) throw InputError("model: joint copula dimension differs from asset count");
}

CdcvModel fit_cdcv(const Eigen::MatrixXd& window, const std::vector<std::string>& assets, const CdcvConfig& config,
                   std::size_t window_start) {
  config.validate();
  const auto n = static_cast<std::size_t>(window.cols());
  if (assets.size() != n) throw InputError("fit_cdcv: asset ids do not match the window columns");
  if (n < 2) throw InputError("fit_cdcv: need at least 2 assets");
  if (static_cast<std::size_t>(window.rows()) < RollingWindow::kMinLength) {
    throw InputError("fit_cdcv: window shorter than " + std::to_string(RollingWindow::kMinLength) + " rows");
  }

  CdcvModel m;
  m.assets = assets;
  m.config = config;
  m.window_start = window_start;
  m.partition = config.fixed_labels ? fixed_partition(assets, *config.fixed_labels)
                                    : agglomerate(window, assets, config.clustering);

  auto hierarchy = build_hierarchy(window, m.partition, config.index, config.seed, window_start);
  m.market = std::move(hierarchy.market);
  m.market_marginal = fit_index_marginal(m.market.values, "market index");
  const auto u_market = pit_series(m.market_marginal, m.market.values);

  m.asset_marginals.resize(n);
  std::vector<std::vector<double>> u_assets(n);
  parallel_for(n, [&](std::size_t j) {
    const auto x = column(window, static_cast<Eigen::Index>(j));
    try {
      m.asset_marginals[j] = fit_marginal(x);
    } catch (const InputError& e) {
      throw InputError("asset '" + assets[j] + "': " + e.what());
    }
    u_assets[j] = pit_series(m.asset_marginals[j], x);
  });

  const std::size_t clusters = m.partition.size();
  m.clusters.resize(clusters);
  std::vector<std::vector<std::vector<double>>> conditioned(clusters);
  parallel_for(clusters, [&](std::size_t e) {
    ClusterFit& c = m.clusters[e];
    c.index = std::move(hierarchy.clusters[e]);
    c.marginal = fit_index_marginal(c.index.values, "cluster " + std::to_string(e) + " index");
    const auto u_index = pit_series(c.marginal, c.index.values);
    c.lambda = select_bicop(u_index, u_market, config.families);
    const auto v_index = h_series(c.lambda.copula, u_index, u_market);
    for (auto j : m.partition.clusters[e]) {
      AssetFit a;
      a.column = j;
      a.pi = select_bicop(u_assets[j], u_market, config.families);
      auto x = h_series(a.pi.copula, u_assets[j], u_market);
      a.omega = select_bicop(x, v_index, config.families);
      conditioned[e].push_back(h_series(a.omega.copula, x, v_index));
      c.assets.push_back(std::move(a));
    }
  });

  Eigen::MatrixXd y(window.rows(), static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (const auto& per_cluster : conditioned) {
    for (const auto& series : per_cluster) {
      y.col(col++) = Eigen::Map<const Eigen::VectorXd>(series.data(), static_cast<Eigen::Index>(series.size()));
    }
  }
  m.joint = fit_joint(y, config.joint_student && config.families.contains(BicopFamily::StudentT));
  return m;
}

CdcvModel fit_cdcv(const ReturnPanel& window, const CdcvConfig& config, std::size_t window_start) {
  window.validate();
  return fit_cdcv(window.returns, window.assets, config, window_start);
}

double cdcv_log_density(const CdcvModel& m, double r_market, std::span<const double> r_clusters,
                        std::span<const double> r_assets) {
  if (r_clusters.size() != m.clusters.size() || r_assets.size() != m.assets.size()) {
    throw InputError("cdcv_log_density: point dimensions differ from the model");
  }
  double s = marginal_log_pdf(m.market_marginal, r_market);
  const double u_m = std::clamp(marginal_cdf(m.market_marginal, r_market), kClamp, 1.0 - kClamp);
  std::vector<double> y;
  y.reserve(m.assets.size());
  for (std::size_t e = 0; e < m.clusters.size(); ++e) {
    const auto& c = m.clusters[e];
    s += marginal_log_pdf(c.marginal, r_clusters[e]);
    const double u_s = std::clamp(marginal_cdf(c.marginal, r_clusters[e]), kClamp, 1.0 - kClamp);
    s += copula_log_density(c.lambda.copula, u_s, u_m);
    const double v_s = h(c.lambda.copula, u_s, u_m);
    for (const auto& a : c.assets) {
      const double r = r_assets[a.column];
      s += marginal_log_pdf(m.asset_marginals[a.column], r);
      const double u = std::clamp(marginal_cdf(m.asset_marginals[a.column], r), kClamp, 1.0 - kClamp);
      s += copula_log_density(a.pi.copula, u, u_m);
      const double x = h(a.pi.copula, u, u_m);
      s += copula_log_density(a.omega.copula, x, v_s);
      y.push_back(h(a.omega.copula, x, v_s));
    }
  }
  return s + joint_log_density(m.joint, y);
}

Eigen::MatrixXd simulate_cdcv_uniform(const CdcvModel& m, std::size_t n, std::uint64_t seed) {
  const std::size_t d = m.assets.size();
  const std::size_t rows = m.market.values.size();
  std::vector<double> u_market;
  std::vector<std::vector<double>> v_index;
  if (m.config.sampling == IndexSampling::Historical) {
    if (rows == 0) throw InputError("simulate_cdcv: model stores no index history");
    u_market = pit_series(m.market_marginal, m.market.values);
    v_index = conditioned_indexes(m, u_market);
  }
  const Eigen::MatrixXd chol = cholesky_factor(m.joint.corr);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  parallel_for(n, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    std::vector<double> w(d);
    joint_draw(m.joint, chol, rng, w);
    double um = 0.0;
    std::size_t t = 0;
    if (m.config.sampling == IndexSampling::Historical) {
      t = static_cast<std::size_t>(rng.next() % rows);
      um = u_market[t];
    } else {
      um = rng.uniform();
    }
    std::size_t k = 0;
    for (std::size_t e = 0; e < m.clusters.size(); ++e) {
      const auto& c = m.clusters[e];
      const double ve = m.config.sampling == IndexSampling::Historical ? v_index[e][t] : rng.uniform();
      for (const auto& a : c.assets) {
        const double x = h_inv(a.omega.copula, w[k++], ve);
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a.column)) = h_inv(a.pi.copula, x, um);
      }
    }
  });
  return out;
}

Eigen::MatrixXd simulate_cdcv(const CdcvModel& m, std::size_t n, std::uint64_t seed) {
  Eigen::MatrixXd u = simulate_cdcv_uniform(m, n, seed);
  parallel_for(static_cast<std::size_t>(u.cols()), [&](std::size_t j) {
    const auto& fit = m.asset_marginals[j];
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      u(r, static_cast<Eigen::Index>(j)) = marginal_quantile(fit, u(r, static_cast<Eigen::Index>(j)));
    }
  });
  return u;
}

ConditionedData condition_window(const CdcvModel& m, const Eigen::MatrixXd& window) {
  if (static_cast<std::size_t>(window.cols()) != m.assets.size()) {
    throw InputError("condition_window: column count differs from the model");
  }
  if (static_cast<std::size_t>(window.rows()) != m.market.values.size()) {
    throw InputError("condition_window: window length differs from the fitted window");
  }
  const auto u_market = pit_series(m.market_marginal, m.market.values);
  const auto v_index = conditioned_indexes(m, u_market);
  ConditionedData out;
  out.unconditioned = pit(window, m.asset_marginals);
  out.market_conditioned.resize(window.rows(), window.cols());
  out.fully_conditioned.resize(window.rows(), window.cols());
  for (std::size_t e = 0; e < m.clusters.size(); ++e) {
    for (const auto& a : m.clusters[e].assets) {
      const auto j = static_cast<Eigen::Index>(a.column);
      for (Eigen::Index t = 0; t < window.rows(); ++t) {
        const double x = h(a.pi.copula, out.unconditioned(t, j), u_market[t]);
        out.market_conditioned(t, j) = x;
        out.fully_conditioned(t, j) = h(a.omega.copula, x, v_index[e][t]);
      }
    }
  }
  return out;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Unconditioned: return "Unconditioned";
    case Stage::MarketConditioned: return "MarketConditioned";
    case Stage::FullyConditioned: return "FullyConditioned";
  }
  return "?";
}

double sample_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InputError("sample_quantile: empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

RhoSummary summarize(std::vector<double> v) {
  if (v.empty()) throw InputError("summarize: empty data");
  std::sort(v.begin(), v.end());
  RhoSummary s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  s.q1 = sample_quantile(v, 0.01);
  s.q25 = sample_quantile(v, 0.25);
  s.q50 = sample_quantile(v, 0.50);
  s.q75 = sample_quantile(v, 0.75);
  s.q99 = sample_quantile(v, 0.99);
  return s;
}

std::array<ConditioningDiagnostics, 3> conditioning_diagnostics(const CdcvModel& m, const Eigen::MatrixXd& window) {
  const auto data = condition_window(m, window);
  const std::array<const Eigen::MatrixXd*, 3> stages{&data.unconditioned, &data.market_conditioned,
                                                     &data.fully_conditioned};
  std::array<ConditioningDiagnostics, 3> out;
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& u = *stages[s];
    const auto n = static_cast<std::size_t>(u.cols());
    std::vector<std::vector<double>> cols(n);
    for (std::size_t j = 0; j < n; ++j) cols[j] = column(u, static_cast<Eigen::Index>(j));
    auto& d = out[s];
    d.stage = static_cast<Stage>(s);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d.rho.push_back(spearman_rho(cols[i], cols[j]));
    }
    d.summary = summarize(d.rho);
    std::vector<double> abs_rho(d.rho.size());
    std::transform(d.rho.begin(), d.rho.end(), abs_rho.begin(), [](double x) { return std::abs(x); });
    d.abs_summary = summarize(std::move(abs_rho));
  }
  return out;
}

int parameter_count(const CdcvModel& m) {
  int k = m.joint.parameter_count();
  for (const auto& c : m.clusters) {
    k += parameter_count(c.lambda.copula.family);
    for (const auto& a : c.assets) k += parameter_count(a.pi.copula.family) + parameter_count(a.omega.copula.family);
  }
  return k;
}

std::string_view to_string(RootClass r) {
  switch (r) {
    case RootClass::Market: return "Market";
    case RootClass::ClusterIndexes: return "ClusterIndexes";
    case RootClass::JointSimplified: return "JointSimplified";
  }
  return "?";
}

double SelectionRow::percent(BicopFamily f) const {
  if (total == 0) return 0.0;
  auto it = counts.find(f);
  return it == counts.end() ? 0.0 : 100.0 * static_cast<double>(it->second) / static_cast<double>(total);
}

std::array<SelectionRow, 3> selection_summary(std::span<const CdcvModel> models) {
  if (models.empty()) throw InputError("selection_summary: no models");
  std::array<SelectionRow, 3> rows{};
  for (std::size_t r = 0; r < 3; ++r) {
    rows[r].root = static_cast<RootClass>(r);
    for (auto f : {BicopFamily::Independence, BicopFamily::Gaussian, BicopFamily::StudentT, BicopFamily::Clayton,
                   BicopFamily::Frank}) {
      rows[r].counts[f] = 0;
    }
  }
  auto add = [&](RootClass r, BicopFamily f) {
    auto& row = rows[static_cast<std::size_t>(r)];
    ++row.counts[f];
    ++row.total;
  };
  for (const auto& m : models) {
    for (const auto& c : m.clusters) {
      add(RootClass::Market, c.lambda.copula.family);
      for (const auto& a : c.assets) {
        add(RootClass::Market, a.pi.copula.family);
        add(RootClass::ClusterIndexes, a.omega.copula.family);
      }
    }
    add(RootClass::JointSimplified,
        m.joint.family == JointFamily::Gaussian ? BicopFamily::Gaussian : BicopFamily::StudentT);
  }
  return rows;
}

}  // namespace cdcv
