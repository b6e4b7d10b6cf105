#include "cdcv/indexing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdcv/error.hpp"
#include "cdcv/panel.hpp"
#include "cdcv/rank.hpp"
#include "cdcv/rng.hpp"

namespace cdcv {
namespace {

std::vector<double> weighted(const Eigen::MatrixXd& x, const Eigen::VectorXd& w, const char* rule) {
  const double total = w.sum();
  if (!(std::abs(total) > 0.0) || !std::isfinite(total)) {
    throw InputError(std::string(rule) + " index: weights sum to zero");
  }
  const Eigen::VectorXd v = x * (w / total);
  return {v.data(), v.data() + v.size()};
}

std::vector<double> first_principal_component(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x.transpose() * x);
  if (eig.info() != Eigen::Success) throw NumericalError("principal component: eigen decomposition failed");
  Eigen::VectorXd w = eig.eigenvectors().col(x.cols() - 1);
  Eigen::VectorXd v = x * w;
  const Eigen::VectorXd mean = x.rowwise().mean();
  const Eigen::VectorXd vc = v.array() - v.mean();
  const Eigen::VectorXd mc = mean.array() - mean.mean();
  if (vc.dot(mc) < 0.0) v = -v;
  return {v.data(), v.data() + v.size()};
}

}  // namespace

std::string_view to_string(IndexRule r) {
  switch (r) {
    case IndexRule::SimpleMean: return "SimpleMean";
    case IndexRule::MarketCapWeighted: return "MarketCapWeighted";
    case IndexRule::KendallTauWeighted: return "KendallTauWeighted";
    case IndexRule::VolatilityWeighted: return "VolatilityWeighted";
    case IndexRule::FirstPrincipalComponent: return "FirstPrincipalComponent";
  }
  return "?";
}

std::string_view to_string(MarketSource s) {
  return s == MarketSource::FromAssets ? "FromAssets" : "FromClusterIndexes";
}

IndexRule index_rule_from_string(std::string_view s) {
  for (auto r : {IndexRule::SimpleMean, IndexRule::MarketCapWeighted, IndexRule::KendallTauWeighted,
                 IndexRule::VolatilityWeighted, IndexRule::FirstPrincipalComponent}) {
    if (to_string(r) == s) return r;
  }
  throw InputError("unknown index rule '" + std::string(s) + "'");
}

MarketSource market_source_from_string(std::string_view s) {
  for (auto m : {MarketSource::FromAssets, MarketSource::FromClusterIndexes}) {
    if (to_string(m) == s) return m;
  }
  throw InputError("unknown market source '" + std::string(s) + "'");
}

std::vector<double> build_index(IndexRule rule, const Eigen::MatrixXd& members, const IndexAux& aux) {
  const Eigen::Index k = members.cols();
  if (k < 1 || members.rows() < 1) throw InputError("build_index: no member series");
  if (k == 1) return column(members, 0);
  switch (rule) {
    case IndexRule::SimpleMean: return weighted(members, Eigen::VectorXd::Ones(k), "SimpleMean");
    case IndexRule::MarketCapWeighted: {
      if (aux.market_caps.size() != static_cast<std::size_t>(k)) {
        throw InputError("MarketCapWeighted index: market caps missing for some members");
      }
      Eigen::VectorXd w(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        if (!(aux.market_caps[i] >= 0.0)) throw InputError("MarketCapWeighted index: negative market cap");
        w(i) = aux.market_caps[i];
      }
      return weighted(members, w, "MarketCapWeighted");
    }
    case IndexRule::KendallTauWeighted: {
      std::vector<std::vector<double>> cols(k);
      for (Eigen::Index i = 0; i < k; ++i) cols[i] = column(members, i);
      Eigen::VectorXd tau = Eigen::VectorXd::Zero(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i + 1; j < k; ++j) {
          const double t = kendall_tau(cols[i], cols[j]);
          tau(i) += t;
          tau(j) += t;
        }
      }
      const double lo = tau.minCoeff();
      const Eigen::VectorXd w = tau.array() + aux.severity * (tau.array() - lo);
      return weighted(members, w, "KendallTauWeighted");
    }
    case IndexRule::VolatilityWeighted: {
      Eigen::VectorXd w(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        const auto c = column(members, i);
        const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        const double sd = std::sqrt(series_stats(c).variance);
        if (*lo == *hi || !(sd > 0.0)) throw InputError("VolatilityWeighted index: member " + std::to_string(i) + " is constant");
        w(i) = sd;
      }
      return weighted(members, w, "VolatilityWeighted");
    }
    case IndexRule::FirstPrincipalComponent: return first_principal_component(members);
  }
  throw InputError("unknown index rule");
}

IndexSeries add_noise(std::span<const double> raw, double upsilon, std::uint64_t seed) {
  if (!(upsilon >= 0.0) || !std::isfinite(upsilon)) throw InputError("noise parameter must be >= 0");
  IndexSeries out;
  out.raw.assign(raw.begin(), raw.end());
  out.values = out.raw;
  out.upsilon = upsilon;
  out.seed = seed;
  if (upsilon == 0.0) return out;
  double peak = 0.0;
  for (double v : raw) peak = std::max(peak, std::abs(v));
  const double sd = peak / upsilon;
  Rng rng(seed);
  for (double& v : out.values) v += sd * rng.normal();
  return out;
}

IndexHierarchy build_hierarchy(const Eigen::MatrixXd& window, const ClusterPartition& partition,
                               const IndexConfig& config, std::uint64_t seed, std::size_t window_start) {
  partition.validate();
  if (partition.assets.size() != static_cast<std::size_t>(window.cols())) {
    throw InputError("build_hierarchy: partition does not match the window's assets");
  }
  const bool caps = !config.market_caps.empty();
  if (caps && config.market_caps.size() != partition.assets.size()) {
    throw InputError("build_hierarchy: market caps do not match the asset count");
  }
  auto subset = [&](const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd m(window.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = window.col(static_cast<Eigen::Index>(idx[j]));
    return m;
  };
  auto aux_for = [&](const std::vector<std::size_t>& idx) {
    IndexAux aux;
    aux.severity = config.severity;
    if (caps) {
      for (auto i : idx) aux.market_caps.push_back(config.market_caps[i]);
    }
    return aux;
  };

  IndexHierarchy out;
  out.clusters.reserve(partition.size());
  for (std::size_t e = 0; e < partition.size(); ++e) {
    const auto& idx = partition.clusters[e];
    auto raw = build_index(config.rule, subset(idx), aux_for(idx));
    auto series = add_noise(raw, config.upsilon, derive_seed(seed, window_start, e + 1));
    series.rule = config.rule;
    for (auto i : idx) series.members.push_back(partition.assets[i]);
    out.clusters.push_back(std::move(series));
  }

  std::vector<double> raw;
  if (config.market_source == MarketSource::FromAssets) {
    std::vector<std::size_t> all(partition.assets.size());
    std::iota(all.begin(), all.end(), 0);
    raw = build_index(config.rule, window, aux_for(all));
  } else {
    Eigen::MatrixXd idx(window.rows(), static_cast<Eigen::Index>(out.clusters.size()));
    IndexAux aux;
    aux.severity = config.severity;
    for (std::size_t e = 0; e < out.clusters.size(); ++e) {
      idx.col(static_cast<Eigen::Index>(e)) = Eigen::Map<const Eigen::VectorXd>(
          out.clusters[e].values.data(), static_cast<Eigen::Index>(out.clusters[e].values.size()));
      if (caps) {
        double total = 0.0;
        for (auto i : partition.clusters[e]) total += config.market_caps[i];
        aux.market_caps.push_back(total);
      }
    }
    raw = build_index(config.rule, idx, aux);
  }
  out.market = add_noise(raw, config.upsilon, derive_seed(seed, window_start, 0));
  out.market.rule = config.rule;
  out.market.members = partition.assets;
  return out;
}

}  // namespace cdcv
