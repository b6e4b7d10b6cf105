#include "cdcv/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cdcv/error.hpp"
#include "cdcv/panel.hpp"
#include "cdcv/parallel.hpp"
#include "cdcv/rank.hpp"

namespace cdcv {
namespace {

double corr_distance(double c) { return std::sqrt(std::max(0.0, 2.0 * (1.0 - c))); }

void sort_clusters(std::vector<std::vector<std::size_t>>& clusters) {
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

class Agglomerator {
 public:
  Agglomerator(const DistanceMatrix& dm, const ClusteringConfig& cfg) : d_(dm.d), cfg_(cfg) {
    const std::size_t n = dm.size();
    members_.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) members_.push_back({i});
    link_.assign(2 * n, std::vector<double>(2 * n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) link_[i][j] = d_(i, j);
    }
    active_.assign(n, true);
  }

  void run(ClusterPartition& out) {
    std::size_t count = members_.size();
    while (count > 1) {
      if (cfg_.stop.kind == StoppingRule::Kind::ClusterCount && count <= cfg_.stop.clusters) return;
      std::size_t bx = 0, by = 0;
      double best = std::numeric_limits<double>::infinity();
      bool found = false;
      for (std::size_t x = 0; x < members_.size(); ++x) {
        if (!active_[x]) continue;
        for (std::size_t y = x + 1; y < members_.size(); ++y) {
          if (!active_[y] || !admissible(x, y)) continue;
          if (link_[x][y] < best) {
            best = link_[x][y];
            bx = x;
            by = y;
            found = true;
          }
        }
      }
      if (!found) {
        out.stalled = true;
        return;
      }
      if (cfg_.stop.kind == StoppingRule::Kind::DistanceThreshold && best > cfg_.stop.threshold) return;
      join(bx, by);
      out.trace.push_back({bx, by, best});
      --count;
    }
  }

  std::vector<std::vector<std::size_t>> clusters() const {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t id = 0; id < members_.size(); ++id) {
      if (active_[id]) out.push_back(members_[id]);
    }
    return out;
  }

 private:
  bool admissible(std::size_t x, std::size_t y) const {
    const std::size_t sx = members_[x].size(), sy = members_[y].size();
    if (cfg_.linkage == Linkage::AdaptedSingle) {
      if (sx > 1 && sy > 1) return false;
      if (cfg_.max_size && (sx >= *cfg_.max_size || sy >= *cfg_.max_size)) return false;
      return true;
    }
    return !cfg_.max_size || sx + sy <= *cfg_.max_size;
  }

  double linkage(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    for (auto i : a) {
      for (auto j : b) {
        const double v = d_(i, j);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
    }
    switch (cfg_.linkage) {
      case Linkage::Complete: return hi;
      case Linkage::Average: return sum / static_cast<double>(a.size() * b.size());
      default: return lo;
    }
  }

  void join(std::size_t x, std::size_t y) {
    std::vector<std::size_t> merged = members_[x];
    merged.insert(merged.end(), members_[y].begin(), members_[y].end());
    std::sort(merged.begin(), merged.end());
    active_[x] = active_[y] = false;
    const std::size_t id = members_.size();
    members_.push_back(std::move(merged));
    active_.push_back(true);
    for (std::size_t k = 0; k < id; ++k) {
      if (!active_[k]) continue;
      link_[id][k] = link_[k][id] = linkage(members_[id], members_[k]);
    }
  }

  const Eigen::MatrixXd& d_;
  const ClusteringConfig& cfg_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<double>> link_;
  std::vector<bool> active_;
};

}  // namespace

std::string_view to_string(DistanceMetric m) {
  switch (m) {
    case DistanceMetric::Euclidean: return "Euclidean";
    case DistanceMetric::Manhattan: return "Manhattan";
    case DistanceMetric::PearsonBased: return "PearsonBased";
    case DistanceMetric::KendallTauBased: return "KendallTauBased";
    case DistanceMetric::SpearmanRhoBased: return "SpearmanRhoBased";
  }
  return "?";
}

std::string_view to_string(Linkage l) {
  switch (l) {
    case Linkage::Single: return "Single";
    case Linkage::Complete: return "Complete";
    case Linkage::Average: return "Average";
    case Linkage::AdaptedSingle: return "AdaptedSingle";
  }
  return "?";
}

DistanceMetric distance_metric_from_string(std::string_view s) {
  for (auto m : {DistanceMetric::Euclidean, DistanceMetric::Manhattan, DistanceMetric::PearsonBased,
                 DistanceMetric::KendallTauBased, DistanceMetric::SpearmanRhoBased}) {
    if (to_string(m) == s) return m;
  }
  throw InputError("unknown distance metric '" + std::string(s) + "'");
}

Linkage linkage_from_string(std::string_view s) {
  for (auto l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::AdaptedSingle}) {
    if (to_string(l) == s) return l;
  }
  throw InputError("unknown linkage '" + std::string(s) + "'");
}

double distance(DistanceMetric metric, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("distance: series lengths differ");
  switch (metric) {
    case DistanceMetric::Euclidean: {
      double s = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) s += (x[t] - y[t]) * (x[t] - y[t]);
      return std::sqrt(s);
    }
    case DistanceMetric::Manhattan: {
      double s = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) s += std::abs(x[t] - y[t]);
      return s;
    }
    case DistanceMetric::PearsonBased: return corr_distance(pearson(x, y));
    case DistanceMetric::KendallTauBased: return corr_distance(kendall_tau(x, y));
    case DistanceMetric::SpearmanRhoBased: return corr_distance(spearman_rho(x, y));
  }
  return 0.0;
}

DistanceMatrix distance_matrix(const Eigen::MatrixXd& series, DistanceMetric metric) {
  const auto n = static_cast<std::size_t>(series.cols());
  std::vector<std::vector<double>> cols(n);
  for (std::size_t j = 0; j < n; ++j) cols[j] = column(series, static_cast<Eigen::Index>(j));
  DistanceMatrix out{metric, Eigen::MatrixXd::Zero(series.cols(), series.cols())};
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = distance(metric, cols[i], cols[j]);
      out.d(i, j) = v;
      out.d(j, i) = v;
    }
  });
  return out;
}

void ClusteringConfig::validate() const {
  if (max_size && *max_size < 1) throw InputError("clustering: max cluster size a must be >= 1");
  if (stop.kind == StoppingRule::Kind::ClusterCount && stop.clusters < 1) {
    throw InputError("clustering: cluster count b must be >= 1");
  }
}

std::vector<std::size_t> ClusterPartition::labels() const {
  std::vector<std::size_t> out(assets.size(), 0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (auto i : clusters[c]) out[i] = c;
  }
  return out;
}

void ClusterPartition::validate() const {
  std::vector<int> seen(assets.size(), 0);
  for (const auto& c : clusters) {
    if (c.empty()) throw InputError("partition: empty cluster");
    for (auto i : c) {
      if (i >= assets.size()) throw InputError("partition: member index out of range");
      if (seen[i]++) throw InputError("partition: asset '" + assets[i] + "' in more than one cluster");
    }
  }
  for (std::size_t i = 0; i < assets.size(); ++i) {
    if (!seen[i]) throw InputError("partition: asset '" + assets[i] + "' not assigned to a cluster");
  }
}

ClusterPartition agglomerate(const DistanceMatrix& distances, std::vector<std::string> assets,
                             const ClusteringConfig& config) {
  config.validate();
  if (distances.size() != assets.size()) throw InputError("agglomerate: asset count differs from distance matrix");
  if (assets.size() < 2) throw InputError("agglomerate: need at least 2 assets");
  ClusterPartition out;
  out.assets = std::move(assets);
  Agglomerator engine(distances, config);
  engine.run(out);
  out.clusters = engine.clusters();
  sort_clusters(out.clusters);
  return out;
}

ClusterPartition agglomerate(const Eigen::MatrixXd& series, std::vector<std::string> assets,
                             const ClusteringConfig& config) {
  return agglomerate(distance_matrix(series, config.metric), std::move(assets), config);
}

std::vector<std::vector<std::size_t>> replay_trace(std::size_t n, std::span<const Merge> trace) {
  std::vector<std::vector<std::size_t>> members;
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) members.push_back({i});
  for (const auto& m : trace) {
    if (m.x >= members.size() || m.y >= members.size() || !active[m.x] || !active[m.y] || m.x == m.y) {
      throw InputError("replay_trace: join references an inactive cluster");
    }
    auto merged = members[m.x];
    merged.insert(merged.end(), members[m.y].begin(), members[m.y].end());
    active[m.x] = active[m.y] = false;
    members.push_back(std::move(merged));
    active.push_back(true);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t id = 0; id < members.size(); ++id) {
    if (active[id]) out.push_back(members[id]);
  }
  sort_clusters(out);
  return out;
}

ClusterPartition fixed_partition(const std::vector<std::string>& assets,
                                 const std::map<std::string, std::string>& labels) {
  if (assets.empty()) throw InputError("fixed_partition: no assets");
  std::set<std::string> known(assets.begin(), assets.end());
  for (const auto& [asset, label] : labels) {
    if (!known.count(asset)) throw InputError("fixed_partition: label given for unknown asset '" + asset + "'");
  }
  ClusterPartition out;
  out.assets = assets;
  std::map<std::string, std::size_t> ordinal;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    auto it = labels.find(assets[i]);
    if (it == labels.end()) throw InputError("fixed_partition: asset '" + assets[i] + "' has no label");
    auto [pos, inserted] = ordinal.emplace(it->second, out.clusters.size());
    if (inserted) out.clusters.emplace_back();
    out.clusters[pos->second].push_back(i);
  }
  return out;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw InputError("adjusted_rand_index: labelings differ in length");
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto c2 = [](double k) { return k * (k - 1.0) / 2.0; };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [k, v] : joint) index += c2(v);
  for (const auto& [k, v] : ra) sa += c2(v);
  for (const auto& [k, v] : rb) sb += c2(v);
  const double expected = sa * sb / c2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace cdcv
