#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdcv {

enum class DistanceMetric { Euclidean, Manhattan, PearsonBased, KendallTauBased, SpearmanRhoBased };
enum class Linkage { Single, Complete, Average, AdaptedSingle };

std::string_view to_string(DistanceMetric m);
std::string_view to_string(Linkage l);
DistanceMetric distance_metric_from_string(std::string_view s);
Linkage linkage_from_string(std::string_view s);

/// Correlation-based metrics map a correlation c to sqrt(2 (1 - c)), in [0, 2].
double distance(DistanceMetric metric, std::span<const double> x, std::span<const double> y);

/// Symmetric matrix of pairwise column distances with a zero diagonal.
struct DistanceMatrix {
  DistanceMetric metric = DistanceMetric::Euclidean;
  Eigen::MatrixXd d;

  std::size_t size() const { return static_cast<std::size_t>(d.rows()); }
};

DistanceMatrix distance_matrix(const Eigen::MatrixXd& series, DistanceMetric metric);

struct StoppingRule {
  enum class Kind { ClusterCount, DistanceThreshold, None };

  Kind kind = Kind::ClusterCount;
  std::size_t clusters = 15;  // ClusterCount: stop once this many clusters remain
  double threshold = 0.0;     // DistanceThreshold: stop before a join above this

  static StoppingRule cluster_count(std::size_t b) { return {Kind::ClusterCount, b, 0.0}; }
  static StoppingRule distance_threshold(double t) { return {Kind::DistanceThreshold, 0, t}; }
  static StoppingRule none() { return {Kind::None, 0, 0.0}; }
};

struct ClusteringConfig {
  DistanceMetric metric = DistanceMetric::KendallTauBased;
  Linkage linkage = Linkage::AdaptedSingle;
  std::optional<std::size_t> max_size;  // a
  StoppingRule stop = StoppingRule::cluster_count(15);

  void validate() const;
};

/// One agglomeration step. Cluster ids start as the asset column indices
/// 0..n-1; the q-th join (0-based) creates id n + q. x < y.
struct Merge {
  std::size_t x = 0;
  std::size_t y = 0;
  double distance = 0.0;

  bool operator==(const Merge&) const = default;
};

struct ClusterPartition {
  std::vector<std::string> assets;
  /// Column indices per cluster, each sorted; clusters ordered by smallest member.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<Merge> trace;
  /// True when clustering ended because no admissible join remained before
  /// the stopping rule was met.
  bool stalled = false;

  std::size_t size() const { return clusters.size(); }
  /// Cluster ordinal of each asset.
  std::vector<std::size_t> labels() const;
  /// Throws InputError unless clusters are a disjoint non-empty cover.
  void validate() const;
};

ClusterPartition agglomerate(const DistanceMatrix& distances, std::vector<std::string> assets,
                             const ClusteringConfig& config);
ClusterPartition agglomerate(const Eigen::MatrixXd& series, std::vector<std::string> assets,
                             const ClusteringConfig& config);

/// Rebuilds the clusters produced by a merge trace over n singletons.
std::vector<std::vector<std::size_t>> replay_trace(std::size_t n, std::span<const Merge> trace);

/// Partition from externally supplied labels (asset id -> group label).
/// Clusters follow the order in which labels first appear in `assets`.
ClusterPartition fixed_partition(const std::vector<std::string>& assets,
                                 const std::map<std::string, std::string>& labels);

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace cdcv
