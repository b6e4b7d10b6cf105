#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdcv/bicop.hpp"
#include "cdcv/clustering.hpp"
#include "cdcv/indexing.hpp"
#include "cdcv/joint.hpp"
#include "cdcv/marginals.hpp"
#include "cdcv/panel.hpp"

namespace cdcv {

/// Source of the market and cluster index values used when simulating.
///   Historical: each sample reuses one stored window row, drawn uniformly.
///   Model: market and market-conditioned cluster index uniforms are drawn
///     independently, as the factorised density implies.
enum class IndexSampling { Historical, Model };

std::string_view to_string(IndexSampling s);
IndexSampling index_sampling_from_string(std::string_view s);

struct CdcvConfig {
  ClusteringConfig clustering;
  IndexConfig index;
  FamilySet families = FamilySet::all();
  bool joint_student = true;
  std::uint64_t seed = 0;
  /// Asset -> group label. When set, replaces agglomerative clustering.
  std::optional<std::map<std::string, std::string>> fixed_labels;
  IndexSampling sampling = IndexSampling::Historical;

  void validate() const;
};

struct AssetFit {
  std::size_t column = 0;  // panel column
  BivariateCopulaFit pi;     // asset | market
  BivariateCopulaFit omega;  // asset | cluster index, both given the market
};

struct ClusterFit {
  IndexSeries index;
  MarginalFit marginal;
  BivariateCopulaFit lambda;  // cluster index | market
  std::vector<AssetFit> assets;
};

struct CdcvModel {
  std::vector<std::string> assets;
  ClusterPartition partition;
  IndexSeries market;
  MarginalFit market_marginal;
  std::vector<ClusterFit> clusters;
  std::vector<MarginalFit> asset_marginals;  // panel column order
  JointCopulaFit joint;                      // cluster-major asset order
  CdcvConfig config;
  std::size_t window_start = 0;

  std::size_t asset_count() const { return assets.size(); }
  /// Panel column of each joint-copula dimension.
  std::vector<std::size_t> joint_order() const;
  /// Throws InputError if the structural invariants do not hold.
  void validate() const;
};

/// Clusters the window, derives indexes, fits marginals, the market tree,
/// the cluster tree and the joint copula over the twice-conditioned assets.
CdcvModel fit_cdcv(const Eigen::MatrixXd& window, const std::vector<std::string>& assets,
                   const CdcvConfig& config, std::size_t window_start = 0);
CdcvModel fit_cdcv(const ReturnPanel& window, const CdcvConfig& config, std::size_t window_start = 0);

/// Log density of one joint observation of market, cluster index and asset
/// returns (assets in panel column order).
double cdcv_log_density(const CdcvModel& model, double r_market, std::span<const double> r_clusters,
                        std::span<const double> r_assets);

/// Uniform-scale draws (n x assets, panel column order). Row r uses the
/// stream derive_seed(seed, r).
Eigen::MatrixXd simulate_cdcv_uniform(const CdcvModel& model, std::size_t n, std::uint64_t seed);
/// Return-scale draws through the asset marginal quantiles.
Eigen::MatrixXd simulate_cdcv(const CdcvModel& model, std::size_t n, std::uint64_t seed);

/// Per-asset uniforms at the three conditioning stages for a window.
struct ConditionedData {
  Eigen::MatrixXd unconditioned;
  Eigen::MatrixXd market_conditioned;
  Eigen::MatrixXd fully_conditioned;
};
ConditionedData condition_window(const CdcvModel& model, const Eigen::MatrixXd& window);

enum class Stage { Unconditioned, MarketConditioned, FullyConditioned };
std::string_view to_string(Stage s);

struct RhoSummary {
  double mean = 0.0;
  double std = 0.0;
  double q1 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q99 = 0.0;
};

/// Type-7 (linear interpolation) sample quantile of sorted data.
double sample_quantile(std::span<const double> sorted, double p);
RhoSummary summarize(std::vector<double> values);

struct ConditioningDiagnostics {
  Stage stage = Stage::Unconditioned;
  std::vector<double> rho;  // all asset pairs (i < j), row-major
  RhoSummary summary;
  RhoSummary abs_summary;
};

std::array<ConditioningDiagnostics, 3> conditioning_diagnostics(const CdcvModel& model,
                                                                const Eigen::MatrixXd& window);

/// Copula parameters over Lambda, Pi, Omega and the joint copula.
int parameter_count(const CdcvModel& model);

enum class RootClass { Market, ClusterIndexes, JointSimplified };
std::string_view to_string(RootClass r);

struct SelectionRow {
  RootClass root = RootClass::Market;
  std::map<BicopFamily, std::size_t> counts;  // every family present, zero if unused
  std::size_t total = 0;
  double percent(BicopFamily f) const;
};

/// Family tallies by root: Market (Lambda and Pi), ClusterIndexes (Omega) and
/// JointSimplified (the joint copula, counted as Gaussian or StudentT).
std::array<SelectionRow, 3> selection_summary(std::span<const CdcvModel> models);

}  // namespace cdcv
