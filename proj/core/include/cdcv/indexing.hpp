#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdcv/clustering.hpp"

namespace cdcv {

enum class IndexRule { SimpleMean, MarketCapWeighted, KendallTauWeighted, VolatilityWeighted, FirstPrincipalComponent };
enum class MarketSource { FromAssets, FromClusterIndexes };

std::string_view to_string(IndexRule r);
std::string_view to_string(MarketSource s);
IndexRule index_rule_from_string(std::string_view s);
MarketSource market_source_from_string(std::string_view s);

struct IndexAux {
  std::vector<double> market_caps;  // one per member; required by MarketCapWeighted
  double severity = 1.0;            // d in the Kendall-tau weights
};

/// Raw index over the columns of `members` (T x k). A single member is
/// returned unchanged under every rule.
///   KendallTauWeighted: w_i = tau_i + d (tau_i - min tau), tau_i the sum of
///     Kendall taus of member i with the other members over the window.
///   VolatilityWeighted: w_i proportional to the sample standard deviation.
///   FirstPrincipalComponent: X w, w the unit leading right singular vector
///     of the uncentered X, signed to correlate non-negatively with the mean.
std::vector<double> build_index(IndexRule rule, const Eigen::MatrixXd& members, const IndexAux& aux = {});

struct IndexSeries {
  std::vector<double> values;  // noise-adjusted
  std::vector<double> raw;
  IndexRule rule = IndexRule::VolatilityWeighted;
  double upsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> members;
};

/// Adds i.i.d. N(0, s^2) noise with s = max_t |I_t| / upsilon. upsilon = 0
/// disables the perturbation.
IndexSeries add_noise(std::span<const double> raw, double upsilon, std::uint64_t seed);

struct IndexConfig {
  IndexRule rule = IndexRule::VolatilityWeighted;
  double upsilon = 11.0;
  MarketSource market_source = MarketSource::FromAssets;
  double severity = 1.0;
  std::vector<double> market_caps;  // per panel column; may be empty
};

struct IndexHierarchy {
  IndexSeries market;
  std::vector<IndexSeries> clusters;
};

/// Market and per-cluster indexes for one learning window. Noise seeds are
/// derive_seed(seed, window_start, ordinal) with ordinal 0 for the market and
/// e + 1 for cluster e.
IndexHierarchy build_hierarchy(const Eigen::MatrixXd& window, const ClusterPartition& partition,
                               const IndexConfig& config, std::uint64_t seed, std::size_t window_start);

}  // namespace cdcv
