#pragma once

#include <span>
#include <vector>

namespace cdcv {

/// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> ranks(std::span<const double> x);

/// Kendall's tau-a: (concordant - discordant) / (n(n-1)/2), counted in
/// O(n log n) with Knight's merge-sort algorithm. Tied pairs count zero.
/// Throws InputError on length mismatch, n < 2, or a constant input.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks.
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// Pearson correlation; throws InputError for constant input.
double pearson(std::span<const double> x, std::span<const double> y);

struct RankStats {
  double kendall_tau = 0.0;
  double spearman_rho = 0.0;
};

RankStats rank_stats(std::span<const double> x, std::span<const double> y);

}  // namespace cdcv
