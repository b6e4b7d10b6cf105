#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cdcv/bicop.hpp"

namespace cdcv {

/// Canonical vine. Position j of `ordering` is the root of tree j (0-based);
/// pairs[j][k - 1] couples the root with the variable at position j + k,
/// both conditioned on positions 0..j-1. The copula's first argument is the
/// non-root variable.
struct CVineModel {
  std::vector<std::size_t> ordering;
  std::vector<std::vector<BivariateCopulaFit>> pairs;

  std::size_t dimension() const { return ordering.size(); }
  const BivariateCopula& pair(std::size_t tree, std::size_t position) const {
    return pairs[tree][position - tree - 1].copula;
  }
  /// Sum of stored pair log-likelihoods.
  double loglik() const;
  int parameter_count() const;
  /// Throws InputError on a malformed ordering or pair array.
  void validate() const;
};

/// Fits tree by tree: select_bicop between each root and the remaining
/// nodes, then replaces every node by h(node | root). Columns of `u` are
/// variables; an empty ordering means column order.
CVineModel fit_cvine(const Eigen::MatrixXd& u, std::vector<std::size_t> ordering = {},
                     const FamilySet& families = FamilySet::all());

double cvine_log_density(const CVineModel& model, std::span<const double> u);
double cvine_density(const CVineModel& model, std::span<const double> u);
double cvine_loglik(const CVineModel& model, const Eigen::MatrixXd& u);

/// Draws n samples by the inverse h-function recursion. Row r uses the
/// stream derive_seed(seed, r), so output does not depend on thread count.
Eigen::MatrixXd simulate_cvine(const CVineModel& model, std::size_t n, std::uint64_t seed);

/// Maps independent uniforms w (columns in position order) to a vine sample.
void cvine_transform(const CVineModel& model, std::span<const double> w, std::span<double> out);

}  // namespace cdcv
