#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string_view>

#include "cdcv/rng.hpp"

namespace cdcv {

enum class JointFamily { Gaussian, StudentT };

std::string_view to_string(JointFamily f);
JointFamily joint_family_from_string(std::string_view s);

/// Multivariate elliptical copula over the twice-conditioned assets.
struct JointCopulaFit {
  JointFamily family = JointFamily::Gaussian;
  Eigen::MatrixXd corr;
  double nu = 0.0;  // StudentT only
  double loglik = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;

  std::size_t dimension() const { return static_cast<std::size_t>(corr.rows()); }
  /// Off-diagonal correlations, plus one for nu.
  int parameter_count() const;
  /// Throws InputError unless corr is a symmetric positive definite
  /// correlation matrix and nu > 2 for StudentT.
  void validate() const;
};

/// Eigenvalues clipped at `floor`, then rescaled to a unit diagonal.
Eigen::MatrixXd nearest_correlation(const Eigen::MatrixXd& r, double floor = 1e-6);

/// Correlation from pairwise Kendall tau inversion sin(pi tau / 2), projected
/// to positive definiteness; StudentT nu by profile likelihood on [2.1, 50].
/// The smaller AIC wins, ties to Gaussian.
JointCopulaFit fit_joint(const Eigen::MatrixXd& u, bool allow_student = true);

/// Copula log-likelihood of `u` for the given family and parameters.
double joint_loglik(JointFamily family, const Eigen::MatrixXd& corr, double nu, const Eigen::MatrixXd& u);
double joint_log_density(const JointCopulaFit& fit, std::span<const double> u);

/// Draws one uniform vector from the copula. `chol` is the lower Cholesky
/// factor of fit.corr.
void joint_draw(const JointCopulaFit& fit, const Eigen::MatrixXd& chol, Rng& rng, std::span<double> out);
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& corr);

}  // namespace cdcv
