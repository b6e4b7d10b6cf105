#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cdcv {

enum class MarginalFamily { Normal, StudentT, SkewStudentT };

std::string_view to_string(MarginalFamily f);
MarginalFamily marginal_family_from_string(std::string_view s);

/// Number of free parameters: 2, 3 or 4.
int parameter_count(MarginalFamily f);

/// Location-scale marginal. StudentT uses `nu`; SkewStudentT is the
/// two-piece Fernandez-Steel skewing of StudentT with skew `gamma`
/// (gamma = 1 is symmetric).
struct MarginalFit {
  static constexpr double kMinNu = 2.01;
  static constexpr double kMaxNu = 200.0;

  MarginalFamily family = MarginalFamily::Normal;
  double location = 0.0;
  double scale = 1.0;
  double nu = 0.0;     // StudentT, SkewStudentT
  double gamma = 1.0;  // SkewStudentT
  double loglik = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;

  /// Throws InputError when parameters are outside their domain.
  void validate() const;
};

MarginalFit make_marginal(MarginalFamily family, double location, double scale, double nu = 0.0,
                          double gamma = 1.0);

double marginal_log_pdf(const MarginalFit& fit, double x);
double marginal_cdf(const MarginalFit& fit, double x);
/// Inverse CDF; throws InputError unless 0 < u < 1.
double marginal_quantile(const MarginalFit& fit, double u);

/// Maximum-likelihood fit of one family. Returns loglik/aic filled in.
/// Throws NumericalError if the optimiser does not produce a finite optimum.
MarginalFit fit_marginal_family(std::span<const double> series, MarginalFamily family);

/// Fits all three families and keeps the smallest AIC (ties go to the family
/// with fewer parameters). Requires at least 30 observations and a
/// non-constant series.
MarginalFit fit_marginal(std::span<const double> series);

/// Probability integral transform of each column through its fit. Values
/// are clamped to [1e-10, 1 - 1e-10].
Eigen::MatrixXd pit(const Eigen::MatrixXd& returns, std::span<const MarginalFit> fits);

}  // namespace cdcv
