#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace cdcv {

enum class BicopFamily { Independence, Gaussian, StudentT, Clayton, Frank };

std::string_view to_string(BicopFamily f);
/// Short label used in selection tables: I, G, ST, C, F.
std::string_view short_label(BicopFamily f);
BicopFamily bicop_family_from_string(std::string_view s);

/// Free parameter count: 0, 1, 2, 1, 1.
int parameter_count(BicopFamily f);

/// The parametric families considered during selection. Order is fixed
/// (Gaussian < StudentT < Clayton < Frank) and doubles as the tie-break.
class FamilySet {
 public:
  FamilySet() = default;
  FamilySet(std::initializer_list<BicopFamily> families);
  explicit FamilySet(std::span<const BicopFamily> families);

  static FamilySet all() { return {}; }

  bool contains(BicopFamily f) const;
  std::vector<BicopFamily> members() const;

 private:
  unsigned mask_ = 0b11110;  // bit per BicopFamily value, Independence excluded
};

/// A bivariate copula: family plus parameters.
///   Gaussian:  param = rho in (-1, 1)
///   StudentT:  param = rho in (-1, 1), nu > 2
///   Clayton:   param = theta > 0
///   Frank:     param = theta != 0; |theta| < 1e-6 behaves as independence
struct BivariateCopula {
  static constexpr double kFrankIndependence = 1e-6;

  BicopFamily family = BicopFamily::Independence;
  double param = 0.0;
  double nu = 0.0;

  /// Throws InputError when parameters are outside the family's domain.
  void validate() const;
};

struct BivariateCopulaFit {
  BivariateCopula copula;
  double loglik = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;
};

/// Arguments are clamped to [kClamp, 1 - kClamp] before any transform.
inline constexpr double kClamp = 1e-10;

double copula_density(const BivariateCopula& c, double u, double v);
double copula_log_density(const BivariateCopula& c, double u, double v);

/// h(u | v) = dC(u, v) / dv: the distribution of U conditional on V = v.
double h(const BivariateCopula& c, double u, double v);
/// Inverse of h in its first argument: h(h_inv(w, v), v) = w.
double h_inv(const BivariateCopula& c, double w, double v);

std::vector<double> h_series(const BivariateCopula& c, std::span<const double> u,
                             std::span<const double> v);

double copula_loglik(const BivariateCopula& c, std::span<const double> u, std::span<const double> v);

/// Maximum-likelihood fit of the copula term of the IFM likelihood for one family.
/// Requires equal lengths >= 30 and values in (0, 1). Clayton additionally
/// requires positive empirical Kendall tau (no rotations are modelled).
BivariateCopulaFit fit_bicop(std::span<const double> u, std::span<const double> v, BicopFamily family);

/// Fits every admissible family in `families` and returns the minimal-AIC fit;
/// Independence (AIC 0) when every parametric AIC is positive.
BivariateCopulaFit select_bicop(std::span<const double> u, std::span<const double> v,
                                const FamilySet& families = FamilySet::all());

}  // namespace cdcv
