#include "cdcv/bicop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cdcv/error.hpp"
#include "cdcv/optim.hpp"
#include "cdcv/rank.hpp"
#include "cdcv/special.hpp"

namespace cdcv {
namespace {

constexpr double kMaxRho = 0.9999;
constexpr double kMinStudentNu = 2.01;
constexpr double kMaxStudentNu = 30.0;
constexpr double kMinClayton = 1e-4;
constexpr double kMaxClayton = 100.0;
constexpr double kMaxFrank = 80.0;
constexpr std::size_t kMinObs = 30;

double clamp01(double u) { return std::clamp(u, kClamp, 1.0 - kClamp); }

bool is_independent(const BivariateCopula& c) {
  return c.family == BicopFamily::Independence ||
         (c.family == BicopFamily::Frank && std::abs(c.param) < BivariateCopula::kFrankIndependence);
}

// log(e^a + e^b - 1) for a, b >= 0.
double log_sum_minus_one(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

double student_log_norm(double nu) {
  return special::lgamma(0.5 * (nu + 2.0)) + special::lgamma(0.5 * nu) -
         2.0 * special::lgamma(0.5 * (nu + 1.0));
}

// ---- Gaussian --------------------------------------------------------------

double gauss_log_density(double rho, double x, double y) {
  const double r2 = rho * rho;
  return -0.5 * std::log1p(-r2) - (r2 * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * (1.0 - r2));
}

// ---- Student t ---------------------------------------------------------------

double student_log_density(double rho, double nu, double log_norm, double x, double y) {
  const double one_r2 = 1.0 - rho * rho;
  const double q = (x * x + y * y - 2.0 * rho * x * y) / (nu * one_r2);
  return log_norm - 0.5 * std::log(one_r2) - 0.5 * (nu + 2.0) * std::log1p(q) +
         0.5 * (nu + 1.0) * (std::log1p(x * x / nu) + std::log1p(y * y / nu));
}

// ---- Clayton -----------------------------------------------------------------

double clayton_log_density(double theta, double u, double v) {
  const double lu = std::log(u), lv = std::log(v);
  const double s = log_sum_minus_one(-theta * lu, -theta * lv);
  return std::log1p(theta) - (1.0 + theta) * (lu + lv) - (2.0 + 1.0 / theta) * s;
}

double clayton_h(double theta, double u, double v) {
  const double lu = std::log(u), lv = std::log(v);
  const double s = log_sum_minus_one(-theta * lu, -theta * lv);
  return std::exp(-(theta + 1.0) * lv - (1.0 / theta + 1.0) * s);
}

double clayton_h_inv(double theta, double w, double v) {
  const double lv = std::log(v);
  // X = 1 + v^-theta * (w^(-theta/(1+theta)) - 1); u = X^(-1/theta)
  const double e = std::expm1(-theta / (1.0 + theta) * std::log(w));
  const double b = -theta * lv + std::log(e);
  const double log_x = b > 0.0 ? b + std::log1p(std::exp(-b)) : std::log1p(std::exp(b));
  return std::exp(-log_x / theta);
}

// ---- Frank (theta > 0; negative theta by reflection v -> 1 - v) ----------------

// e^{-t u} + e^{-t v} - e^{-t(u+v)} - e^{-t}, positive for t > 0.
double frank_denominator(double t, double u, double v) {
  return std::exp(-t * u) + std::exp(-t * v) - std::exp(-t * (u + v)) - std::exp(-t);
}

double frank_log_density_pos(double t, double u, double v) {
  const double a = -std::expm1(-t);  // 1 - e^{-t}
  return std::log(t) + std::log(a) - t * (u + v) - 2.0 * std::log(frank_denominator(t, u, v));
}

double frank_h_pos(double t, double u, double v) {
  return std::exp(-t * v) * (-std::expm1(-t * u)) / frank_denominator(t, u, v);
}

double frank_h_inv_pos(double t, double w, double v) {
  const double ratio = w * std::expm1(-t) / (w + (1.0 - w) * std::exp(-t * v));
  return -std::log1p(ratio) / t;
}

// Density and h for the Frank copula with any non-negligible theta.
double frank_log_density(double theta, double u, double v) {
  return theta > 0.0 ? frank_log_density_pos(theta, u, v) : frank_log_density_pos(-theta, u, 1.0 - v);
}

double frank_h(double theta, double u, double v) {
  return theta > 0.0 ? frank_h_pos(theta, u, v) : frank_h_pos(-theta, u, 1.0 - v);
}

double frank_h_inv(double theta, double w, double v) {
  return theta > 0.0 ? frank_h_inv_pos(theta, w, v) : frank_h_inv_pos(-theta, w, 1.0 - v);
}

void check_inputs(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("copula fit: series lengths differ");
  if (u.size() < kMinObs) {
    throw InputError("copula fit: need at least 30 observations, got " + std::to_string(u.size()));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0 && v[i] > 0.0 && v[i] < 1.0)) {
      throw InputError("copula fit: observation " + std::to_string(i) + " outside (0, 1)");
    }
  }
}

BivariateCopulaFit make_fit(BivariateCopula c, double loglik, std::size_t n) {
  BivariateCopulaFit f;
  f.copula = c;
  f.loglik = loglik;
  f.aic = 2.0 * parameter_count(c.family) - 2.0 * loglik;
  f.n_obs = n;
  return f;
}

BivariateCopulaFit fit_gaussian(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = u.size();
  double s2 = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = special::norm_quantile(clamp01(u[i]));
    const double y = special::norm_quantile(clamp01(v[i]));
    s2 += x * x + y * y;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  auto loglik = [&](double rho) {
    const double r2 = rho * rho;
    return -0.5 * dn * std::log1p(-r2) - (r2 * s2 - 2.0 * rho * sxy) / (2.0 * (1.0 - r2));
  };
  const auto r = optim::minimize_brent([&](double rho) { return -loglik(rho); }, -kMaxRho, kMaxRho, 52);
  if (!std::isfinite(r.value)) throw NumericalError("Gaussian copula fit did not converge");
  return make_fit({BicopFamily::Gaussian, r.x[0], 0.0}, -r.value, n);
}

BivariateCopulaFit fit_student(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = u.size();
  std::vector<double> x(n), y(n), base(n);
  auto profile = [&](double nu, double* rho_out) {
    double marg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = special::t_quantile(clamp01(u[i]), nu);
      y[i] = special::t_quantile(clamp01(v[i]), nu);
      marg += std::log1p(x[i] * x[i] / nu) + std::log1p(y[i] * y[i] / nu);
    }
    const double log_norm = student_log_norm(nu);
    const double dn = static_cast<double>(n);
    auto neg = [&](double rho) {
      const double one_r2 = 1.0 - rho * rho;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += std::log1p((x[i] * x[i] + y[i] * y[i] - 2.0 * rho * x[i] * y[i]) / (nu * one_r2));
      }
      return -(dn * (log_norm - 0.5 * std::log(one_r2)) - 0.5 * (nu + 2.0) * acc + 0.5 * (nu + 1.0) * marg);
    };
    const auto r = optim::minimize_brent(neg, -kMaxRho, kMaxRho, 30);
    if (rho_out != nullptr) *rho_out = r.x[0];
    return r.value;
  };
  const auto outer =
      optim::minimize_brent([&](double nu) { return profile(nu, nullptr); }, kMinStudentNu, kMaxStudentNu, 16);
  double rho = 0.0;
  const double nu = outer.x[0];
  const double value = profile(nu, &rho);
  if (!std::isfinite(value)) throw NumericalError("StudentT copula fit did not converge");
  return make_fit({BicopFamily::StudentT, rho, nu}, -value, n);
}

BivariateCopulaFit fit_clayton(std::span<const double> u, std::span<const double> v) {
  const double tau = kendall_tau(u, v);
  if (!(tau > 0.0)) {
    throw InputError("Clayton copula requires positive dependence (empirical tau = " +
                     std::to_string(tau) + ")");
  }
  const std::size_t n = u.size();
  auto neg = [&](double log_theta) {
    const double theta = std::exp(log_theta);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += clayton_log_density(theta, clamp01(u[i]), clamp01(v[i]));
    return -acc;
  };
  const auto r = optim::minimize_brent(neg, std::log(kMinClayton), std::log(kMaxClayton), 40);
  if (!std::isfinite(r.value)) throw NumericalError("Clayton copula fit did not converge");
  return make_fit({BicopFamily::Clayton, std::exp(r.x[0]), 0.0}, -r.value, n);
}

BivariateCopulaFit fit_frank(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = u.size();
  auto neg = [&](double theta) {
    const BivariateCopula c{BicopFamily::Frank, theta, 0.0};
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += copula_log_density(c, u[i], v[i]);
    return -acc;
  };
  const auto r = optim::minimize_brent(neg, -kMaxFrank, kMaxFrank, 40);
  if (!std::isfinite(r.value)) throw NumericalError("Frank copula fit did not converge");
  return make_fit({BicopFamily::Frank, r.x[0], 0.0}, -r.value, n);
}

}  // namespace

std::string_view to_string(BicopFamily f) {
  switch (f) {
    case BicopFamily::Independence: return "Independence";
    case BicopFamily::Gaussian: return "Gaussian";
    case BicopFamily::StudentT: return "StudentT";
    case BicopFamily::Clayton: return "Clayton";
    case BicopFamily::Frank: return "Frank";
  }
  return "?";
}

std::string_view short_label(BicopFamily f) {
  switch (f) {
    case BicopFamily::Independence: return "I";
    case BicopFamily::Gaussian: return "G";
    case BicopFamily::StudentT: return "ST";
    case BicopFamily::Clayton: return "C";
    case BicopFamily::Frank: return "F";
  }
  return "?";
}

BicopFamily bicop_family_from_string(std::string_view s) {
  for (auto f : {BicopFamily::Independence, BicopFamily::Gaussian, BicopFamily::StudentT,
                 BicopFamily::Clayton, BicopFamily::Frank}) {
    if (to_string(f) == s || short_label(f) == s) return f;
  }
  throw InputError("unknown copula family '" + std::string(s) + "'");
}

int parameter_count(BicopFamily f) {
  switch (f) {
    case BicopFamily::Independence: return 0;
    case BicopFamily::StudentT: return 2;
    default: return 1;
  }
}

FamilySet::FamilySet(std::initializer_list<BicopFamily> families) : mask_(0) {
  for (auto f : families) {
    if (f != BicopFamily::Independence) mask_ |= 1u << static_cast<unsigned>(f);
  }
}

FamilySet::FamilySet(std::span<const BicopFamily> families) : mask_(0) {
  for (auto f : families) {
    if (f != BicopFamily::Independence) mask_ |= 1u << static_cast<unsigned>(f);
  }
}

bool FamilySet::contains(BicopFamily f) const { return (mask_ >> static_cast<unsigned>(f)) & 1u; }

std::vector<BicopFamily> FamilySet::members() const {
  std::vector<BicopFamily> out;
  for (auto f : {BicopFamily::Gaussian, BicopFamily::StudentT, BicopFamily::Clayton, BicopFamily::Frank}) {
    if (contains(f)) out.push_back(f);
  }
  return out;
}

void BivariateCopula::validate() const {
  auto fail = [&](const char* what) {
    throw InputError(std::string(to_string(family)) + " copula: " + what);
  };
  switch (family) {
    case BicopFamily::Independence: break;
    case BicopFamily::Gaussian:
      if (!(std::abs(param) < 1.0)) fail("rho must lie in (-1, 1)");
      break;
    case BicopFamily::StudentT:
      if (!(std::abs(param) < 1.0)) fail("rho must lie in (-1, 1)");
      if (!(nu > 2.0) || !std::isfinite(nu)) fail("nu must be > 2");
      break;
    case BicopFamily::Clayton:
      if (!(param > 0.0) || !std::isfinite(param)) fail("theta must be > 0");
      break;
    case BicopFamily::Frank:
      if (param == 0.0 || !std::isfinite(param)) fail("theta must be non-zero");
      break;
  }
}

double copula_log_density(const BivariateCopula& c, double u, double v) {
  if (is_independent(c)) return 0.0;
  u = clamp01(u);
  v = clamp01(v);
  switch (c.family) {
    case BicopFamily::Gaussian:
      return gauss_log_density(c.param, special::norm_quantile(u), special::norm_quantile(v));
    case BicopFamily::StudentT:
      return student_log_density(c.param, c.nu, student_log_norm(c.nu), special::t_quantile(u, c.nu),
                                 special::t_quantile(v, c.nu));
    case BicopFamily::Clayton: return clayton_log_density(c.param, u, v);
    case BicopFamily::Frank: return frank_log_density(c.param, u, v);
    case BicopFamily::Independence: break;
  }
  return 0.0;
}

double copula_density(const BivariateCopula& c, double u, double v) {
  c.validate();
  return std::exp(copula_log_density(c, u, v));
}

double h(const BivariateCopula& c, double u, double v) {
  u = clamp01(u);
  v = clamp01(v);
  if (is_independent(c)) return u;
  double w = u;
  switch (c.family) {
    case BicopFamily::Gaussian: {
      const double x = special::norm_quantile(u), y = special::norm_quantile(v);
      w = special::norm_cdf((x - c.param * y) / std::sqrt(1.0 - c.param * c.param));
      break;
    }
    case BicopFamily::StudentT: {
      const double x = special::t_quantile(u, c.nu), y = special::t_quantile(v, c.nu);
      const double scale = std::sqrt((c.nu + y * y) * (1.0 - c.param * c.param) / (c.nu + 1.0));
      w = special::t_cdf((x - c.param * y) / scale, c.nu + 1.0);
      break;
    }
    case BicopFamily::Clayton: w = clayton_h(c.param, u, v); break;
    case BicopFamily::Frank: w = frank_h(c.param, u, v); break;
    case BicopFamily::Independence: break;
  }
  return clamp01(w);
}

double h_inv(const BivariateCopula& c, double w, double v) {
  w = clamp01(w);
  v = clamp01(v);
  if (is_independent(c)) return w;
  double u = w;
  switch (c.family) {
    case BicopFamily::Gaussian: {
      const double y = special::norm_quantile(v);
      u = special::norm_cdf(special::norm_quantile(w) * std::sqrt(1.0 - c.param * c.param) + c.param * y);
      break;
    }
    case BicopFamily::StudentT: {
      const double y = special::t_quantile(v, c.nu);
      const double scale = std::sqrt((c.nu + y * y) * (1.0 - c.param * c.param) / (c.nu + 1.0));
      u = special::t_cdf(special::t_quantile(w, c.nu + 1.0) * scale + c.param * y, c.nu);
      break;
    }
    case BicopFamily::Clayton: u = clayton_h_inv(c.param, w, v); break;
    case BicopFamily::Frank: u = frank_h_inv(c.param, w, v); break;
    case BicopFamily::Independence: break;
  }
  return clamp01(u);
}

std::vector<double> h_series(const BivariateCopula& c, std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("h_series: length mismatch");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = h(c, u[i], v[i]);
  return out;
}

double copula_loglik(const BivariateCopula& c, std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("copula_loglik: length mismatch");
  c.validate();
  if (is_independent(c)) return 0.0;
  double acc = 0.0;
  if (c.family == BicopFamily::StudentT) {
    const double ln = student_log_norm(c.nu);
    for (std::size_t i = 0; i < u.size(); ++i) {
      acc += student_log_density(c.param, c.nu, ln, special::t_quantile(clamp01(u[i]), c.nu),
                                 special::t_quantile(clamp01(v[i]), c.nu));
    }
    return acc;
  }
  for (std::size_t i = 0; i < u.size(); ++i) acc += copula_log_density(c, u[i], v[i]);
  return acc;
}

BivariateCopulaFit fit_bicop(std::span<const double> u, std::span<const double> v, BicopFamily family) {
  check_inputs(u, v);
  switch (family) {
    case BicopFamily::Independence: return make_fit({}, 0.0, u.size());
    case BicopFamily::Gaussian: return fit_gaussian(u, v);
    case BicopFamily::StudentT: return fit_student(u, v);
    case BicopFamily::Clayton: return fit_clayton(u, v);
    case BicopFamily::Frank: return fit_frank(u, v);
  }
  throw InputError("unknown copula family");
}

BivariateCopulaFit select_bicop(std::span<const double> u, std::span<const double> v, const FamilySet& families) {
  check_inputs(u, v);
  const bool positive = families.contains(BicopFamily::Clayton) && kendall_tau(u, v) > 0.0;
  BivariateCopulaFit best = make_fit({}, 0.0, u.size());
  bool have_parametric = false;
  std::string failures;
  for (auto f : families.members()) {
    if (f == BicopFamily::Clayton && !positive) continue;
    try {
      auto fit = fit_bicop(u, v, f);
      if (!have_parametric || fit.aic < best.aic) {
        best = fit;
        have_parametric = true;
      }
    } catch (const NumericalError& e) {
      failures += std::string(" ") + e.what() + ";";
    }
  }
  if (!have_parametric && !failures.empty()) {
    throw NumericalError("all copula families failed to converge:" + failures);
  }
  if (!have_parametric || best.aic > 0.0) return make_fit({}, 0.0, u.size());
  return best;
}

}  // namespace cdcv
