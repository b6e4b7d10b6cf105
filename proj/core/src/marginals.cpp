#include "cdcv/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "cdcv/error.hpp"
#include "cdcv/optim.hpp"
#include "cdcv/special.hpp"

namespace cdcv {
namespace {

constexpr double kClamp = 1e-10;

double nu_from_raw(double eta) {
  const double s = 1.0 / (1.0 + std::exp(-eta));
  return MarginalFit::kMinNu + (MarginalFit::kMaxNu - MarginalFit::kMinNu) * s;
}

double raw_from_nu(double nu) {
  const double s = (nu - MarginalFit::kMinNu) / (MarginalFit::kMaxNu - MarginalFit::kMinNu);
  return std::log(s / (1.0 - s));
}

/// Standardised log density of the (skew) t at z, excluding the -log(scale) term.
struct TKernel {
  double nu;
  double log_norm;

  explicit TKernel(double nu_)
      : nu(nu_),
        log_norm(special::lgamma(0.5 * (nu_ + 1.0)) - special::lgamma(0.5 * nu_) -
                 0.5 * std::log(nu_ * std::numbers::pi)) {}

  double operator()(double z) const { return log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu); }
};

double skew_t_log_pdf_std(double z, double nu, double gamma) {
  const double zz = z >= 0.0 ? z / gamma : z * gamma;
  return std::log(2.0 / (gamma + 1.0 / gamma)) + special::t_log_pdf(zz, nu);
}

double skew_t_cdf_std(double z, double nu, double gamma) {
  const double g2 = gamma * gamma;
  if (z < 0.0) return 2.0 / (g2 + 1.0) * special::t_cdf(gamma * z, nu);
  // 1 - F written via the upper tail to keep precision for large z.
  return 1.0 - 2.0 * g2 / (1.0 + g2) * special::t_cdf(-z / gamma, nu);
}

double skew_t_quantile_std(double p, double nu, double gamma) {
  const double g2 = gamma * gamma;
  const double p0 = 1.0 / (1.0 + g2);
  if (p < p0) return special::t_quantile(0.5 * p * (1.0 + g2), nu) / gamma;
  return -gamma * special::t_quantile(0.5 * (1.0 - p) * (1.0 + g2) / g2, nu);
}

struct Standardised {
  std::vector<double> z;
  double mean = 0.0;
  double sd = 1.0;
};

Standardised standardise(std::span<const double> x) {
  Standardised s;
  const auto n = static_cast<double>(x.size());
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / n);
  s.z.reserve(x.size());
  for (double v : x) s.z.push_back((v - s.mean) / s.sd);
  return s;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

MarginalFit finish(MarginalFit fit, const Standardised& s, double loglik_std, std::size_t n) {
  // Map back from the standardised problem: x = mean + sd * z.
  fit.location = s.mean + s.sd * fit.location;
  fit.scale = s.sd * fit.scale;
  fit.loglik = loglik_std - static_cast<double>(n) * std::log(s.sd);
  fit.aic = 2.0 * parameter_count(fit.family) - 2.0 * fit.loglik;
  fit.n_obs = n;
  return fit;
}

double t_neg_loglik(const std::vector<double>& z, double mu, double log_s, double nu) {
  const TKernel k(nu);
  const double s = std::exp(log_s);
  double acc = 0.0;
  for (double v : z) acc += k((v - mu) / s);
  return -(acc - static_cast<double>(z.size()) * log_s);
}

double skew_t_neg_loglik(const std::vector<double>& z, double mu, double log_s, double nu,
                         double gamma) {
  const TKernel k(nu);
  const double s = std::exp(log_s);
  const double log_c = std::log(2.0 / (gamma + 1.0 / gamma));
  double acc = 0.0;
  for (double v : z) {
    const double u = (v - mu) / s;
    acc += k(u >= 0.0 ? u / gamma : u * gamma);
  }
  return -(acc + static_cast<double>(z.size()) * (log_c - log_s));
}

MarginalFit fit_student(const Standardised& s) {
  const double mu0 = median(s.z);
  optim::Result best;
  best.value = std::numeric_limits<double>::infinity();
  for (double nu0 : {5.0, 20.0}) {
    const double s0 = std::sqrt((nu0 - 2.0) / nu0);
    auto f = [&](std::span<const double> p) { return t_neg_loglik(s.z, p[0], p[1], nu_from_raw(p[2])); };
    auto r = optim::minimize_bfgs(f, {mu0, std::log(s0), raw_from_nu(nu0)});
    if (std::isfinite(r.value) && r.value < best.value) best = r;
  }
  if (!std::isfinite(best.value)) throw NumericalError("StudentT marginal fit failed");
  MarginalFit fit;
  fit.family = MarginalFamily::StudentT;
  fit.location = best.x[0];
  fit.scale = std::exp(best.x[1]);
  fit.nu = nu_from_raw(best.x[2]);
  return finish(fit, s, -best.value, s.z.size());
}

MarginalFit fit_skew_student(const Standardised& s, const MarginalFit& sym_std) {
  optim::Result best;
  best.value = std::numeric_limits<double>::infinity();
  const double mu0 = (sym_std.location - s.mean) / s.sd;
  const double ls0 = std::log(sym_std.scale / s.sd);
  for (double g0 : {1.0, 0.8, 1.25}) {
    auto f = [&](std::span<const double> p) {
      return skew_t_neg_loglik(s.z, p[0], p[1], nu_from_raw(p[2]), std::exp(p[3]));
    };
    auto r = optim::minimize_bfgs(f, {mu0, ls0, raw_from_nu(sym_std.nu), std::log(g0)});
    if (std::isfinite(r.value) && r.value < best.value - 1e-9) best = r;
  }
  if (!std::isfinite(best.value)) throw NumericalError("SkewStudentT marginal fit failed");
  MarginalFit fit;
  fit.family = MarginalFamily::SkewStudentT;
  fit.location = best.x[0];
  fit.scale = std::exp(best.x[1]);
  fit.nu = nu_from_raw(best.x[2]);
  fit.gamma = std::exp(best.x[3]);
  return finish(fit, s, -best.value, s.z.size());
}

void check_series(std::span<const double> series) {
  if (series.size() < 30) {
    throw InputError("marginal fitting needs at least 30 observations, got " +
                     std::to_string(series.size()));
  }
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) throw InputError("cannot fit a marginal to a constant series");
  for (double v : series) {
    if (!std::isfinite(v)) throw InputError("non-finite value in series");
  }
}

}  // namespace

std::string_view to_string(MarginalFamily f) {
  switch (f) {
    case MarginalFamily::Normal: return "Normal";
    case MarginalFamily::StudentT: return "StudentT";
    case MarginalFamily::SkewStudentT: return "SkewStudentT";
  }
  return "?";
}

MarginalFamily marginal_family_from_string(std::string_view s) {
  for (auto f : {MarginalFamily::Normal, MarginalFamily::StudentT, MarginalFamily::SkewStudentT}) {
    if (to_string(f) == s) return f;
  }
  throw InputError("unknown marginal family '" + std::string(s) + "'");
}

int parameter_count(MarginalFamily f) {
  switch (f) {
    case MarginalFamily::Normal: return 2;
    case MarginalFamily::StudentT: return 3;
    case MarginalFamily::SkewStudentT: return 4;
  }
  return 0;
}

void MarginalFit::validate() const {
  if (!(scale > 0.0) || !std::isfinite(location)) throw InputError("marginal: scale must be > 0");
  if (family != MarginalFamily::Normal && !(nu > 2.0)) throw InputError("marginal: nu must be > 2");
  if (family == MarginalFamily::SkewStudentT && !(gamma > 0.0)) {
    throw InputError("marginal: skew must be > 0");
  }
}

MarginalFit make_marginal(MarginalFamily family, double location, double scale, double nu,
                          double gamma) {
  MarginalFit fit;
  fit.family = family;
  fit.location = location;
  fit.scale = scale;
  fit.nu = family == MarginalFamily::Normal ? 0.0 : nu;
  fit.gamma = family == MarginalFamily::SkewStudentT ? gamma : 1.0;
  fit.validate();
  return fit;
}

double marginal_log_pdf(const MarginalFit& fit, double x) {
  const double z = (x - fit.location) / fit.scale;
  const double log_s = std::log(fit.scale);
  switch (fit.family) {
    case MarginalFamily::Normal:
      return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) - log_s;
    case MarginalFamily::StudentT: return special::t_log_pdf(z, fit.nu) - log_s;
    case MarginalFamily::SkewStudentT: return skew_t_log_pdf_std(z, fit.nu, fit.gamma) - log_s;
  }
  return 0.0;
}

double marginal_cdf(const MarginalFit& fit, double x) {
  const double z = (x - fit.location) / fit.scale;
  switch (fit.family) {
    case MarginalFamily::Normal: return special::norm_cdf(z);
    case MarginalFamily::StudentT: return special::t_cdf(z, fit.nu);
    case MarginalFamily::SkewStudentT: return skew_t_cdf_std(z, fit.nu, fit.gamma);
  }
  return 0.0;
}

double marginal_quantile(const MarginalFit& fit, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw InputError("marginal_quantile: probability must lie in (0, 1), got " + std::to_string(u));
  }
  double z = 0.0;
  switch (fit.family) {
    case MarginalFamily::Normal: z = special::norm_quantile(u); break;
    case MarginalFamily::StudentT: z = special::t_quantile(u, fit.nu); break;
    case MarginalFamily::SkewStudentT: z = skew_t_quantile_std(u, fit.nu, fit.gamma); break;
  }
  return fit.location + fit.scale * z;
}

MarginalFit fit_marginal_family(std::span<const double> series, MarginalFamily family) {
  check_series(series);
  const Standardised s = standardise(series);
  if (family == MarginalFamily::Normal) {
    // Closed-form MLE: on standardised data mu = 0 and sigma = 1.
    MarginalFit fit;
    fit.family = MarginalFamily::Normal;
    fit.location = 0.0;
    fit.scale = 1.0;
    const double n = static_cast<double>(series.size());
    const double ll = -0.5 * n * (std::log(2.0 * std::numbers::pi) + 1.0);
    return finish(fit, s, ll, series.size());
  }
  MarginalFit t = fit_student(s);
  if (family == MarginalFamily::StudentT) return t;
  return fit_skew_student(s, t);
}

MarginalFit fit_marginal(std::span<const double> series) {
  check_series(series);
  const Standardised s = standardise(series);
  std::vector<MarginalFit> candidates;
  std::ostringstream diagnostics;
  candidates.push_back(fit_marginal_family(series, MarginalFamily::Normal));
  MarginalFit t;
  bool have_t = false;
  try {
    t = fit_student(s);
    candidates.push_back(t);
    have_t = true;
  } catch (const NumericalError& e) {
    diagnostics << " StudentT: " << e.what() << ';';
  }
  if (have_t) {
    try {
      candidates.push_back(fit_skew_student(s, t));
    } catch (const NumericalError& e) {
      diagnostics << " SkewStudentT: " << e.what() << ';';
    }
  }
  const MarginalFit* best = nullptr;
  for (const auto& c : candidates) {
    if (!std::isfinite(c.aic)) continue;
    // Candidates are in increasing parameter count, so strict < keeps the simpler one on ties.
    if (best == nullptr || c.aic < best->aic) best = &c;
  }
  if (best == nullptr) throw NumericalError("all marginal families failed:" + diagnostics.str());
  return *best;
}

Eigen::MatrixXd pit(const Eigen::MatrixXd& returns, std::span<const MarginalFit> fits) {
  if (static_cast<std::size_t>(returns.cols()) != fits.size()) {
    throw InputError("pit: " + std::to_string(fits.size()) + " fits for " +
                     std::to_string(returns.cols()) + " columns");
  }
  Eigen::MatrixXd u(returns.rows(), returns.cols());
  for (Eigen::Index j = 0; j < returns.cols(); ++j) {
    const auto& f = fits[static_cast<std::size_t>(j)];
    for (Eigen::Index t = 0; t < returns.rows(); ++t) {
      u(t, j) = std::clamp(marginal_cdf(f, returns(t, j)), kClamp, 1.0 - kClamp);
    }
  }
  return u;
}

}  // namespace cdcv
