#include "cdcv/special.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

namespace cdcv::special {

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double, Policy>(), p);
}

double lgamma(double x);

double t_log_pdf(double x, double nu) {
  return lgamma(0.5 * (nu + 1.0)) - lgamma(0.5 * nu) -
         0.5 * std::log(nu * std::numbers::pi) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double t_cdf(double x, double nu) {
  return boost::math::cdf(boost::math::students_t_distribution<double, Policy>(nu), x);
}

double t_quantile(double p, double nu) {
  return boost::math::quantile(boost::math::students_t_distribution<double, Policy>(nu), p);
}

double lgamma(double x) { return boost::math::lgamma(x, Policy()); }

double chi2_1df_upper_tail(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * x));
}

}  // namespace cdcv::special
