#pragma once

#include <boost/math/policies/policy.hpp>

// Thin wrappers over Boost.Math with double promotion disabled; the default
// policy evaluates in long double, which is several times slower and buys
// nothing at the tolerances used here.
namespace cdcv::special {

using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>,
                                             boost::math::policies::promote_float<false>>;

double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

double t_log_pdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

/// log Γ(x)
double lgamma(double x);

/// Upper tail probability of a chi-square variable with one degree of freedom.
double chi2_1df_upper_tail(double x);

}  // namespace cdcv::special
