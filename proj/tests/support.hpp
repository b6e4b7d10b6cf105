#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

// Reference implementations shared by the unit and acceptance tests. They
// use Boost and <random> directly and never call the library's copula code.
namespace oracle {

struct Pair {
  std::vector<double> u, v;
};

inline double phi(double x) { return boost::math::cdf(boost::math::normal(), x); }
inline double phi_inv(double p) { return boost::math::quantile(boost::math::normal(), p); }

inline Pair gaussian_copula(std::size_t n, double rho, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z;
  Pair p;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z(g), b = rho * a + std::sqrt(1 - rho * rho) * z(g);
    p.u.push_back(phi(a));
    p.v.push_back(phi(b));
  }
  return p;
}

inline Pair t_copula(std::size_t n, double rho, double nu, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z;
  std::chi_squared_distribution<double> chi(nu);
  boost::math::students_t t(nu);
  Pair p;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sqrt(nu / chi(g));
    const double a = z(g), b = rho * a + std::sqrt(1 - rho * rho) * z(g);
    p.u.push_back(boost::math::cdf(t, a * s));
    p.v.push_back(boost::math::cdf(t, b * s));
  }
  return p;
}

// Marshall-Olkin frailty construction.
inline Pair clayton_copula(std::size_t n, double theta, unsigned seed) {
  std::mt19937_64 g(seed);
  std::gamma_distribution<double> frailty(1.0 / theta, 1.0);
  std::exponential_distribution<double> e;
  Pair p;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = frailty(g);
    p.u.push_back(std::pow(1.0 + e(g) / w, -1.0 / theta));
    p.v.push_back(std::pow(1.0 + e(g) / w, -1.0 / theta));
  }
  return p;
}

// Conditional inversion with the textbook closed form.
inline Pair frank_copula(std::size_t n, double theta, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Pair p;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = unif(g), w = unif(g);
    const double u =
        -std::log1p(w * std::expm1(-theta) / (w + (1 - w) * std::exp(-theta * v))) / theta;
    p.u.push_back(std::clamp(u, 1e-12, 1 - 1e-12));
    p.v.push_back(v);
  }
  return p;
}

inline Pair independent(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Pair p;
  for (std::size_t i = 0; i < n; ++i) {
    p.u.push_back(unif(g));
    p.v.push_back(unif(g));
  }
  return p;
}

// Bivariate standard normal CDF via Owen's T function.
inline double bvn_cdf(double x, double y, double rho) {
  if (x == 0.0) x = 1e-300;
  if (y == 0.0) y = 1e-300;
  const double s = std::sqrt(1 - rho * rho);
  const double beta = (x * y > 0 || (x * y == 0 && x + y >= 0)) ? 0.0 : 0.5;
  return 0.5 * phi(x) + 0.5 * phi(y) - boost::math::owens_t(x, (y - rho * x) / (x * s)) -
         boost::math::owens_t(y, (x - rho * y) / (y * s)) - beta;
}

inline double gaussian_C(double u, double v, double rho) { return bvn_cdf(phi_inv(u), phi_inv(v), rho); }

// t copula CDF as a chi-square scale mixture of bivariate normals.
inline double t_C(double u, double v, double rho, double nu) {
  boost::math::students_t t(nu);
  boost::math::chi_squared chi(nu);
  const double x = boost::math::quantile(t, u), y = boost::math::quantile(t, v);
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double s = std::sqrt(w / nu);
    return boost::math::pdf(chi, w) * bvn_cdf(x * s, y * s, rho);
  };
  return integrator.integrate(f, 1e-14);
}

inline double clayton_C(double u, double v, double theta) {
  return std::pow(std::pow(u, -theta) + std::pow(v, -theta) - 1.0, -1.0 / theta);
}

inline double frank_C(double u, double v, double theta) {
  return -std::log1p(std::expm1(-theta * u) * std::expm1(-theta * v) / std::expm1(-theta)) / theta;
}

// Kendall tau implied by copula parameters: 2 asin(rho) / pi for the
// elliptical families, theta / (theta + 2) for Clayton and
// 1 - 4 (1 - D1(theta)) / theta for Frank, D1 the first Debye function.
inline double gaussian_tau(double rho) { return 2.0 * std::asin(rho) / M_PI; }
inline double clayton_tau(double theta) { return theta / (theta + 2.0); }
inline double frank_tau(double theta) {
  if (std::abs(theta) < 1e-8) return 0.0;
  const double a = std::abs(theta);
  auto f = [](double t) { return t < 1e-12 ? 1.0 : t / std::expm1(t); };
  const double d1 = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, a) / a;
  return std::copysign(1.0 - 4.0 * (1.0 - d1) / a, theta);
}

// Kolmogorov-Smirnov distance of a sample to Uniform(0, 1).
inline double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, (i + 1) / n - x[i], x[i] - i / n});
  }
  return d;
}

// 1% critical value of the one-sample KS statistic (asymptotic).
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

inline Eigen::MatrixXd columns(const std::vector<std::vector<double>>& cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cols.front().size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < cols[j].size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
  }
  return m;
}

}  // namespace oracle
