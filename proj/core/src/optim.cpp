#include "cdcv/optim.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

namespace cdcv::optim {
namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

std::vector<double> gradient(const Objective& f, std::vector<double> x, double f0, double h0) {
  const std::size_t n = x.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = h0 * std::max(1.0, std::abs(x[i]));
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = safe_eval(f, x);
    x[i] = xi - h;
    const double fm = safe_eval(f, x);
    x[i] = xi;
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[i] = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g[i] = (fp - f0) / h;
    } else if (std::isfinite(fm)) {
      g[i] = (f0 - fm) / h;
    } else {
      g[i] = 0.0;
    }
  }
  return g;
}

}  // namespace

Result minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options) {
  const std::size_t n = x0.size();
  Result result;
  result.x = std::move(x0);
  double fx = safe_eval(f, result.x);
  if (!std::isfinite(fx)) {
    result.value = fx;
    return result;
  }
  std::vector<double> g = gradient(f, result.x, fx, options.fd_step);
  // Inverse Hessian approximation, row-major n x n.
  std::vector<double> H(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

  std::vector<double> dir(n), xn(n), s(n), y(n), Hy(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    double gmax = 0.0;
    for (double gi : g) gmax = std::max(gmax, std::abs(gi));
    if (gmax < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc -= H[i * n + j] * g[j];
      dir[i] = acc;
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
    if (slope >= 0.0) {
      // Lost descent: reset to steepest descent.
      std::fill(H.begin(), H.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        H[i * n + i] = 1.0;
        dir[i] = -g[i];
      }
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope -= g[i] * g[i];
    }
    // Cap the trial step so a poor curvature estimate cannot jump far.
    double dnorm = 0.0;
    for (double d : dir) dnorm += d * d;
    dnorm = std::sqrt(dnorm);
    double alpha = dnorm > 5.0 ? 5.0 / dnorm : 1.0;
    double fn = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = result.x[i] + alpha * dir[i];
      fn = safe_eval(f, xn);
      if (fn <= fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // No decrease along the search direction: at a (numerical) minimum.
      result.converged = gmax < 1e-4;
      break;
    }
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - result.x[i];
      step = std::max(step, std::abs(s[i]));
    }
    std::vector<double> gn = gradient(f, xn, fn, options.fd_step);
    for (std::size_t i = 0; i < n; ++i) y[i] = gn[i] - g[i];
    result.x = xn;
    const double fprev = fx;
    fx = fn;
    g = std::move(gn);
    if (step < options.step_tolerance || std::abs(fprev - fx) < 1e-12 * (1.0 + std::abs(fx))) {
      result.converged = true;
      break;
    }
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sy += s[i] * y[i];
    if (sy > 1e-12) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += H[i * n + j] * y[j];
        Hy[i] = acc;
      }
      double yHy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yHy += y[i] * Hy[i];
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i * n + j] += rho * ((1.0 + rho * yHy) * s[i] * s[j] - Hy[i] * s[j] - s[i] * Hy[j]);
        }
      }
    }
  }
  result.value = fx;
  return result;
}

Result minimize_brent(const std::function<double(double)>& f, double lo, double hi, int bits,
                      int max_iterations) {
  auto guarded = [&](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iterations);
  const auto [x, v] = boost::math::tools::brent_find_minima(guarded, lo, hi, bits, iters);
  Result result;
  result.x = {x};
  result.value = v;
  result.iterations = static_cast<int>(iters);
  result.converged = static_cast<int>(iters) < max_iterations && std::isfinite(f(x));
  return result;
}

}  // namespace cdcv::optim
