#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cdcv::optim {

using Objective = std::function<double(std::span<const double>)>;

struct Result {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct BfgsOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-6;      // stop when the accepted step is shorter than this
  double gradient_tolerance = 1e-8;  // or the gradient max-norm falls below this
  double fd_step = 1e-5;
};

/// Quasi-Newton minimisation with central-difference gradients and Armijo
/// backtracking. Intended for smooth, low-dimensional likelihoods expressed
/// in unconstrained (transformed) coordinates. Non-finite objective values
/// are treated as +inf and rejected by the line search.
Result minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options = {});

/// Brent minimisation of a scalar function on [lo, hi].
Result minimize_brent(const std::function<double(double)>& f, double lo, double hi,
                      int bits = 40, int max_iterations = 200);

}  // namespace cdcv::optim
