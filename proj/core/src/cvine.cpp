#include "cdcv/cvine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdcv/error.hpp"
#include "cdcv/panel.hpp"
#include "cdcv/parallel.hpp"
#include "cdcv/rng.hpp"

namespace cdcv {

double CVineModel::loglik() const {
  double s = 0.0;
  for (const auto& tree : pairs) {
    for (const auto& p : tree) s += p.loglik;
  }
  return s;
}

int CVineModel::parameter_count() const {
  int k = 0;
  for (const auto& tree : pairs) {
    for (const auto& p : tree) k += cdcv::parameter_count(p.copula.family);
  }
  return k;
}

void CVineModel::validate() const {
  const std::size_t n = ordering.size();
  if (n < 2) throw InputError("C-vine: need at least 2 variables");
  std::vector<std::size_t> sorted = ordering;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (sorted[i] != i) throw InputError("C-vine: ordering is not a permutation");
  }
  if (pairs.size() != n - 1) throw InputError("C-vine: expected n - 1 trees");
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (pairs[j].size() != n - 1 - j) throw InputError("C-vine: tree " + std::to_string(j) + " has the wrong size");
    for (const auto& p : pairs[j]) p.copula.validate();
  }
}

CVineModel fit_cvine(const Eigen::MatrixXd& u, std::vector<std::size_t> ordering, const FamilySet& families) {
  const auto n = static_cast<std::size_t>(u.cols());
  if (ordering.empty()) {
    ordering.resize(n);
    std::iota(ordering.begin(), ordering.end(), 0);
  }
  if (ordering.size() != n) throw InputError("fit_cvine: ordering length differs from column count");
  CVineModel model;
  model.ordering = ordering;
  model.pairs.resize(n > 0 ? n - 1 : 0);
  for (std::size_t j = 0; j + 1 < n; ++j) model.pairs[j].resize(n - 1 - j);
  model.validate();

  std::vector<std::vector<double>> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = column(u, static_cast<Eigen::Index>(ordering[i]));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    parallel_for(n - 1 - j, [&](std::size_t k) {
      const std::size_t i = j + 1 + k;
      auto fit = select_bicop(x[i], x[j], families);
      x[i] = h_series(fit.copula, x[i], x[j]);
      model.pairs[j][k] = std::move(fit);
    });
  }
  return model;
}

double cvine_log_density(const CVineModel& model, std::span<const double> u) {
  const std::size_t n = model.dimension();
  if (u.size() != n) throw InputError("cvine_density: point dimension differs from the model");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u[model.ordering[i]] > 0.0 && u[model.ordering[i]] < 1.0)) {
      throw InputError("cvine_density: coordinates must lie in (0, 1)");
    }
    v[i] = u[model.ordering[i]];
  }
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto& c = model.pair(j, i);
      s += copula_log_density(c, v[i], v[j]);
      v[i] = h(c, v[i], v[j]);
    }
  }
  return s;
}

double cvine_density(const CVineModel& model, std::span<const double> u) {
  return std::exp(cvine_log_density(model, u));
}

double cvine_loglik(const CVineModel& model, const Eigen::MatrixXd& u) {
  if (static_cast<std::size_t>(u.cols()) != model.dimension()) {
    throw InputError("cvine_loglik: column count differs from the model");
  }
  std::vector<double> row(model.dimension());
  double s = 0.0;
  for (Eigen::Index t = 0; t < u.rows(); ++t) {
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = u(t, static_cast<Eigen::Index>(i));
    s += cvine_log_density(model, row);
  }
  return s;
}

void cvine_transform(const CVineModel& model, std::span<const double> w, std::span<double> out) {
  const std::size_t n = model.dimension();
  // v[i][j]: variable i conditioned on positions 0..j-1.
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double x = w[i];
    for (std::size_t k = i; k-- > 0;) x = h_inv(model.pair(k, i), x, v[k][k]);
    v[i][0] = x;
    out[model.ordering[i]] = x;
    for (std::size_t j = 0; j < i; ++j) v[i][j + 1] = h(model.pair(j, i), v[i][j], v[j][j]);
  }
}

Eigen::MatrixXd simulate_cvine(const CVineModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  const std::size_t d = model.dimension();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  parallel_for(n, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    std::vector<double> w(d), x(d);
    for (auto& wi : w) wi = rng.uniform();
    cvine_transform(model, w, x);
    for (std::size_t i = 0; i < d; ++i) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = x[i];
  });
  return out;
}

}  // namespace cdcv
