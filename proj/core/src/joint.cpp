#include "cdcv/joint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cdcv/bicop.hpp"
#include "cdcv/error.hpp"
#include "cdcv/optim.hpp"
#include "cdcv/panel.hpp"
#include "cdcv/rank.hpp"
#include "cdcv/special.hpp"

namespace cdcv {
namespace {

constexpr double kMinNu = 2.1;
constexpr double kMaxNu = 50.0;

double clamp01(double u) { return std::clamp(u, kClamp, 1.0 - kClamp); }

struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_det = 0.0;
};

Factor factorize(const Eigen::MatrixXd& corr) {
  Factor f{Eigen::LLT<Eigen::MatrixXd>(corr), 0.0};
  if (f.llt.info() != Eigen::Success) throw NumericalError("joint copula: correlation matrix is not positive definite");
  const Eigen::MatrixXd& l = f.llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) f.log_det += 2.0 * std::log(l(i, i));
  return f;
}

// Quadratic forms z' R^-1 z for every row of z.
Eigen::VectorXd quad_forms(const Factor& f, const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd y = f.llt.matrixL().solve(z.transpose());
  return y.colwise().squaredNorm().transpose();
}

double gaussian_loglik(const Factor& f, const Eigen::MatrixXd& u) {
  Eigen::MatrixXd z(u.rows(), u.cols());
  for (Eigen::Index t = 0; t < u.rows(); ++t) {
    for (Eigen::Index i = 0; i < u.cols(); ++i) z(t, i) = special::norm_quantile(clamp01(u(t, i)));
  }
  const Eigen::VectorXd q = quad_forms(f, z);
  const double n = static_cast<double>(u.rows());
  return -0.5 * n * f.log_det - 0.5 * (q.sum() - z.squaredNorm());
}

double student_loglik(const Factor& f, double nu, const Eigen::MatrixXd& u) {
  const double d = static_cast<double>(u.cols());
  Eigen::MatrixXd z(u.rows(), u.cols());
  double marg = 0.0;
  for (Eigen::Index t = 0; t < u.rows(); ++t) {
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      const double x = special::t_quantile(clamp01(u(t, i)), nu);
      z(t, i) = x;
      marg += std::log1p(x * x / nu);
    }
  }
  const Eigen::VectorXd q = quad_forms(f, z);
  const double log_norm = special::lgamma(0.5 * (nu + d)) + (d - 1.0) * special::lgamma(0.5 * nu) -
                          d * special::lgamma(0.5 * (nu + 1.0));
  double acc = 0.0;
  for (Eigen::Index t = 0; t < q.size(); ++t) acc += std::log1p(q(t) / nu);
  const double n = static_cast<double>(u.rows());
  return n * (log_norm - 0.5 * f.log_det) - 0.5 * (nu + d) * acc + 0.5 * (nu + 1.0) * marg;
}

}  // namespace

std::string_view to_string(JointFamily f) { return f == JointFamily::Gaussian ? "Gaussian" : "StudentT"; }

JointFamily joint_family_from_string(std::string_view s) {
  if (s == "Gaussian") return JointFamily::Gaussian;
  if (s == "StudentT") return JointFamily::StudentT;
  throw InputError("unknown joint copula family '" + std::string(s) + "'");
}

int JointCopulaFit::parameter_count() const {
  const int d = static_cast<int>(dimension());
  return d * (d - 1) / 2 + (family == JointFamily::StudentT ? 1 : 0);
}

void JointCopulaFit::validate() const {
  if (corr.rows() < 1 || corr.rows() != corr.cols()) throw InputError("joint copula: correlation matrix must be square");
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-9) throw InputError("joint copula: correlation diagonal must be 1");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(corr(i, j) - corr(j, i)) > 1e-12) throw InputError("joint copula: correlation matrix not symmetric");
    }
  }
  if (Eigen::LLT<Eigen::MatrixXd>(corr).info() != Eigen::Success) {
    throw InputError("joint copula: correlation matrix not positive definite");
  }
  if (family == JointFamily::StudentT && !(nu > 2.0)) throw InputError("joint copula: nu must be > 2");
}

Eigen::MatrixXd nearest_correlation(const Eigen::MatrixXd& r, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (r + r.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("correlation projection: eigen decomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd a = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd s = a.diagonal().cwiseSqrt().cwiseInverse();
  a = s.asDiagonal() * a * s.asDiagonal();
  a = 0.5 * (a + a.transpose());
  a.diagonal().setOnes();
  return a;
}

double joint_loglik(JointFamily family, const Eigen::MatrixXd& corr, double nu, const Eigen::MatrixXd& u) {
  const Factor f = factorize(corr);
  return family == JointFamily::Gaussian ? gaussian_loglik(f, u) : student_loglik(f, nu, u);
}

JointCopulaFit fit_joint(const Eigen::MatrixXd& u, bool allow_student) {
  const Eigen::Index d = u.cols();
  if (d < 2) throw InputError("fit_joint: need at least 2 columns");
  if (u.rows() < 2) throw InputError("fit_joint: need at least 2 observations");
  if (!((u.array() > 0.0).all() && (u.array() < 1.0).all())) throw InputError("fit_joint: values must lie in (0, 1)");

  std::vector<std::vector<double>> cols(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) cols[i] = column(u, i);
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      r(i, j) = r(j, i) = std::sin(std::numbers::pi / 2.0 * kendall_tau(cols[i], cols[j]));
    }
  }
  JointCopulaFit g;
  g.corr = nearest_correlation(r);
  g.n_obs = static_cast<std::size_t>(u.rows());
  const Factor f = factorize(g.corr);
  g.loglik = gaussian_loglik(f, u);
  g.aic = 2.0 * g.parameter_count() - 2.0 * g.loglik;
  if (!std::isfinite(g.loglik)) throw NumericalError("fit_joint: Gaussian log-likelihood is not finite");
  if (!allow_student) return g;

  const auto best = optim::minimize_brent([&](double nu) { return -student_loglik(f, nu, u); }, kMinNu, kMaxNu, 16);
  JointCopulaFit t = g;
  t.family = JointFamily::StudentT;
  t.nu = best.x[0];
  t.loglik = -best.value;
  t.aic = 2.0 * t.parameter_count() - 2.0 * t.loglik;
  if (std::isfinite(t.loglik) && t.aic < g.aic) return t;
  return g;
}

double joint_log_density(const JointCopulaFit& fit, std::span<const double> u) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = u[i];
  if (u.size() != fit.dimension()) throw InputError("joint density: point dimension differs from the copula");
  return joint_loglik(fit.family, fit.corr, fit.nu, row);
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& corr) {
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) throw NumericalError("joint copula: correlation matrix is not positive definite");
  return llt.matrixL();
}

void joint_draw(const JointCopulaFit& fit, const Eigen::MatrixXd& chol, Rng& rng, std::span<double> out) {
  const Eigen::Index d = chol.rows();
  Eigen::VectorXd n(d);
  for (Eigen::Index i = 0; i < d; ++i) n(i) = rng.normal();
  const Eigen::VectorXd z = chol.triangularView<Eigen::Lower>() * n;
  if (fit.family == JointFamily::Gaussian) {
    for (Eigen::Index i = 0; i < d; ++i) out[i] = clamp01(special::norm_cdf(z(i)));
    return;
  }
  const double scale = 1.0 / std::sqrt(rng.chi_square(fit.nu) / fit.nu);
  for (Eigen::Index i = 0; i < d; ++i) out[i] = clamp01(special::t_cdf(z(i) * scale, fit.nu));
}

}  // namespace cdcv
