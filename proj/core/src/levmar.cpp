#include "cqed/levmar.hpp"

#include <cmath>

namespace cqed::fitting {

LmOutcome lm_fit(const LmProblem& problem, const Eigen::VectorXd& p0,
                 const Eigen::VectorXd& scales, const LmOptions& options) {
  const int n_params = static_cast<int>(p0.size());
  if (problem.n_residuals < n_params) {
    throw InsufficientDataError("lm_fit: fewer residuals than parameters");
  }

  Eigen::VectorXd p = p0;
  Eigen::VectorXd r(problem.n_residuals);
  Eigen::MatrixXd jac(problem.n_residuals, n_params);

  problem.eval(p, r, &jac);
  double chi2 = r.squaredNorm();
  if (!std::isfinite(chi2)) throw FitError("lm_fit: non-finite residuals at start");

  double lambda = options.lambda_init;
  bool converged = false;
  int iter = 0;

  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::VectorXd jtr = jac.transpose() * r;

  auto check_leverage = [&](const Eigen::MatrixXd& a) {
    for (int j = 0; j < n_params; ++j) {
      if (!(a(j, j) > 0.0) || !std::isfinite(a(j, j))) {
        throw SingularJacobianError("lm_fit: parameter " + std::to_string(j) +
                                    " has no leverage on the residuals");
      }
    }
  };
  check_leverage(jtj);

  for (iter = 0; iter < options.max_iterations && !converged; ++iter) {
    Eigen::MatrixXd damped = jtj;
    for (int j = 0; j < n_params; ++j) damped(j, j) += lambda * jtj(j, j);

    Eigen::VectorXd step = damped.ldlt().solve(-jtr);
    if (!step.allFinite()) {
      throw SingularJacobianError("lm_fit: normal equations are singular");
    }

    Eigen::VectorXd p_try = p + step;
    Eigen::VectorXd r_try(problem.n_residuals);
    problem.eval(p_try, r_try, nullptr);
    double chi2_try = r_try.squaredNorm();

    if (std::isfinite(chi2_try) && chi2_try <= chi2) {
      double rel_step = 0.0;
      for (int j = 0; j < n_params; ++j) {
        rel_step = std::max(rel_step, std::fabs(step[j]) / scales[j]);
      }
      double rel_drop = (chi2 - chi2_try) / std::max(chi2, 1e-300);

      p = p_try;
      problem.eval(p, r, &jac);
      chi2 = r.squaredNorm();
      jtj = jac.transpose() * jac;
      jtr = jac.transpose() * r;
      check_leverage(jtj);
      lambda = std::max(lambda / 3.0, 1e-12);

      if (rel_step < options.step_tol || rel_drop < options.chi2_tol) {
        converged = true;
      }
    } else {
      lambda *= 3.0;
      if (lambda > 1e14) break;  // no descent direction left
    }
  }

  LmOutcome out;
  out.params = p;
  out.chi2 = chi2;
  out.iterations = iter;
  out.converged = converged;
  out.covariance = jtj.ldlt().solve(
      Eigen::MatrixXd::Identity(n_params, n_params));
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& p, const Eigen::VectorXd& scales, int n_residuals) {
  const int n_params = static_cast<int>(p.size());
  Eigen::MatrixXd jac(n_residuals, n_params);
  Eigen::VectorXd rp(n_residuals), rm(n_residuals);
  for (int j = 0; j < n_params; ++j) {
    double h = 6e-6 * scales[j];
    Eigen::VectorXd pp = p, pm = p;
    pp[j] += h;
    pm[j] -= h;
    residuals(pp, rp);
    residuals(pm, rm);
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

}  // namespace cqed::fitting
