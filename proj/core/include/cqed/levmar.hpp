#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace cqed::fitting {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularJacobianError : FitError {
  using FitError::FitError;
};
struct InsufficientDataError : FitError {
  using FitError::FitError;
};
struct EmptyAfterRejectionError : FitError {
  using FitError::FitError;
};

// Weighted residual problem: chi2(p) = |r(p)|^2. eval fills r and, when jac
// is non-null, J_ij = d r_i / d p_j.
struct LmProblem {
  int n_residuals = 0;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd*)>
      eval;
};

struct LmOptions {
  int max_iterations = 200;
  double step_tol = 1e-10;   // relative parameter step
  double chi2_tol = 1e-12;   // relative chi^2 decrease
  double lambda_init = 1e-3;
};

struct LmOutcome {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // (J^T J)^-1 at the optimum
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped Gauss-Newton (Marquardt diagonal damping). `scales` holds typical
// per-parameter magnitudes used for the relative-step criterion; throws
// SingularJacobianError when a parameter has no leverage on the residuals.
LmOutcome lm_fit(const LmProblem& problem, const Eigen::VectorXd& p0,
                 const Eigen::VectorXd& scales, const LmOptions& options = {});

// Central-difference Jacobian for models without a closed form.
Eigen::MatrixXd finite_difference_jacobian(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& p, const Eigen::VectorXd& scales, int n_residuals);

}  // namespace cqed::fitting
