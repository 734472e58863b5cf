#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cqed/levmar.hpp"
#include "cqed/spectra.hpp"

namespace cqed::fitting {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::VectorXd sigmas;
  Eigen::MatrixXd covariance;
  double chi2_reduced = 0.0;
  bool converged = false;
  bool degenerate = false;  // bi-exponential collapsed onto a single rate
  int iterations = 0;

  int index(const std::string& name) const;
  double param(const std::string& name) const;
  double sigma(const std::string& name) const;
};

// Broadband Lorentzian-plus-quadratic-background fit with shot-noise weights
// w_i = 1/max(counts_i, 1). Free: a, f0, kappa, b0, b1, b2; the detector
// baseline is fixed from the init model.
FitResult fit_broadband(const spectra::SampledSpectrum& spectrum,
                        const spectra::BroadbandModel& init);

// Generic-data variant for callers holding real-valued intensities.
FitResult fit_broadband(std::span<const double> freqs_hz,
                        std::span<const double> y, std::span<const double> sigma,
                        const spectra::BroadbandModel& init);

// Cavity parameters held fixed from a prior broadband fit.
struct DitFixed {
  double kappa_i_hz = 0.0;
  double kappa_c_hz = 0.0;
  double bg_r0 = 0.0;
  double bg_r1 = 0.0;  // per Hz
  double bg_r2 = 0.0;  // per Hz^2
  scattering::Geometry geometry = scattering::Geometry::kDrop;
};

// Narrow-scan fit of the two-level model; spectrum frequencies are drive
// detunings relative to the broadband cavity center. Free: g, gamma, Delta
// and the Fabry-Perot envelope (fp0, fp1, fp2).
FitResult fit_dit(const spectra::SampledSpectrum& spectrum, const DitFixed& fixed,
                  double g_init_hz, double gamma_init_hz, double delta_init_hz,
                  const spectra::FabryPerot& fp_init = {});

FitResult fit_dit(std::span<const double> detunings_hz, std::span<const double> y,
                  std::span<const double> sigma, const DitFixed& fixed,
                  double g_init_hz, double gamma_init_hz, double delta_init_hz,
                  const spectra::FabryPerot& fp_init = {});

// Derived C = 4 g^2 / (kappa gamma) with covariance-propagated uncertainty.
struct DerivedCooperativity {
  double c;
  double sigma;
};
DerivedCooperativity dit_cooperativity(const FitResult& fit, double kappa_hz);

struct LinewidthPoint {
  double detuning_hz;
  double gamma_eff_hz;
  double sigma_hz;
};

// gamma_eff(Delta) = gamma + gamma_cav (kappa^2/4)/(Delta^2 + kappa^2/4).
// With fit_kappa the cavity linewidth is a third free parameter.
FitResult fit_lineshape_vs_detuning(std::span<const LinewidthPoint> points,
                                    double kappa_hz, bool fit_kappa = false);

enum class DecayModel { kSingle, kBi };

struct DecayPoint {
  double t_s;
  double y;
  double sigma;
};

// single: y = y_inf - A exp(-t/T1)
// bi:     y = y_inf - A1 exp(-t/tau1) - A2 exp(-t/tau2)
FitResult fit_exponential_recovery(std::span<const DecayPoint> points,
                                   DecayModel model);

struct Estimate {
  double mu;
  double sigma;
};

struct PooledEstimate {
  double mean = 0.0;
  double sigma = 0.0;
  int n_used = 0;
  int n_rejected = 0;
};

// Inverse-variance weighted mean with sigma_bar = (sum sigma_j^-2)^(-1/2).
// Estimates failing the reject predicate are dropped; throws
// EmptyAfterRejectionError when nothing survives.
PooledEstimate pool(std::span<const Estimate> estimates,
                    const std::function<bool(const Estimate&)>& reject = nullptr);

// Default scan-quality gate: drop non-converged fits and chi2_reduced > 3.
bool scan_rejected(const FitResult& fit, double chi2_max = 3.0);

namespace detail {

// Assembled weighted-residual problems in the internal nondimensionalized
// parameter space (data copied in). Exposed so tests can check the analytic
// Jacobians against finite differences.
struct AssembledProblem {
  LmProblem problem;
  Eigen::VectorXd p0;
  Eigen::VectorXd scales;
};

AssembledProblem broadband_problem(std::span<const double> freqs_hz,
                                   std::span<const double> y,
                                   std::span<const double> sigma,
                                   const spectra::BroadbandModel& init);
AssembledProblem dit_problem(std::span<const double> detunings_hz,
                             std::span<const double> y,
                             std::span<const double> sigma, const DitFixed& fixed,
                             double g_init_hz, double gamma_init_hz,
                             double delta_init_hz,
                             const spectra::FabryPerot& fp_init);
AssembledProblem lineshape_problem(std::span<const LinewidthPoint> points,
                                   double kappa_hz, bool fit_kappa);
AssembledProblem decay_problem(std::span<const DecayPoint> points,
                               DecayModel model);

}  // namespace detail

}  // namespace cqed::fitting
