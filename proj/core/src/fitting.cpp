#include "cqed/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>

namespace cqed::fitting {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

Eigen::VectorXd shot_noise_sigma(const std::vector<long long>& counts) {
  Eigen::VectorXd sigma(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    sigma[i] = std::sqrt(static_cast<double>(std::max<long long>(counts[i], 1)));
  }
  return sigma;
}

FitResult finish(const LmOutcome& outcome, std::vector<std::string> names,
                 int n_points) {
  FitResult fit;
  fit.names = std::move(names);
  fit.params = outcome.params;
  fit.covariance = outcome.covariance;
  fit.sigmas = outcome.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  int dof = n_points - static_cast<int>(outcome.params.size());
  fit.chi2_reduced = dof > 0 ? outcome.chi2 / dof : 0.0;
  fit.converged = outcome.converged;
  fit.iterations = outcome.iterations;
  return fit;
}

// Linear map of params and covariance from the internal nondimensionalized
// space back to SI quantities.
FitResult transform(const FitResult& in, std::vector<std::string> names,
                    const Eigen::VectorXd& params_out, const Eigen::MatrixXd& t) {
  FitResult out = in;
  out.names = std::move(names);
  out.params = params_out;
  out.covariance = t * in.covariance * t.transpose();
  out.sigmas = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

}  // namespace

int FitResult::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("FitResult: no parameter named " + name);
}

double FitResult::param(const std::string& name) const { return params[index(name)]; }
double FitResult::sigma(const std::string& name) const { return sigmas[index(name)]; }

// ---------------------------------------------------------------------------
// Broadband Lorentzian + quadratic background
// ---------------------------------------------------------------------------

namespace detail {

AssembledProblem broadband_problem(std::span<const double> freqs_hz,
                                   std::span<const double> y,
                                   std::span<const double> sigma,
                                   const spectra::BroadbandModel& init) {
  const int n = static_cast<int>(freqs_hz.size());
  init.validate();
  const double s = init.kappa_hz;  // frequency unit
  const double f_ref = init.f0_hz;
  const double baseline = init.baseline;

  struct Data {
    std::vector<double> u, y, w;
    double baseline;
  };
  auto data = std::make_shared<Data>();
  data->baseline = baseline;
  data->u.resize(n);
  data->y.assign(y.begin(), y.end());
  data->w.resize(n);
  for (int i = 0; i < n; ++i) {
    data->u[i] = (freqs_hz[i] - f_ref) / s;
    data->w[i] = 1.0 / sigma[i];
  }

  AssembledProblem out;
  out.problem.n_residuals = n;
  out.problem.eval = [data, n](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                               Eigen::MatrixXd* jac) {
    const double a = p[0], u0 = p[1], w = p[2];
    const double c0 = p[3], c1 = p[4], c2 = p[5];
    const double h = 0.5 * w;
    for (int i = 0; i < n; ++i) {
      double u = data->u[i];
      double d = u - u0;
      double den = d * d + h * h;
      double q = h * h / den;
      double m = a * q + c0 + c1 * u + c2 * u * u + data->baseline;
      double inv = data->w[i];
      r[i] = (m - data->y[i]) * inv;
      if (jac) {
        (*jac)(i, 0) = q * inv;
        (*jac)(i, 1) = a * 2.0 * d * q * q / (h * h) * inv;
        (*jac)(i, 2) = a * d * d * h / (den * den) * inv;
        (*jac)(i, 3) = inv;
        (*jac)(i, 4) = u * inv;
        (*jac)(i, 5) = u * u * inv;
      }
    }
  };

  out.p0.resize(6);
  out.p0 << init.amplitude_a, 0.0, 1.0, init.b0, init.b1 * s, init.b2 * s * s;
  double a_scale = std::max(std::fabs(init.amplitude_a), 1.0);
  out.scales.resize(6);
  out.scales << a_scale, 1.0, 1.0, a_scale, a_scale, a_scale;
  return out;
}

}  // namespace detail

FitResult fit_broadband(std::span<const double> freqs_hz,
                        std::span<const double> y, std::span<const double> sigma,
                        const spectra::BroadbandModel& init) {
  const int n = static_cast<int>(freqs_hz.size());
  if (n < 7) throw InsufficientDataError("fit_broadband: need >= 7 points");

  detail::AssembledProblem ap = detail::broadband_problem(freqs_hz, y, sigma, init);
  LmOutcome outcome = lm_fit(ap.problem, ap.p0, ap.scales);
  FitResult internal = finish(outcome, {}, n);

  const double s = init.kappa_hz;
  const double f_ref = init.f0_hz;
  const double a = internal.params[0], u0 = internal.params[1],
               w = internal.params[2], c0 = internal.params[3],
               c1 = internal.params[4], c2 = internal.params[5];
  // Re-center the background Taylor coefficients on the fitted resonance.
  Eigen::VectorXd out(6);
  out << a, f_ref + u0 * s, w * s, c0 + c1 * u0 + c2 * u0 * u0,
      (c1 + 2.0 * c2 * u0) / s, c2 / (s * s);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(6, 6);
  t(0, 0) = 1.0;
  t(1, 1) = s;
  t(2, 2) = s;
  t(3, 1) = c1 + 2.0 * c2 * u0;
  t(3, 3) = 1.0;
  t(3, 4) = u0;
  t(3, 5) = u0 * u0;
  t(4, 1) = 2.0 * c2 / s;
  t(4, 4) = 1.0 / s;
  t(4, 5) = 2.0 * u0 / s;
  t(5, 5) = 1.0 / (s * s);
  return transform(internal, {"a", "f0_hz", "kappa_hz", "b0", "b1", "b2"}, out, t);
}

FitResult fit_broadband(const spectra::SampledSpectrum& spectrum,
                        const spectra::BroadbandModel& init) {
  spectrum.validate();
  Eigen::VectorXd sigma = shot_noise_sigma(spectrum.counts);
  std::vector<double> y(spectrum.counts.begin(), spectrum.counts.end());
  return fit_broadband(spectrum.frequency_hz, y,
                       std::span<const double>(sigma.data(), sigma.size()), init);
}

// ---------------------------------------------------------------------------
// DIT narrow-scan fit
// ---------------------------------------------------------------------------

namespace detail {

namespace {

struct DitDerivs {
  double t;
  double dt_dg;
  double dt_dgamma;
  double dt_ddelta;
};

// |S|^2 and its derivatives via the complex chain rule,
// d|S|^2/dp = 2 Re(conj(S) dS/dp).
DitDerivs dit_transmission(double u, double g, double gamma, double delta,
                           double kappa_i, double kappa_c,
                           scattering::Geometry geometry) {
  const double kappa = kappa_i + 2.0 * kappa_c;
  const cplx dc = kI * u - 0.5 * kappa;
  const cplx de = kI * (u - delta) - 0.5 * gamma;
  const cplx den = dc * de + g * g;
  const cplx den2 = den * den;

  cplx s;
  if (geometry == scattering::Geometry::kDrop) {
    s = kappa_c * de / den;
  } else {
    s = ((kI * u - 0.5 * kappa_i) * de + g * g) / den;
  }
  // These forms hold for both geometries.
  cplx ds_dg = -2.0 * g * kappa_c * de / den2;
  cplx ds_dgamma = -0.5 * g * g * kappa_c / den2;
  cplx ds_ddelta = -kI * g * g * kappa_c / den2;

  DitDerivs out;
  out.t = std::norm(s);
  out.dt_dg = 2.0 * std::real(std::conj(s) * ds_dg);
  out.dt_dgamma = 2.0 * std::real(std::conj(s) * ds_dgamma);
  out.dt_ddelta = 2.0 * std::real(std::conj(s) * ds_ddelta);
  return out;
}

}  // namespace

AssembledProblem dit_problem(std::span<const double> detunings_hz,
                             std::span<const double> y,
                             std::span<const double> sigma, const DitFixed& fixed,
                             double g_init_hz, double gamma_init_hz,
                             double delta_init_hz,
                             const spectra::FabryPerot& fp_init) {
  const int n = static_cast<int>(detunings_hz.size());
  const double s = 1e9;  // work in GHz; the amplitudes are scale-invariant

  struct Data {
    std::vector<double> u, y, w;
    double ki, kc, r0, r1, r2;
    scattering::Geometry geometry;
  };
  auto data = std::make_shared<Data>();
  data->u.resize(n);
  data->y.assign(y.begin(), y.end());
  data->w.resize(n);
  for (int i = 0; i < n; ++i) {
    data->u[i] = detunings_hz[i] / s;
    data->w[i] = 1.0 / sigma[i];
  }
  data->ki = fixed.kappa_i_hz / s;
  data->kc = fixed.kappa_c_hz / s;
  data->r0 = fixed.bg_r0;
  data->r1 = fixed.bg_r1 * s;
  data->r2 = fixed.bg_r2 * s * s;
  data->geometry = fixed.geometry;

  AssembledProblem out;
  out.problem.n_residuals = n;
  out.problem.eval = [data, n](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                               Eigen::MatrixXd* jac) {
    const double g = p[0], gamma = p[1], delta = p[2];
    const double f0 = p[3], f1 = p[4], f2 = p[5];
    for (int i = 0; i < n; ++i) {
      double u = data->u[i];
      DitDerivs d = dit_transmission(u, g, gamma, delta, data->ki, data->kc,
                                     data->geometry);
      double x = u - delta;
      double env = f0 + f1 * x + f2 * x * x;
      double bg = data->r0 + data->r1 * u + data->r2 * u * u;
      double core = d.t + bg;
      double inv = data->w[i];
      r[i] = (core * env - data->y[i]) * inv;
      if (jac) {
        double denv_dx = f1 + 2.0 * f2 * x;
        (*jac)(i, 0) = env * d.dt_dg * inv;
        (*jac)(i, 1) = env * d.dt_dgamma * inv;
        (*jac)(i, 2) = (env * d.dt_ddelta - core * denv_dx) * inv;
        (*jac)(i, 3) = core * inv;
        (*jac)(i, 4) = core * x * inv;
        (*jac)(i, 5) = core * x * x * inv;
      }
    }
  };

  double y_scale = 1.0;
  for (int i = 0; i < n; ++i) y_scale = std::max(y_scale, std::fabs(y[i]));
  out.p0.resize(6);
  out.p0 << g_init_hz / s, gamma_init_hz / s, delta_init_hz / s, fp_init.f0,
      fp_init.f1 * s, fp_init.f2 * s * s;
  out.scales.resize(6);
  out.scales << std::max(out.p0[0], 0.1), std::max(out.p0[1], 0.01), 1.0,
      std::max(std::fabs(out.p0[3]), 1.0), y_scale, y_scale;
  return out;
}

}  // namespace detail

FitResult fit_dit(std::span<const double> detunings_hz, std::span<const double> y,
                  std::span<const double> sigma, const DitFixed& fixed,
                  double g_init_hz, double gamma_init_hz, double delta_init_hz,
                  const spectra::FabryPerot& fp_init) {
  const int n = static_cast<int>(detunings_hz.size());
  if (n < 7) throw InsufficientDataError("fit_dit: need >= 7 points");

  detail::AssembledProblem ap = detail::dit_problem(
      detunings_hz, y, sigma, fixed, g_init_hz, gamma_init_hz, delta_init_hz,
      fp_init);
  LmOutcome outcome = lm_fit(ap.problem, ap.p0, ap.scales);
  FitResult internal = finish(outcome, {}, n);

  const double s = 1e9;
  Eigen::VectorXd out(6);
  out << internal.params[0] * s, internal.params[1] * s, internal.params[2] * s,
      internal.params[3], internal.params[4] / s, internal.params[5] / (s * s);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(6, 6);
  t(0, 0) = s;
  t(1, 1) = s;
  t(2, 2) = s;
  t(3, 3) = 1.0;
  t(4, 4) = 1.0 / s;
  t(5, 5) = 1.0 / (s * s);
  FitResult fit = transform(
      internal, {"g_hz", "gamma_hz", "delta_hz", "fp0", "fp1", "fp2"}, out, t);
  // Sign convention: the model depends on g^2 only.
  if (fit.params[0] < 0.0) fit.params[0] = -fit.params[0];
  return fit;
}

FitResult fit_dit(const spectra::SampledSpectrum& spectrum, const DitFixed& fixed,
                  double g_init_hz, double gamma_init_hz, double delta_init_hz,
                  const spectra::FabryPerot& fp_init) {
  spectrum.validate();
  Eigen::VectorXd sigma = shot_noise_sigma(spectrum.counts);
  std::vector<double> y(spectrum.counts.begin(), spectrum.counts.end());
  return fit_dit(spectrum.frequency_hz, y,
                 std::span<const double>(sigma.data(), sigma.size()), fixed,
                 g_init_hz, gamma_init_hz, delta_init_hz, fp_init);
}

DerivedCooperativity dit_cooperativity(const FitResult& fit, double kappa_hz) {
  int ig = fit.index("g_hz");
  int igamma = fit.index("gamma_hz");
  double g = fit.params[ig];
  double gamma = fit.params[igamma];
  double c = 4.0 * g * g / (kappa_hz * gamma);
  double dc_dg = 8.0 * g / (kappa_hz * gamma);
  double dc_dgamma = -c / gamma;
  double var = dc_dg * dc_dg * fit.covariance(ig, ig) +
               dc_dgamma * dc_dgamma * fit.covariance(igamma, igamma) +
               2.0 * dc_dg * dc_dgamma * fit.covariance(ig, igamma);
  return {c, std::sqrt(std::max(var, 0.0))};
}

// ---------------------------------------------------------------------------
// Purcell-broadening curve vs detuning
// ---------------------------------------------------------------------------

namespace detail {

AssembledProblem lineshape_problem(std::span<const LinewidthPoint> points,
                                   double kappa_hz, bool fit_kappa) {
  const int n = static_cast<int>(points.size());
  const double s = kappa_hz;
  const int n_params = fit_kappa ? 3 : 2;

  struct Data {
    std::vector<double> d, y, w;
    bool fit_kappa;
  };
  auto data = std::make_shared<Data>();
  data->fit_kappa = fit_kappa;
  data->d.resize(n);
  data->y.resize(n);
  data->w.resize(n);
  for (int i = 0; i < n; ++i) {
    data->d[i] = points[i].detuning_hz / s;
    data->y[i] = points[i].gamma_eff_hz / s;
    data->w[i] = s / points[i].sigma_hz;
  }

  AssembledProblem out;
  out.problem.n_residuals = n;
  out.problem.eval = [data, n](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                               Eigen::MatrixXd* jac) {
    const double gamma = p[0], gamma_cav = p[1];
    const double k = data->fit_kappa ? p[2] : 1.0;
    const double h = 0.5 * k;
    for (int i = 0; i < n; ++i) {
      double d = data->d[i];
      double den = d * d + h * h;
      double lor = h * h / den;
      double inv = data->w[i];
      r[i] = (gamma + gamma_cav * lor - data->y[i]) * inv;
      if (jac) {
        (*jac)(i, 0) = inv;
        (*jac)(i, 1) = lor * inv;
        if (data->fit_kappa) {
          (*jac)(i, 2) = gamma_cav * h * d * d / (den * den) * inv;
        }
      }
    }
  };

  double gamma0 = points[0].gamma_eff_hz / s;
  double cav0 = 1e-6;
  for (const auto& pt : points) {
    gamma0 = std::min(gamma0, pt.gamma_eff_hz / s);
  }
  for (const auto& pt : points) {
    cav0 = std::max(cav0, pt.gamma_eff_hz / s - gamma0);
  }
  out.p0.resize(n_params);
  out.scales.resize(n_params);
  out.p0[0] = gamma0;
  out.p0[1] = cav0;
  out.scales[0] = std::max(gamma0, 1e-6);
  out.scales[1] = cav0;
  if (fit_kappa) {
    out.p0[2] = 1.0;
    out.scales[2] = 1.0;
  }
  return out;
}

}  // namespace detail

FitResult fit_lineshape_vs_detuning(std::span<const LinewidthPoint> points,
                                    double kappa_hz, bool fit_kappa) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw InsufficientDataError("fit_lineshape_vs_detuning: need >= 3 points");
  if (kappa_hz <= 0.0) throw std::invalid_argument("fit_lineshape: kappa must be > 0");

  detail::AssembledProblem ap = detail::lineshape_problem(points, kappa_hz, fit_kappa);
  LmOutcome outcome = lm_fit(ap.problem, ap.p0, ap.scales);
  FitResult internal = finish(outcome, {}, n);

  const int n_params = fit_kappa ? 3 : 2;
  const double s = kappa_hz;
  Eigen::VectorXd out(n_params);
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n_params, n_params) * s;
  out[0] = internal.params[0] * s;
  out[1] = internal.params[1] * s;
  std::vector<std::string> names{"gamma_hz", "gamma_cav_hz"};
  if (fit_kappa) {
    out[2] = internal.params[2] * s;
    names.push_back("kappa_hz");
  }
  return transform(internal, std::move(names), out, t);
}

// ---------------------------------------------------------------------------
// Exponential recovery
// ---------------------------------------------------------------------------

namespace detail {

AssembledProblem decay_problem(std::span<const DecayPoint> points,
                               DecayModel model) {
  const int n = static_cast<int>(points.size());
  double t_max = 0.0;
  for (const auto& pt : points) t_max = std::max(t_max, pt.t_s);
  const double s = t_max > 0.0 ? t_max : 1.0;
  const bool bi = model == DecayModel::kBi;
  const int n_params = bi ? 5 : 3;

  struct Data {
    std::vector<double> t, y, w;
    bool bi;
  };
  auto data = std::make_shared<Data>();
  data->bi = bi;
  data->t.resize(n);
  data->y.resize(n);
  data->w.resize(n);
  for (int i = 0; i < n; ++i) {
    data->t[i] = points[i].t_s / s;
    data->y[i] = points[i].y;
    data->w[i] = 1.0 / points[i].sigma;
  }

  AssembledProblem out;
  out.problem.n_residuals = n;
  out.problem.eval = [data, n](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                               Eigen::MatrixXd* jac) {
    for (int i = 0; i < n; ++i) {
      double t = data->t[i];
      double inv = data->w[i];
      if (!data->bi) {
        double e = std::exp(-t / p[2]);
        r[i] = (p[0] - p[1] * e - data->y[i]) * inv;
        if (jac) {
          (*jac)(i, 0) = inv;
          (*jac)(i, 1) = -e * inv;
          (*jac)(i, 2) = -p[1] * e * t / (p[2] * p[2]) * inv;
        }
      } else {
        double e1 = std::exp(-t / p[2]);
        double e2 = std::exp(-t / p[4]);
        r[i] = (p[0] - p[1] * e1 - p[3] * e2 - data->y[i]) * inv;
        if (jac) {
          (*jac)(i, 0) = inv;
          (*jac)(i, 1) = -e1 * inv;
          (*jac)(i, 2) = -p[1] * e1 * t / (p[2] * p[2]) * inv;
          (*jac)(i, 3) = -e2 * inv;
          (*jac)(i, 4) = -p[3] * e2 * t / (p[4] * p[4]) * inv;
        }
      }
    }
  };

  // Self-initialized: tail average pins the plateau.
  double y_inf0 = 0.0;
  int tail = std::max(n / 10, 1);
  for (int i = n - tail; i < n; ++i) y_inf0 += points[i].y;
  y_inf0 /= tail;
  double amp0 = y_inf0 - points[0].y;
  double y_scale = std::max({std::fabs(y_inf0), std::fabs(amp0), 1e-12});

  out.p0.resize(n_params);
  out.scales.resize(n_params);
  if (!bi) {
    out.p0 << y_inf0, amp0, 0.3;
    out.scales << y_scale, y_scale, 1.0;
  } else {
    out.p0 << y_inf0, 0.5 * amp0, 0.1, 0.5 * amp0, 0.5;
    out.scales << y_scale, y_scale, 1.0, y_scale, 1.0;
  }
  return out;
}

}  // namespace detail

FitResult fit_exponential_recovery(std::span<const DecayPoint> points,
                                   DecayModel model) {
  const int n = static_cast<int>(points.size());
  const int min_points = model == DecayModel::kSingle ? 4 : 6;
  if (n < min_points) {
    throw InsufficientDataError("fit_exponential_recovery: too few points");
  }
  const bool bi = model == DecayModel::kBi;

  detail::AssembledProblem ap = detail::decay_problem(points, model);
  LmOutcome outcome = lm_fit(ap.problem, ap.p0, ap.scales);
  FitResult internal = finish(outcome, {}, n);

  double t_max = 0.0;
  for (const auto& pt : points) t_max = std::max(t_max, pt.t_s);
  const double s = t_max > 0.0 ? t_max : 1.0;
  const int n_params = bi ? 5 : 3;
  Eigen::VectorXd out(n_params);
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n_params, n_params);
  std::vector<std::string> names;
  if (!bi) {
    out << internal.params[0], internal.params[1], internal.params[2] * s;
    t(2, 2) = s;
    names = {"y_inf", "amp", "t1_s"};
  } else {
    out << internal.params[0], internal.params[1], internal.params[2] * s,
        internal.params[3], internal.params[4] * s;
    t(2, 2) = s;
    t(4, 4) = s;
    names = {"y_inf", "amp1", "tau1_s", "amp2", "tau2_s"};
  }
  FitResult fit = transform(internal, std::move(names), out, t);

  if (bi) {
    // Coincident rates leave the split between components unidentifiable.
    double tau1 = fit.param("tau1_s"), tau2 = fit.param("tau2_s");
    double joint = std::hypot(fit.sigma("tau1_s"), fit.sigma("tau2_s"));
    if (!std::isfinite(joint) || std::fabs(tau1 - tau2) < joint) {
      fit.degenerate = true;
    }
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Pooling
// ---------------------------------------------------------------------------

PooledEstimate pool(std::span<const Estimate> estimates,
                    const std::function<bool(const Estimate&)>& reject) {
  PooledEstimate out;
  double wsum = 0.0, wmu = 0.0;
  for (const auto& e : estimates) {
    if (e.sigma <= 0.0) throw std::invalid_argument("pool: sigma must be > 0");
    if (reject && reject(e)) {
      ++out.n_rejected;
      continue;
    }
    double w = 1.0 / (e.sigma * e.sigma);
    wsum += w;
    wmu += w * e.mu;
    ++out.n_used;
  }
  if (out.n_used == 0) {
    throw EmptyAfterRejectionError("pool: no estimates survive rejection");
  }
  out.mean = wmu / wsum;
  out.sigma = 1.0 / std::sqrt(wsum);
  return out;
}

bool scan_rejected(const FitResult& fit, double chi2_max) {
  return !fit.converged || fit.chi2_reduced > chi2_max;
}

}  // namespace cqed::fitting
