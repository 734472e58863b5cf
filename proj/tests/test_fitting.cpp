#include <doctest.h>

#include <cmath>
#include <vector>

#include "cqed/fitting.hpp"
#include "cqed/rng.hpp"
#include "cqed/scattering.hpp"

using namespace cqed;
using namespace cqed::fitting;
using namespace cqed::spectra;

namespace {

BroadbandModel device_broadband() {
  BroadbandModel m;
  m.amplitude_a = 1e5;
  m.f0_hz = 406.77e12;
  m.kappa_hz = 406.77e12 / 3540.0;  // Q = 3540
  m.b0 = 8000.0;
  m.b1 = 1.5e-8;
  m.b2 = -2e-20;
  m.baseline = 590.0;
  return m;
}

std::vector<double> broadband_grid() {
  std::vector<double> freqs;
  for (int i = 0; i < 301; ++i) {
    freqs.push_back(406.77e12 - 300e9 + 2e9 * i);
  }
  return freqs;
}

DitFixed siv1_fixed() {
  DitFixed fixed;
  fixed.kappa_i_hz = 0.0;
  fixed.kappa_c_hz = 57.45e9;
  fixed.geometry = scattering::Geometry::kDrop;
  return fixed;
}

struct DitTruth {
  double g = 2.13e9;
  double gamma = 0.110e9;
  double delta = 0.523e9;
  double peak_counts = 1e5;
};

// Expected counts of a narrow drop scan at the SiV-1 operating point.
std::vector<double> synth_dit_counts(const DitTruth& truth, bool thermal,
                                     const scattering::DriveGrid& grid) {
  DitModel m;
  m.sys.rates.f_cav_hz = 406.774e12;
  m.sys.rates.f_emitter_hz = 406.774e12 + truth.delta;
  m.sys.rates.kappa_i_hz = 0.0;
  m.sys.rates.kappa_c_hz = 57.45e9;
  m.sys.rates.gamma_hz = truth.gamma;
  m.sys.rates.g_hz = truth.g;
  m.sys.rates.delta_e_hz = 50e9;
  m.sys.temperature_k = 4.0;
  m.geometry = scattering::Geometry::kDrop;
  m.thermal_average = thermal;
  m.fp.f0 = truth.peak_counts;
  auto y = dit_intensity(m, grid);
  return y;
}

}  // namespace

TEST_CASE("broadband fit recovers noiseless truth") {
  BroadbandModel truth = device_broadband();
  auto freqs = broadband_grid();
  auto y = broadband_intensity(truth, freqs);
  std::vector<double> sigma(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) sigma[i] = std::sqrt(std::max(y[i], 1.0));

  BroadbandModel init = truth;
  init.amplitude_a *= 1.15;
  init.f0_hz += 20e9;
  init.kappa_hz *= 0.85;
  init.b0 *= 0.5;
  init.b1 = 0.0;
  init.b2 = 0.0;

  FitResult fit = fit_broadband(freqs, y, sigma, init);
  CHECK(fit.converged);
  CHECK(fit.param("a") == doctest::Approx(truth.amplitude_a).epsilon(1e-6));
  CHECK(fit.param("f0_hz") == doctest::Approx(truth.f0_hz).epsilon(1e-9));
  CHECK(fit.param("kappa_hz") == doctest::Approx(truth.kappa_hz).epsilon(1e-6));
  CHECK(fit.param("b0") == doctest::Approx(truth.b0).epsilon(1e-4));
  CHECK(fit.chi2_reduced < 1e-10);
}

TEST_CASE("broadband fit recovers Q within 2 percent under Poisson noise") {
  BroadbandModel truth = device_broadband();
  auto freqs = broadband_grid();
  auto expected = broadband_intensity(truth, freqs);
  double q_truth = truth.f0_hz / truth.kappa_hz;

  int good = 0;
  const int n_seeds = 100;
  for (int seed = 0; seed < n_seeds; ++seed) {
    SampledSpectrum s = sample_counts(freqs, expected, 1.0, 1000 + seed);
    BroadbandModel init = truth;
    init.amplitude_a *= 1.1;
    init.kappa_hz *= 0.9;
    FitResult fit = fit_broadband(s, init);
    double q = fit.param("f0_hz") / fit.param("kappa_hz");
    if (fit.converged && std::fabs(q - q_truth) / q_truth < 0.02) ++good;
  }
  CHECK(good == n_seeds);
}

TEST_CASE("flat data leaves the linewidth unidentified") {
  std::vector<double> freqs = broadband_grid();
  std::vector<double> y(freqs.size(), 1000.0);
  std::vector<double> sigma(freqs.size(), 31.6);
  BroadbandModel init = device_broadband();
  init.amplitude_a = 0.0;  // no peak: kappa has no leverage
  CHECK_THROWS_AS(fit_broadband(freqs, y, sigma, init), SingularJacobianError);
}

TEST_CASE("dit fit recovers noiseless truth") {
  DitTruth truth;
  auto grid = scattering::DriveGrid::linspace(-6e9, 6e9, 401);
  auto y = synth_dit_counts(truth, false, grid);
  std::vector<double> sigma(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) sigma[i] = std::sqrt(std::max(y[i], 1.0));

  FabryPerot fp_init;
  fp_init.f0 = 0.9e5;
  FitResult fit = fit_dit(grid.detunings_hz, y, sigma, siv1_fixed(),
                          1.8e9, 0.15e9, 0.3e9, fp_init);
  CHECK(fit.converged);
  CHECK(fit.param("g_hz") == doctest::Approx(truth.g).epsilon(1e-6));
  CHECK(fit.param("gamma_hz") == doctest::Approx(truth.gamma).epsilon(1e-6));
  CHECK(fit.param("delta_hz") == doctest::Approx(truth.delta).epsilon(1e-6));
  CHECK(fit.param("fp0") == doctest::Approx(truth.peak_counts).epsilon(1e-6));

  auto derived = dit_cooperativity(fit, 114.9e9);
  CHECK(derived.c == doctest::Approx(1.4358).epsilon(1e-3));
}

TEST_CASE("pooled dit fits over 40 noisy scans pin C to the truth") {
  DitTruth truth;
  auto grid = scattering::DriveGrid::linspace(-6e9, 6e9, 401);
  auto expected = synth_dit_counts(truth, false, grid);
  double c_truth = 4.0 * truth.g * truth.g / (114.9e9 * truth.gamma);

  std::vector<Estimate> cs;
  for (int scan = 0; scan < 40; ++scan) {
    SampledSpectrum s =
        sample_counts(grid.detunings_hz, expected, 1.0, 42000 + scan);
    s.frequency_hz = grid.detunings_hz;
    FabryPerot fp_init;
    fp_init.f0 = truth.peak_counts;
    FitResult fit =
        fit_dit(s, siv1_fixed(), 2.0e9, 0.12e9, 0.4e9, fp_init);
    if (scan_rejected(fit)) continue;
    auto derived = dit_cooperativity(fit, 114.9e9);
    cs.push_back({derived.c, derived.sigma});
  }
  CHECK(cs.size() >= 38);
  PooledEstimate pooled = pool(cs);
  CHECK(std::fabs(pooled.mean - c_truth) < 0.05);
}

TEST_CASE("thermal-averaged scans fit with the two-level model bias g low") {
  DitTruth truth;
  truth.g = 2.5e9;
  auto grid = scattering::DriveGrid::linspace(-6e9, 6e9, 401);
  auto expected = synth_dit_counts(truth, true, grid);  // p_g ~ 0.65

  int below = 0;
  const int n_seeds = 20;
  for (int seed = 0; seed < n_seeds; ++seed) {
    SampledSpectrum s =
        sample_counts(grid.detunings_hz, expected, 1.0, 7000 + seed);
    s.frequency_hz = grid.detunings_hz;
    FabryPerot fp_init;
    fp_init.f0 = truth.peak_counts;
    FitResult fit = fit_dit(s, siv1_fixed(), truth.g, truth.gamma, truth.delta,
                            fp_init);
    if (fit.converged && fit.param("g_hz") < truth.g) ++below;
  }
  CHECK(below >= 19);
}

TEST_CASE("lineshape fit recovers the broadening curve") {
  // Synthesize gamma_eff(Delta) exactly and refit.
  const double kappa = 114.9e9, gamma = 0.110e9, g = 2.13e9;
  const double gamma_cav = 4.0 * g * g / kappa;
  std::vector<LinewidthPoint> pts;
  for (double d = -300e9; d <= 300e9; d += 20e9) {
    double lor = 0.25 * kappa * kappa / (d * d + 0.25 * kappa * kappa);
    pts.push_back({d, gamma + gamma_cav * lor, 2e6});
  }
  FitResult fit = fit_lineshape_vs_detuning(pts, kappa);
  CHECK(fit.converged);
  CHECK(fit.param("gamma_hz") == doctest::Approx(gamma).epsilon(1e-8));
  CHECK(fit.param("gamma_cav_hz") == doctest::Approx(gamma_cav).epsilon(1e-8));

  // With kappa free, the broadening curve pins the cavity linewidth.
  FitResult fit_k = fit_lineshape_vs_detuning(pts, 100e9, true);
  CHECK(fit_k.converged);
  CHECK(std::fabs(fit_k.param("kappa_hz") - kappa) / kappa < 0.01);

  // Reported operating point: gamma_cav = 160 MHz over gamma = 121 MHz.
  CHECK(160.0 / 121.0 == doctest::Approx(1.32).epsilon(0.005));

  CHECK_THROWS_AS(fit_lineshape_vs_detuning(
                      std::vector<LinewidthPoint>{{0.0, 0.3e9, 1e6}}, kappa),
                  InsufficientDataError);
}

TEST_CASE("exponential recovery fits") {
  const double t1 = 419e-6;
  std::vector<DecayPoint> pts;
  for (int i = 0; i < 60; ++i) {
    double t = i * 50e-6;
    double y = 1000.0 - 700.0 * std::exp(-t / t1);
    pts.push_back({t, y, 5.0});
  }
  FitResult fit = fit_exponential_recovery(pts, DecayModel::kSingle);
  CHECK(fit.converged);
  CHECK(fit.param("t1_s") == doctest::Approx(t1).epsilon(1e-7));
  CHECK(fit.param("y_inf") == doctest::Approx(1000.0).epsilon(1e-7));

  // Paper-scale noise keeps the estimate inside a 5% band.
  Rng rng(31);
  int good = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DecayPoint> noisy = pts;
    for (auto& p : noisy) p.y += rng.normal(0.0, 5.0);
    FitResult f = fit_exponential_recovery(noisy, DecayModel::kSingle);
    if (f.converged && std::fabs(f.param("t1_s") - t1) / t1 < 0.05) ++good;
  }
  CHECK(good >= 19);

  // A bi-exponential on single-rate data collapses and is flagged.
  FitResult bi = fit_exponential_recovery(pts, DecayModel::kBi);
  CHECK(bi.degenerate);

  // A genuine two-rate signal resolves both constants.
  std::vector<DecayPoint> two;
  for (int i = 0; i < 120; ++i) {
    double t = i * 20e-6;
    double y = 500.0 - 300.0 * std::exp(-t / 80e-6) - 150.0 * std::exp(-t / 700e-6);
    two.push_back({t, y, 2.0});
  }
  FitResult fit2 = fit_exponential_recovery(two, DecayModel::kBi);
  CHECK(fit2.converged);
  CHECK(!fit2.degenerate);
  double lo = std::min(fit2.param("tau1_s"), fit2.param("tau2_s"));
  double hi = std::max(fit2.param("tau1_s"), fit2.param("tau2_s"));
  CHECK(lo == doctest::Approx(80e-6).epsilon(1e-4));
  CHECK(hi == doctest::Approx(700e-6).epsilon(1e-4));
}

TEST_CASE("pooling") {
  std::vector<Estimate> es{{1.0, 0.1}, {2.0, 0.3}};
  PooledEstimate p = pool(es);
  CHECK(p.mean == doctest::Approx(1.1));
  CHECK(p.sigma == doctest::Approx(0.094868).epsilon(1e-4));
  CHECK(p.n_used == 2);

  // Equal sigmas: plain mean with sigma/sqrt(N).
  std::vector<Estimate> eq{{1.0, 0.2}, {2.0, 0.2}, {3.0, 0.2}, {6.0, 0.2}};
  PooledEstimate pe = pool(eq);
  CHECK(pe.mean == doctest::Approx(3.0));
  CHECK(pe.sigma == doctest::Approx(0.1));

  // Single estimate passes through.
  std::vector<Estimate> one{{1.7, 0.05}};
  PooledEstimate po = pool(one);
  CHECK(po.mean == doctest::Approx(1.7));
  CHECK(po.sigma == doctest::Approx(0.05));

  // Permutation invariance and scale covariance.
  std::vector<Estimate> fwd{{1.0, 0.1}, {2.0, 0.3}, {1.5, 0.2}};
  std::vector<Estimate> rev{{1.5, 0.2}, {2.0, 0.3}, {1.0, 0.1}};
  CHECK(pool(fwd).mean == doctest::Approx(pool(rev).mean).epsilon(1e-15));
  std::vector<Estimate> scaled;
  for (auto& e : fwd) scaled.push_back({3.0 * e.mu, 3.0 * e.sigma});
  CHECK(pool(scaled).mean == doctest::Approx(3.0 * pool(fwd).mean));
  CHECK(pool(scaled).sigma == doctest::Approx(3.0 * pool(fwd).sigma));

  // Rejection bookkeeping.
  auto reject_big = [](const Estimate& e) { return e.mu > 1.9; };
  PooledEstimate pr = pool(fwd, reject_big);
  CHECK(pr.n_used == 2);
  CHECK(pr.n_rejected == 1);
  auto reject_all = [](const Estimate&) { return true; };
  CHECK_THROWS_AS(pool(fwd, reject_all), EmptyAfterRejectionError);
}

TEST_CASE("reported sigmas match ensemble scatter") {
  BroadbandModel truth = device_broadband();
  auto freqs = broadband_grid();
  auto expected = broadband_intensity(truth, freqs);

  std::vector<double> kappas, sigmas;
  for (int seed = 0; seed < 200; ++seed) {
    SampledSpectrum s = sample_counts(freqs, expected, 1.0, 90000 + seed);
    FitResult fit = fit_broadband(s, truth);
    REQUIRE(fit.converged);
    kappas.push_back(fit.param("kappa_hz"));
    sigmas.push_back(fit.sigma("kappa_hz"));
  }
  double mean = 0.0, var = 0.0, sig_mean = 0.0;
  for (double k : kappas) mean += k;
  mean /= kappas.size();
  for (double k : kappas) var += (k - mean) * (k - mean);
  var /= (kappas.size() - 1);
  for (double s : sigmas) sig_mean += s;
  sig_mean /= sigmas.size();
  double ratio = std::sqrt(var) / sig_mean;
  CHECK(ratio > 0.7);
  CHECK(ratio < 1.4);
}

TEST_CASE("analytic jacobians match central finite differences") {
  Rng rng(131);
  auto check_problem = [&](detail::AssembledProblem& ap, int trials) {
    for (int t = 0; t < trials; ++t) {
      Eigen::VectorXd p = ap.p0;
      for (int j = 0; j < p.size(); ++j) {
        p[j] += ap.scales[j] * rng.uniform(-0.05, 0.05);
      }
      Eigen::VectorXd r(ap.problem.n_residuals);
      Eigen::MatrixXd jac(ap.problem.n_residuals, p.size());
      ap.problem.eval(p, r, &jac);
      auto residual_only = [&](const Eigen::VectorXd& q, Eigen::VectorXd& out) {
        ap.problem.eval(q, out, nullptr);
      };
      Eigen::MatrixXd fd = finite_difference_jacobian(residual_only, p, ap.scales,
                                                      ap.problem.n_residuals);
      double scale = std::max(jac.cwiseAbs().maxCoeff(), 1e-12);
      double err = (jac - fd).cwiseAbs().maxCoeff() / scale;
      CHECK(err < 1e-5);
    }
  };

  {
    BroadbandModel truth = device_broadband();
    auto freqs = broadband_grid();
    auto y = broadband_intensity(truth, freqs);
    std::vector<double> sigma(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) sigma[i] = std::sqrt(std::max(y[i], 1.0));
    auto ap = detail::broadband_problem(freqs, y, sigma, truth);
    check_problem(ap, 20);
  }
  {
    DitTruth truth;
    auto grid = scattering::DriveGrid::linspace(-6e9, 6e9, 101);
    auto y = synth_dit_counts(truth, false, grid);
    std::vector<double> sigma(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) sigma[i] = std::sqrt(std::max(y[i], 1.0));
    FabryPerot fp;
    fp.f0 = truth.peak_counts;
    auto ap = detail::dit_problem(grid.detunings_hz, y, sigma, siv1_fixed(),
                                  truth.g, truth.gamma, truth.delta, fp);
    check_problem(ap, 20);
  }
  {
    std::vector<LinewidthPoint> pts;
    for (double d = -300e9; d <= 300e9; d += 30e9) {
      pts.push_back({d, 0.2e9, 2e6});
    }
    auto ap = detail::lineshape_problem(pts, 114.9e9, true);
    check_problem(ap, 20);
  }
  {
    std::vector<DecayPoint> pts;
    for (int i = 0; i < 40; ++i) {
      pts.push_back({i * 50e-6, 900.0 - 500.0 * std::exp(-i / 9.0), 4.0});
    }
    auto ap = detail::decay_problem(pts, DecayModel::kBi);
    check_problem(ap, 20);
  }
}
