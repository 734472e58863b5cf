#include "cqed/readout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cqed/rng.hpp"

namespace cqed::readout {

void TelegraphConfig::validate() const {
  if (t1_s <= 0.0) throw std::invalid_argument("TelegraphConfig: t1 must be > 0");
  if (bin_width_s <= 0.0) throw std::invalid_argument("TelegraphConfig: bin_width must be > 0");
  if (probe_duration_s <= 0.0) {
    throw std::invalid_argument("TelegraphConfig: probe_duration must be > 0");
  }
  if (pump_duration_s < 0.0 || pump_rate_per_s < 0.0) {
    throw std::invalid_argument("TelegraphConfig: pump must be >= 0");
  }
  if (mu_down < 0.0 || mu_up < 0.0) {
    throw std::invalid_argument("TelegraphConfig: count rates must be >= 0");
  }
}

Spin TelegraphTrace::state_at(double t_s) const {
  Spin s = initial_state;
  for (double jt : jump_times_s) {
    if (jt > t_s) break;
    s = s == Spin::kDown ? Spin::kUp : Spin::kDown;
  }
  return s;
}

std::vector<TelegraphTrace> simulate_telegraph(const TelegraphConfig& cfg,
                                               int n_sequences) {
  cfg.validate();
  const double thermal_rate = 0.5 / cfg.t1_s;  // per direction
  const double total = cfg.pump_duration_s + cfg.probe_duration_s;
  const int n_bins =
      static_cast<int>(std::floor(cfg.probe_duration_s / cfg.bin_width_s + 1e-9));

  std::vector<TelegraphTrace> traces;
  traces.reserve(n_sequences);

  for (int seq = 0; seq < n_sequences; ++seq) {
    Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(seq));
    TelegraphTrace trace;
    trace.bin_width_s = cfg.bin_width_s;
    trace.probe_start_s = cfg.pump_duration_s;
    trace.initial_state = cfg.initial_state.value_or(
        rng.uniform() < 0.5 ? Spin::kDown : Spin::kUp);

    // Jump times of the inhomogeneous two-state Markov chain. During the
    // pump step the down->up rate is thermal + pump.
    Spin state = trace.initial_state;
    double t = 0.0;
    while (t < total) {
      double rate = thermal_rate;
      if (state == Spin::kDown && t < cfg.pump_duration_s) {
        rate += cfg.pump_rate_per_s;
      }
      double wait = rate > 0.0 ? rng.exponential(1.0 / rate)
                               : std::numeric_limits<double>::infinity();
      // A rate change at the pump/probe boundary invalidates the draw beyond
      // the boundary; restart from the boundary instead of jumping.
      if (state == Spin::kDown && t < cfg.pump_duration_s &&
          t + wait > cfg.pump_duration_s) {
        t = cfg.pump_duration_s;
        continue;
      }
      t += wait;
      if (t >= total) break;
      trace.jump_times_s.push_back(t);
      state = state == Spin::kDown ? Spin::kUp : Spin::kDown;
    }

    // Per-bin up-state occupancy during the probe; counts are Poisson with
    // the time-weighted mixture mean (counts are Poisson-additive over
    // sub-intervals).
    trace.bins.resize(n_bins);
    trace.bin_up_fraction.resize(n_bins);
    std::size_t j = 0;
    Spin s = trace.initial_state;
    while (j < trace.jump_times_s.size() &&
           trace.jump_times_s[j] <= cfg.pump_duration_s) {
      s = s == Spin::kDown ? Spin::kUp : Spin::kDown;
      ++j;
    }
    for (int b = 0; b < n_bins; ++b) {
      double lo = cfg.pump_duration_s + b * cfg.bin_width_s;
      double hi = lo + cfg.bin_width_s;
      double up_time = 0.0;
      double cursor = lo;
      while (j < trace.jump_times_s.size() && trace.jump_times_s[j] < hi) {
        if (s == Spin::kUp) up_time += trace.jump_times_s[j] - cursor;
        cursor = trace.jump_times_s[j];
        s = s == Spin::kDown ? Spin::kUp : Spin::kDown;
        ++j;
      }
      if (s == Spin::kUp) up_time += hi - cursor;
      double frac = up_time / cfg.bin_width_s;
      trace.bin_up_fraction[b] = frac;
      double mean = frac * cfg.mu_up + (1.0 - frac) * cfg.mu_down;
      trace.bins[b] = rng.poisson(mean);
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

TelegraphTrace rebin(const TelegraphTrace& trace, int factor) {
  if (factor < 1) throw std::invalid_argument("rebin: factor must be >= 1");
  if (factor == 1) return trace;
  TelegraphTrace out;
  out.initial_state = trace.initial_state;
  out.jump_times_s = trace.jump_times_s;
  out.probe_start_s = trace.probe_start_s;
  out.bin_width_s = trace.bin_width_s * factor;
  const int n = static_cast<int>(trace.bins.size()) / factor;
  out.bins.resize(n);
  out.bin_up_fraction.resize(n);
  for (int i = 0; i < n; ++i) {
    long long sum = 0;
    double frac = 0.0;
    for (int k = 0; k < factor; ++k) {
      sum += trace.bins[i * factor + k];
      frac += trace.bin_up_fraction[i * factor + k];
    }
    out.bins[i] = sum;
    out.bin_up_fraction[i] = frac / factor;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poisson helpers
// ---------------------------------------------------------------------------

double poisson_pmf(long long k, double mu) {
  if (k < 0) return 0.0;
  if (mu <= 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0));
}

double poisson_cdf(long long k, double mu) {
  if (k < 0) return 0.0;
  if (mu <= 0.0) return 1.0;
  double sum = 0.0;
  for (long long i = 0; i <= k; ++i) sum += poisson_pmf(i, mu);
  return std::min(sum, 1.0);
}

double poisson_cdf_dmu(long long k, double mu) {
  if (k < 0) return 0.0;
  return -poisson_pmf(k, mu);
}

// ---------------------------------------------------------------------------
// Bimodal Poisson fit
// ---------------------------------------------------------------------------

BimodalFit fit_bimodal(std::span<const long long> shots) {
  if (shots.size() < 2) throw std::invalid_argument("fit_bimodal: need >= 2 shots");
  long long lo = shots[0], hi = shots[0];
  double mean = 0.0;
  for (long long k : shots) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
    mean += static_cast<double>(k);
  }
  if (lo == hi) throw std::invalid_argument("fit_bimodal: need >= 2 distinct count values");
  mean /= static_cast<double>(shots.size());

  // EM on the two-component mixture, initialized by splitting at the mean.
  double mu1 = 0.0, mu2 = 0.0;
  {
    double s1 = 0.0, s2 = 0.0;
    int n1 = 0, n2 = 0;
    for (long long k : shots) {
      if (static_cast<double>(k) <= mean) {
        s1 += static_cast<double>(k);
        ++n1;
      } else {
        s2 += static_cast<double>(k);
        ++n2;
      }
    }
    mu1 = n1 > 0 ? s1 / n1 : mean * 0.5;
    mu2 = n2 > 0 ? s2 / n2 : mean * 1.5;
    if (mu1 == mu2) mu2 = mu1 + 1.0;
  }
  double w = 0.5;

  const int max_iter = 500;
  int iter = 0;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    double r_sum = 0.0, rk_sum = 0.0, qk_sum = 0.0, ll = 0.0;
    for (long long k : shots) {
      double p1 = w * poisson_pmf(k, mu1);
      double p2 = (1.0 - w) * poisson_pmf(k, mu2);
      double tot = p1 + p2;
      if (tot <= 0.0) tot = 1e-300;
      double r = p1 / tot;
      r_sum += r;
      rk_sum += r * static_cast<double>(k);
      qk_sum += (1.0 - r) * static_cast<double>(k);
      ll += std::log(tot);
    }
    double n = static_cast<double>(shots.size());
    w = std::clamp(r_sum / n, 1e-9, 1.0 - 1e-9);
    mu1 = r_sum > 0.0 ? rk_sum / r_sum : mu1;
    mu2 = (n - r_sum) > 0.0 ? qk_sum / (n - r_sum) : mu2;
    if (std::fabs(ll - prev_ll) < 1e-10 * std::fabs(ll) + 1e-12) {
      prev_ll = ll;
      break;
    }
    prev_ll = ll;
  }

  if (mu1 > mu2) {
    std::swap(mu1, mu2);
    w = 1.0 - w;
  }

  // Uncertainties from the observed information (numeric Hessian of the
  // log-likelihood in (mu1, mu2, w)).
  auto loglik = [&](double m1, double m2, double wt) {
    double ll = 0.0;
    for (long long k : shots) {
      double tot = wt * poisson_pmf(k, m1) + (1.0 - wt) * poisson_pmf(k, m2);
      ll += std::log(std::max(tot, 1e-300));
    }
    return ll;
  };
  Eigen::Vector3d x(mu1, mu2, w);
  Eigen::Vector3d h(std::max(1e-4 * mu1, 1e-6), std::max(1e-4 * mu2, 1e-6), 1e-5);
  Eigen::Matrix3d hess;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      Eigen::Vector3d xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h[i]; xpp[j] += h[j];
      xpm[i] += h[i]; xpm[j] -= h[j];
      xmp[i] -= h[i]; xmp[j] += h[j];
      xmm[i] -= h[i]; xmm[j] -= h[j];
      double d = (loglik(xpp[0], xpp[1], xpp[2]) - loglik(xpm[0], xpm[1], xpm[2]) -
                  loglik(xmp[0], xmp[1], xmp[2]) + loglik(xmm[0], xmm[1], xmm[2])) /
                 (4.0 * h[i] * h[j]);
      hess(i, j) = d;
      hess(j, i) = d;
    }
  }
  Eigen::Matrix3d cov = (-hess).ldlt().solve(Eigen::Matrix3d::Identity());

  BimodalFit fit;
  fit.mu_down = mu1;
  fit.mu_up = mu2;
  fit.sigma_down = cov(0, 0) > 0.0 ? std::sqrt(cov(0, 0)) : std::numeric_limits<double>::infinity();
  fit.sigma_up = cov(1, 1) > 0.0 ? std::sqrt(cov(1, 1)) : std::numeric_limits<double>::infinity();
  fit.weight_a = w * static_cast<double>(shots.size());
  fit.weight_b = (1.0 - w) * static_cast<double>(shots.size());
  fit.iterations = iter;
  double joint = std::hypot(fit.sigma_down, fit.sigma_up);
  fit.degenerate = !std::isfinite(joint) || (mu2 - mu1) < joint;
  return fit;
}

// ---------------------------------------------------------------------------
// Fidelity
// ---------------------------------------------------------------------------

FidelityResult fidelity_at_threshold(double mu_down, double mu_up,
                                     long long threshold, double sigma_down,
                                     double sigma_up) {
  if (threshold < 0) throw std::invalid_argument("fidelity: threshold must be >= 0");
  FidelityResult out;
  out.threshold = threshold;
  out.p_down_given_up = poisson_cdf(threshold, mu_up);
  out.p_up_given_down = 1.0 - poisson_cdf(threshold, mu_down);
  out.fidelity = 1.0 - 0.5 * (out.p_down_given_up + out.p_up_given_down);
  double d_up = poisson_cdf_dmu(threshold, mu_up);      // d p(down|up) / d mu_up
  double d_down = -poisson_cdf_dmu(threshold, mu_down); // d p(up|down) / d mu_down
  out.sigma = 0.5 * std::hypot(d_up * sigma_up, d_down * sigma_down);
  return out;
}

FidelityResult optimal_threshold(const BimodalFit& fit) {
  double mu_down = fit.mu_down, mu_up = fit.mu_up;
  if (mu_down > mu_up) std::swap(mu_down, mu_up);
  long long t_max =
      static_cast<long long>(std::ceil(mu_up + 10.0 * std::sqrt(std::max(mu_up, 1.0))));
  FidelityResult best;
  best.fidelity = -1.0;
  for (long long t = 0; t <= t_max; ++t) {
    FidelityResult cand =
        fidelity_at_threshold(mu_down, mu_up, t, fit.sigma_down, fit.sigma_up);
    if (cand.fidelity > best.fidelity) best = cand;  // ties keep the smaller T
  }
  return best;
}

// ---------------------------------------------------------------------------
// Jump statistics
// ---------------------------------------------------------------------------

std::vector<double> classify_and_intervals(const TelegraphTrace& trace,
                                           long long threshold) {
  std::vector<double> intervals;
  int last_flip = -1;
  for (std::size_t i = 1; i < trace.bins.size(); ++i) {
    bool up_prev = trace.bins[i - 1] > threshold;
    bool up_now = trace.bins[i] > threshold;
    if (up_prev != up_now) {
      if (last_flip >= 0) {
        intervals.push_back((static_cast<int>(i) - last_flip) * trace.bin_width_s);
      }
      last_flip = static_cast<int>(i);
    }
  }
  return intervals;
}

fitting::FitResult estimate_t1_from_intervals(std::span<const double> intervals,
                                              double bin_width_s,
                                              bool drop_first_bin) {
  if (bin_width_s <= 0.0) {
    throw std::invalid_argument("estimate_t1: bin_width must be > 0");
  }
  if (intervals.size() < 20) {
    throw fitting::InsufficientDataError("estimate_t1: need >= 20 intervals");
  }

  // Histogram over whole bin widths; sub-bin intervals are unresolvable and
  // censored. With this convention an exponential is exactly geometric
  // across the bins.
  std::map<long long, long long> hist;
  long long max_bin = 0;
  for (double tau : intervals) {
    long long m = static_cast<long long>(std::floor(tau / bin_width_s + 1e-9));
    if (m < 1) continue;
    ++hist[m];
    max_bin = std::max(max_bin, m);
  }
  if (hist.empty()) {
    throw fitting::InsufficientDataError(
        "estimate_t1: all intervals are censored below the bin width");
  }

  std::vector<fitting::DecayPoint> points;
  long long first = drop_first_bin ? 2 : 1;
  for (long long m = first; m <= max_bin; ++m) {
    auto it = hist.find(m);
    double n = it == hist.end() ? 0.0 : static_cast<double>(it->second);
    points.push_back({static_cast<double>(m) * bin_width_s, n,
                      std::sqrt(std::max(n, 1.0))});
  }
  if (points.size() < 4) {
    throw fitting::InsufficientDataError(
        "estimate_t1: too few resolvable interval bins");
  }

  // Fit A exp(-tau/T1): reuse the recovery model with the plateau pinned by
  // the long empty tail and a negative amplitude.
  const int n = static_cast<int>(points.size());
  fitting::LmProblem problem;
  problem.n_residuals = n;
  const double s = points.back().t_s;
  problem.eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                     Eigen::MatrixXd* jac) {
    for (int i = 0; i < n; ++i) {
      double t = points[i].t_s / s;
      double e = std::exp(-t / p[1]);
      double m = p[0] * e;
      double inv = 1.0 / points[i].sigma;
      r[i] = (m - points[i].y) * inv;
      if (jac) {
        (*jac)(i, 0) = e * inv;
        (*jac)(i, 1) = p[0] * e * t / (p[1] * p[1]) * inv;
      }
    }
  };
  Eigen::VectorXd p0(2), scales(2);
  p0 << (points.front().y > 0.0 ? points.front().y : 1.0), 0.3;
  scales << std::max(points.front().y, 1.0), 1.0;
  fitting::LmOutcome outcome = fitting::lm_fit(problem, p0, scales);

  fitting::FitResult fit;
  fit.names = {"amplitude", "t1_s"};
  fit.params = Eigen::VectorXd(2);
  fit.params << outcome.params[0], outcome.params[1] * s;
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2);
  t(1, 1) = s;
  fit.covariance = t * outcome.covariance * t.transpose();
  fit.sigmas = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.chi2_reduced = n > 2 ? outcome.chi2 / (n - 2) : 0.0;
  fit.converged = outcome.converged;
  fit.iterations = outcome.iterations;
  return fit;
}

}  // namespace cqed::readout
