#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cqed/fitting.hpp"

namespace cqed::readout {

enum class Spin { kDown = 0, kUp = 1 };

// Thermal spin flips run at equal per-direction rate 1/(2 T1): the population
// relaxation constant is then T1 (matching the pump-probe recovery) and the
// equilibrium occupation is 50/50, as expected when the Zeeman splitting is
// far below k_B T. Optical pumping adds pump_rate to the down->up transition
// during the pump step only.
struct TelegraphConfig {
  double t1_s = 0.0;
  double pump_rate_per_s = 0.0;
  double mu_down = 0.0;  // expected counts per probe bin, spin down
  double mu_up = 0.0;    // expected counts per probe bin, spin up
  double bin_width_s = 0.0;
  double pump_duration_s = 0.0;
  double probe_duration_s = 0.0;
  std::uint64_t seed = 0;
  std::optional<Spin> initial_state;  // default: thermal 50/50

  void validate() const;
};

struct TelegraphTrace {
  Spin initial_state = Spin::kDown;
  std::vector<double> jump_times_s;     // within [0, pump + probe)
  std::vector<long long> bins;          // probe-step photon counts
  std::vector<double> bin_up_fraction;  // true up-state occupancy per bin
  double bin_width_s = 0.0;
  double probe_start_s = 0.0;

  Spin state_at(double t_s) const;
};

// Continuous-time two-state path with per-bin Poisson counts whose mean is
// the time-weighted mixture of mu_down/mu_up over the bin. Sequence i uses
// sub-stream (seed, i).
std::vector<TelegraphTrace> simulate_telegraph(const TelegraphConfig& cfg,
                                               int n_sequences);

// Sum counts into wider bins; a trailing partial window is dropped.
TelegraphTrace rebin(const TelegraphTrace& trace, int factor);

struct BimodalFit {
  double mu_down = 0.0;
  double mu_up = 0.0;
  double sigma_down = 0.0;
  double sigma_up = 0.0;
  double weight_a = 0.0;  // shots assigned to the down component
  double weight_b = 0.0;
  bool degenerate = false;  // components collapsed within joint sigma
  int iterations = 0;
};

// Maximum-likelihood Poisson-mixture fit (EM) over raw per-shot counts.
BimodalFit fit_bimodal(std::span<const long long> shots);

struct FidelityResult {
  long long threshold = 0;
  double fidelity = 0.0;
  double sigma = 0.0;
  double p_down_given_up = 0.0;
  double p_up_given_down = 0.0;
};

// F = 1 - (p(down|up) + p(up|down))/2 with exact Poisson CDFs; shots with
// k > threshold read as up. Uncertainty from dCDF/dmu = -mu^T e^-mu / T!.
FidelityResult fidelity_at_threshold(double mu_down, double mu_up,
                                     long long threshold, double sigma_down = 0.0,
                                     double sigma_up = 0.0);

// Exhaustive scan over integer thresholds in [0, ceil(mu_up + 10 sqrt(mu_up))];
// ties resolve to the smaller threshold.
FidelityResult optimal_threshold(const BimodalFit& fit);

// Threshold the rebinned trace and return dwell times between consecutive
// label changes (boundary dwells are not counted).
std::vector<double> classify_and_intervals(const TelegraphTrace& trace,
                                           long long threshold);

// Histogram the intervals at bin_width and fit an exponential; the first bin
// collects false jumps from shot noise and is dropped by default.
fitting::FitResult estimate_t1_from_intervals(std::span<const double> intervals,
                                              double bin_width_s,
                                              bool drop_first_bin = true);

double poisson_pmf(long long k, double mu);
double poisson_cdf(long long k, double mu);
double poisson_cdf_dmu(long long k, double mu);  // -mu^k e^-mu / k!

}  // namespace cqed::readout
