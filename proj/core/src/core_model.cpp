#include "cqed/core_model.hpp"

#include <cmath>
#include <stdexcept>

#include "cqed/constants.hpp"
#include "cqed/rng.hpp"

namespace cqed::model {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void RateSet::validate() const {
  require(f_cav_hz > 0.0, "RateSet: f_cav must be > 0");
  require(f_emitter_hz > 0.0, "RateSet: f_emitter must be > 0");
  require(kappa_i_hz >= 0.0 && kappa_c_hz >= 0.0 && gamma_hz >= 0.0 &&
              gamma_d_hz >= 0.0 && g_hz >= 0.0,
          "RateSet: rates must be >= 0");
}

void CavityMode::validate() const {
  require(f0_hz > 0.0, "CavityMode: f0 must be > 0");
  require(q_total > 0.0, "CavityMode: q_total must be > 0");
  require(v_norm > 0.0, "CavityMode: v_norm must be > 0");
  require(overlap >= 0.0 && overlap <= 1.0, "CavityMode: overlap must be in [0,1]");
  require(decay_len_z_m > 0.0, "CavityMode: decay_len_z must be > 0");
}

void EmitterParams::validate() const {
  require(radiative_efficiency >= 0.0 && radiative_efficiency <= 1.0,
          "EmitterParams: radiative_efficiency must be in [0,1]");
  require(quantum_efficiency >= 0.0 && quantum_efficiency <= 1.0,
          "EmitterParams: quantum_efficiency must be in [0,1]");
  require(debye_waller >= 0.0 && debye_waller <= 1.0,
          "EmitterParams: debye_waller must be in [0,1]");
  double n2 = dipole_axis[0] * dipole_axis[0] + dipole_axis[1] * dipole_axis[1] +
              dipole_axis[2] * dipole_axis[2];
  require(std::fabs(n2 - 1.0) < 1e-9, "EmitterParams: dipole_axis must be unit norm");
  require(depth_sigma_m > 0.0, "EmitterParams: depth_sigma must be > 0");
  require(areal_density_per_m2 >= 0.0, "EmitterParams: areal_density must be >= 0");
}

void CoupledSystem::validate() const {
  rates.validate();
  require(temperature_k > 0.0, "CoupledSystem: temperature must be > 0");
}

double cooperativity(const RateSet& rates) {
  double kappa = rates.kappa_total_hz();
  if (kappa <= 0.0 || rates.gamma_hz <= 0.0) {
    throw std::domain_error("cooperativity: kappa_total and gamma must be > 0");
  }
  return 4.0 * rates.g_hz * rates.g_hz / (kappa * rates.gamma_hz);
}

double purcell_factor(double q, double v_norm, double overlap,
                      double dipole_tilt_deg) {
  if (q <= 0.0 || v_norm <= 0.0) {
    throw std::invalid_argument("purcell_factor: q and v_norm must be > 0");
  }
  return 3.0 / (4.0 * kPi * kPi) * (q / v_norm) * overlap *
         std::cos(deg_to_rad(dipole_tilt_deg));
}

double purcell_from_eta(double eta, double dipole_tilt_deg) {
  return 3.0 / (4.0 * kPi * kPi) * eta * std::cos(deg_to_rad(dipole_tilt_deg));
}

double cooperativity_from_purcell(double f, double quantum_efficiency,
                                  double debye_waller) {
  if (quantum_efficiency < 0.0 || quantum_efficiency > 1.0 ||
      debye_waller < 0.0 || debye_waller > 1.0) {
    throw std::invalid_argument("cooperativity_from_purcell: efficiencies must be in [0,1]");
  }
  return quantum_efficiency * debye_waller * f;
}

double bright_population(double delta_e_hz, double temperature_k) {
  if (temperature_k <= 0.0) {
    throw std::invalid_argument("bright_population: temperature must be > 0");
  }
  double x = kPlanck * delta_e_hz / (kBoltzmann * temperature_k);
  return 1.0 / (1.0 + std::exp(-x));
}

double overlap_at_depth(double depth_m, double decay_len_z_m,
                        double overlap_surface_ref, double depth_ref_m) {
  if (decay_len_z_m <= 0.0) {
    throw std::invalid_argument("overlap_at_depth: decay_len_z must be > 0");
  }
  return overlap_surface_ref * std::exp(-(depth_m - depth_ref_m) / decay_len_z_m);
}

double mode_envelope_area_m2(const CavityMode& mode, double gap_thickness_m,
                             double n_index, double depth_ref_m) {
  mode.validate();
  double lambda_m = kSpeedOfLight / mode.f0_hz;
  double unit = lambda_m / n_index;
  double v_abs_m3 = mode.v_norm * unit * unit * unit;
  // Vertical extent: the guided slab profile integrates to ~h/2 of the peak,
  // the substrate tail to (interface intensity) * decay length.
  double interface_overlap =
      mode.overlap * std::exp(depth_ref_m / mode.decay_len_z_m);
  double z_eff = 0.5 * gap_thickness_m + interface_overlap * mode.decay_len_z_m;
  return v_abs_m3 / z_eff;
}

double expected_coupled_emitters(double q, double c_threshold,
                                 const EmitterParams& emitter,
                                 const CavityMode& mode, double mode_area_m2,
                                 long long samples, std::uint64_t seed,
                                 double dipole_tilt_deg) {
  emitter.validate();
  mode.validate();
  if (mode_area_m2 <= 0.0) {
    throw std::invalid_argument("expected_coupled_emitters: mode_area must be > 0");
  }
  if (samples < 10000) {
    throw std::invalid_argument("expected_coupled_emitters: samples must be >= 1e4");
  }
  if (emitter.areal_density_per_m2 == 0.0) return 0.0;

  // Emitters-under-envelope weight. Positions are importance-sampled from the
  // peak-normalized Gaussian envelope itself, under which the envelope value
  // seen by an emitter is uniform on (0,1].
  const double weight = emitter.areal_density_per_m2 * mode_area_m2;

  const int kPartitions = 16;
  const long long per = samples / kPartitions;
  const long long rem = samples % kPartitions;

  long long hits = 0;
  for (int p = 0; p < kPartitions; ++p) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(p));
    long long n = per + (p < rem ? 1 : 0);
    for (long long i = 0; i < n; ++i) {
      double depth = rng.normal(emitter.depth_mean_m, emitter.depth_sigma_m);
      if (depth < 0.0) depth = 0.0;
      double envelope = 1.0 - rng.uniform();  // (0, 1]
      // Standing-wave modulation of the Bloch mode along the beam axis.
      double phase = kPi * rng.uniform();
      double standing = std::cos(phase) * std::cos(phase);
      // Four <111> orientations; two couple to the TE field.
      bool coupled = rng.uniform() < 0.5;

      if (c_threshold <= 0.0) {
        ++hits;
        continue;
      }
      if (!coupled) continue;
      double ov = overlap_at_depth(depth, mode.decay_len_z_m, mode.overlap,
                                   emitter.depth_mean_m) *
                  envelope * standing;
      double f = purcell_factor(q, mode.v_norm, ov, dipole_tilt_deg);
      double c = emitter.radiative_efficiency * f;
      if (c > c_threshold) ++hits;
    }
  }
  return weight * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace cqed::model
