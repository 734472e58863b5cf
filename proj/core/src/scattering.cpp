#include "cqed/scattering.hpp"

#include <cmath>
#include <stdexcept>

namespace cqed::scattering {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

struct Terms {
  double kappa;    // kappa_i + 2 kappa_c
  double delta_a;  // emitter-cavity detuning
};

Terms terms_of(const model::RateSet& r) {
  double kappa = r.kappa_total_hz();
  if (kappa <= 0.0) throw std::domain_error("scattering: kappa_total must be > 0");
  return {kappa, r.detuning_hz()};
}

// Shared denominator of every amplitude.
cplx denom(const model::RateSet& r, const Terms& t, double delta) {
  cplx dc = kI * delta - 0.5 * t.kappa;
  cplx de = kI * (delta - t.delta_a) - 0.5 * (r.gamma_hz + r.gamma_d_hz);
  return dc * de + r.g_hz * r.g_hz;
}

ComplexSpectrum map_grid(const model::CoupledSystem& sys, const DriveGrid& grid,
                         cplx (*f)(const model::CoupledSystem&, double)) {
  grid.validate();
  ComplexSpectrum out;
  out.detunings_hz = grid.detunings_hz;
  out.amplitudes.reserve(grid.detunings_hz.size());
  for (double d : grid.detunings_hz) out.amplitudes.push_back(f(sys, d));
  return out;
}

}  // namespace

DriveGrid DriveGrid::linspace(double lo_hz, double hi_hz, int points) {
  if (points < 2 || hi_hz <= lo_hz) {
    throw std::invalid_argument("DriveGrid::linspace: need points >= 2 and hi > lo");
  }
  DriveGrid g;
  g.detunings_hz.resize(points);
  for (int i = 0; i < points; ++i) {
    g.detunings_hz[i] = lo_hz + (hi_hz - lo_hz) * i / (points - 1);
  }
  return g;
}

void DriveGrid::validate() const {
  for (std::size_t i = 0; i < detunings_hz.size(); ++i) {
    if (!std::isfinite(detunings_hz[i])) {
      throw std::invalid_argument("DriveGrid: detunings must be finite");
    }
    if (i > 0 && detunings_hz[i] <= detunings_hz[i - 1]) {
      throw std::invalid_argument("DriveGrid: detunings must be strictly increasing");
    }
  }
}

std::vector<double> ComplexSpectrum::intensity() const {
  std::vector<double> out(amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) out[i] = std::norm(amplitudes[i]);
  return out;
}

std::complex<double> s_thru_at(const model::CoupledSystem& sys, double delta) {
  const auto& r = sys.rates;
  Terms t = terms_of(r);
  cplx de = kI * (delta - t.delta_a) - 0.5 * (r.gamma_hz + r.gamma_d_hz);
  cplx num = (kI * delta - 0.5 * r.kappa_i_hz) * de + r.g_hz * r.g_hz;
  return num / denom(r, t, delta);
}

std::complex<double> s_drop_at(const model::CoupledSystem& sys, double delta) {
  const auto& r = sys.rates;
  Terms t = terms_of(r);
  cplx de = kI * (delta - t.delta_a) - 0.5 * (r.gamma_hz + r.gamma_d_hz);
  return r.kappa_c_hz * de / denom(r, t, delta);
}

std::complex<double> fluorescence_at(const model::CoupledSystem& sys, double delta) {
  const auto& r = sys.rates;
  if (r.gamma_hz <= 0.0) throw std::domain_error("fluorescence: gamma must be > 0");
  Terms t = terms_of(r);
  cplx num = -kI * r.g_hz * std::sqrt(r.kappa_c_hz * r.gamma_hz);
  return num / denom(r, t, delta);
}

ComplexSpectrum s_thru(const model::CoupledSystem& sys, const DriveGrid& grid) {
  return map_grid(sys, grid, &s_thru_at);
}

ComplexSpectrum s_drop(const model::CoupledSystem& sys, const DriveGrid& grid) {
  return map_grid(sys, grid, &s_drop_at);
}

ComplexSpectrum fluorescence(const model::CoupledSystem& sys, const DriveGrid& grid) {
  return map_grid(sys, grid, &fluorescence_at);
}

EffectiveLineshape effective_lineshape(const model::CoupledSystem& sys) {
  const auto& r = sys.rates;
  Terms t = terms_of(r);
  double g2 = r.g_hz * r.g_hz;
  double lorentz = 0.25 * t.kappa * t.kappa / (t.delta_a * t.delta_a + 0.25 * t.kappa * t.kappa);
  EffectiveLineshape out;
  out.delta_eff_hz =
      t.delta_a * (1.0 + g2 / (t.delta_a * t.delta_a + 0.25 * t.kappa * t.kappa));
  out.gamma_eff_hz = r.gamma_hz + r.gamma_d_hz + 4.0 * g2 / t.kappa * lorentz;
  return out;
}

std::complex<double> dark_amplitude_at(const model::CoupledSystem& sys,
                                       double delta, Geometry geometry) {
  const auto& r = sys.rates;
  Terms t = terms_of(r);
  cplx dc = kI * delta - 0.5 * t.kappa;
  if (geometry == Geometry::kThru) {
    return (kI * delta - 0.5 * r.kappa_i_hz) / dc;
  }
  return r.kappa_c_hz / dc;
}

ComplexSpectrum dark_spectra(const model::CoupledSystem& sys, const DriveGrid& grid,
                             Geometry geometry) {
  grid.validate();
  ComplexSpectrum out;
  out.detunings_hz = grid.detunings_hz;
  out.amplitudes.reserve(grid.detunings_hz.size());
  for (double d : grid.detunings_hz) {
    out.amplitudes.push_back(dark_amplitude_at(sys, d, geometry));
  }
  return out;
}

std::vector<double> thermal_average(const model::CoupledSystem& sys,
                                    const DriveGrid& grid, Geometry geometry,
                                    Channel channel) {
  sys.validate();
  double pg = model::bright_population(sys.rates.delta_e_hz, sys.temperature_k);
  std::vector<double> out;
  out.reserve(grid.detunings_hz.size());
  if (channel == Channel::kFluorescence) {
    auto bright = fluorescence(sys, grid).intensity();
    for (double v : bright) out.push_back(pg * v);
    return out;
  }
  ComplexSpectrum bright = geometry == Geometry::kThru ? s_thru(sys, grid)
                                                       : s_drop(sys, grid);
  ComplexSpectrum dark = dark_spectra(sys, grid, geometry);
  for (std::size_t i = 0; i < bright.amplitudes.size(); ++i) {
    out.push_back(pg * std::norm(bright.amplitudes[i]) +
                  (1.0 - pg) * std::norm(dark.amplitudes[i]));
  }
  return out;
}

}  // namespace cqed::scattering
