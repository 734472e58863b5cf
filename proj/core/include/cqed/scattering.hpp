#pragma once

#include <complex>
#include <vector>

#include "cqed/core_model.hpp"

namespace cqed::scattering {

enum class Geometry { kThru, kDrop };
enum class Channel { kTransmission, kFluorescence };

// Drive detunings delta = f_drive - f_cav, strictly increasing.
struct DriveGrid {
  std::vector<double> detunings_hz;

  static DriveGrid linspace(double lo_hz, double hi_hz, int points);
  void validate() const;
};

struct ComplexSpectrum {
  std::vector<double> detunings_hz;
  std::vector<std::complex<double>> amplitudes;

  std::vector<double> intensity() const;  // |amplitude|^2
};

// Weak-drive steady state of the coupled cavity-emitter system
// (sigma_gg = 1 hard-coded; saturation is out of scope).
//
// thru:  S11 = [(i d - ki/2)(i(d-D) - (g+gd)/2) + g^2] / Dn
// drop:  S21 = kc (i(d-D) - (g+gd)/2) / Dn
// fluo:  F-  = -i g sqrt(kc gamma) / Dn
// with Dn = (i d - (ki+2kc)/2)(i(d-D) - (gamma+gd)/2) + g^2, per unit input.
std::complex<double> s_thru_at(const model::CoupledSystem& sys, double delta_hz);
std::complex<double> s_drop_at(const model::CoupledSystem& sys, double delta_hz);
std::complex<double> fluorescence_at(const model::CoupledSystem& sys, double delta_hz);

ComplexSpectrum s_thru(const model::CoupledSystem& sys, const DriveGrid& grid);
ComplexSpectrum s_drop(const model::CoupledSystem& sys, const DriveGrid& grid);
ComplexSpectrum fluorescence(const model::CoupledSystem& sys, const DriveGrid& grid);

// Cavity-dressed emitter line: Lamb-shifted center and Purcell-broadened width.
struct EffectiveLineshape {
  double delta_eff_hz;
  double gamma_eff_hz;
};
EffectiveLineshape effective_lineshape(const model::CoupledSystem& sys);

// Bare add-drop cavity response (emitter shelved in the dark orbital).
std::complex<double> dark_amplitude_at(const model::CoupledSystem& sys,
                                       double delta_hz, Geometry geometry);
ComplexSpectrum dark_spectra(const model::CoupledSystem& sys, const DriveGrid& grid,
                             Geometry geometry);

// Classical orbital-thermalization average,
// T = p_g |S|^2 + (1 - p_g) |S_dark|^2; the dark fluorescence term is zero.
std::vector<double> thermal_average(const model::CoupledSystem& sys,
                                    const DriveGrid& grid, Geometry geometry,
                                    Channel channel);

}  // namespace cqed::scattering
