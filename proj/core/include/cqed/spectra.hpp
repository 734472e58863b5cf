#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cqed/scattering.hpp"

namespace cqed::spectra {

// Lorentzian peak over a quadratic background plus a constant detector
// baseline:
//   y(f) = a (k/2)^2 / ((f-f0)^2 + (k/2)^2) + b0 + b1 (f-f0) + b2 (f-f0)^2
//          + baseline
struct BroadbandModel {
  double amplitude_a = 0.0;  // counts at the peak above background
  double f0_hz = 0.0;
  double kappa_hz = 0.0;
  double b0 = 0.0;           // counts
  double b1 = 0.0;           // counts / Hz
  double b2 = 0.0;           // counts / Hz^2
  double baseline = 590.0;   // dark counts

  void validate() const;
};

std::vector<double> broadband_intensity(const BroadbandModel& model,
                                        std::span<const double> freqs_hz);

// Multiplicative Fabry-Perot envelope, Taylor-expanded about delta = Delta.
struct FabryPerot {
  double f0 = 1.0;
  double f1 = 0.0;  // per Hz
  double f2 = 0.0;  // per Hz^2
};

// Narrow-scan model:
//   y(d) = [ T(d) + r0 + r1 d + r2 d^2 ] * (f0 + f1 (d-Delta) + f2 (d-Delta)^2)
// with T the unit-normalized transmission and r_j = b_j / a inherited from a
// broadband fit.
struct DitModel {
  model::CoupledSystem sys;
  scattering::Geometry geometry = scattering::Geometry::kDrop;
  double bg_r0 = 0.0;
  double bg_r1 = 0.0;  // per Hz
  double bg_r2 = 0.0;  // per Hz^2
  FabryPerot fp;
  bool thermal_average = false;
};

// Throws when the Fabry-Perot envelope is not positive over the grid.
std::vector<double> dit_intensity(const DitModel& model,
                                  const scattering::DriveGrid& grid);

struct SampledSpectrum {
  std::vector<double> frequency_hz;  // absolute frequency or detuning
  std::vector<long long> counts;
  double exposure_s = 1.0;

  void validate() const;
};

// Independent Poisson draws per point; deterministic per seed with
// per-point substreams.
SampledSpectrum sample_counts(std::span<const double> freqs_hz,
                              std::span<const double> expected_counts,
                              double exposure_s, std::uint64_t seed);

// CSV schema: frequency_hz,counts,exposure_s
void write_spectrum_csv(const std::filesystem::path& path,
                        const SampledSpectrum& spectrum);
SampledSpectrum read_spectrum_csv(const std::filesystem::path& path);

}  // namespace cqed::spectra
