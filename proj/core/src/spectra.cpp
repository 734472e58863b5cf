#include "cqed/spectra.hpp"

#include <cmath>
#include <stdexcept>

#include "cqed/csv.hpp"
#include "cqed/rng.hpp"

namespace cqed::spectra {

void BroadbandModel::validate() const {
  if (kappa_hz <= 0.0) throw std::invalid_argument("BroadbandModel: kappa must be > 0");
  if (amplitude_a < 0.0) throw std::invalid_argument("BroadbandModel: amplitude must be >= 0");
  if (baseline < 0.0) throw std::invalid_argument("BroadbandModel: baseline must be >= 0");
}

std::vector<double> broadband_intensity(const BroadbandModel& model,
                                        std::span<const double> freqs_hz) {
  model.validate();
  std::vector<double> out;
  out.reserve(freqs_hz.size());
  double hw = 0.5 * model.kappa_hz;
  for (double f : freqs_hz) {
    if (!std::isfinite(f)) throw std::invalid_argument("broadband_intensity: frequency not finite");
    double d = f - model.f0_hz;
    double lorentz = model.amplitude_a * hw * hw / (d * d + hw * hw);
    out.push_back(lorentz + model.b0 + model.b1 * d + model.b2 * d * d + model.baseline);
  }
  return out;
}

std::vector<double> dit_intensity(const DitModel& model,
                                  const scattering::DriveGrid& grid) {
  grid.validate();
  double delta_a = model.sys.rates.detuning_hz();

  std::vector<double> t;
  if (model.thermal_average) {
    t = scattering::thermal_average(model.sys, grid, model.geometry,
                                    scattering::Channel::kTransmission);
  } else {
    auto amp = model.geometry == scattering::Geometry::kThru
                   ? scattering::s_thru(model.sys, grid)
                   : scattering::s_drop(model.sys, grid);
    t = amp.intensity();
  }

  std::vector<double> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double d = grid.detunings_hz[i];
    double x = d - delta_a;
    double envelope = model.fp.f0 + model.fp.f1 * x + model.fp.f2 * x * x;
    if (envelope <= 0.0) {
      throw std::invalid_argument(
          "dit_intensity: Fabry-Perot envelope not positive over the scan window");
    }
    double bg = model.bg_r0 + model.bg_r1 * d + model.bg_r2 * d * d;
    out.push_back((t[i] + bg) * envelope);
  }
  return out;
}

void SampledSpectrum::validate() const {
  if (frequency_hz.size() != counts.size()) {
    throw std::invalid_argument("SampledSpectrum: length mismatch");
  }
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("SampledSpectrum: counts must be >= 0");
  }
}

SampledSpectrum sample_counts(std::span<const double> freqs_hz,
                              std::span<const double> expected_counts,
                              double exposure_s, std::uint64_t seed) {
  if (freqs_hz.size() != expected_counts.size()) {
    throw std::invalid_argument("sample_counts: length mismatch");
  }
  SampledSpectrum out;
  out.frequency_hz.assign(freqs_hz.begin(), freqs_hz.end());
  out.exposure_s = exposure_s;
  out.counts.reserve(expected_counts.size());
  for (std::size_t i = 0; i < expected_counts.size(); ++i) {
    double mu = expected_counts[i];
    if (mu < 0.0) throw std::invalid_argument("sample_counts: expected counts must be >= 0");
    // Per-point substream: reproducible regardless of evaluation order.
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    out.counts.push_back(rng.poisson(mu));
  }
  return out;
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const SampledSpectrum& spectrum) {
  spectrum.validate();
  std::vector<std::vector<double>> rows;
  rows.reserve(spectrum.frequency_hz.size());
  for (std::size_t i = 0; i < spectrum.frequency_hz.size(); ++i) {
    rows.push_back({spectrum.frequency_hz[i],
                    static_cast<double>(spectrum.counts[i]), spectrum.exposure_s});
  }
  write_csv(path, {"frequency_hz", "counts", "exposure_s"}, rows);
}

SampledSpectrum read_spectrum_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  int fc = table.column("frequency_hz");
  int cc = table.column("counts");
  int ec = table.column("exposure_s");
  if (fc < 0 || cc < 0 || ec < 0) {
    throw std::runtime_error(path.string() +
                             ": expected columns frequency_hz,counts,exposure_s");
  }
  SampledSpectrum out;
  for (const auto& row : table.rows) {
    out.frequency_hz.push_back(row[fc]);
    out.counts.push_back(static_cast<long long>(std::llround(row[cc])));
    out.exposure_s = row[ec];
  }
  out.validate();
  return out;
}

}  // namespace cqed::spectra
