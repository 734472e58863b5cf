#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cqed/spectra.hpp"

using namespace cqed;
using namespace cqed::spectra;

namespace {

model::CoupledSystem siv1_system() {
  model::CoupledSystem sys;
  sys.rates.f_cav_hz = 406.774e12;
  sys.rates.f_emitter_hz = 406.774e12 + 0.523e9;
  sys.rates.kappa_i_hz = 0.0;
  sys.rates.kappa_c_hz = 57.45e9;
  sys.rates.gamma_hz = 0.110e9;
  sys.rates.g_hz = 2.13e9;
  sys.rates.delta_e_hz = 50e9;
  sys.temperature_k = 4.0;
  return sys;
}

}  // namespace

TEST_CASE("broadband model values") {
  BroadbandModel m;
  m.amplitude_a = 1000.0;
  m.f0_hz = 400e12;
  m.kappa_hz = 100e9;
  m.baseline = 0.0;

  double freqs[] = {400e12, 400e12 + 50e9, 400e12 - 50e9};
  auto y = broadband_intensity(m, freqs);
  CHECK(y[0] == doctest::Approx(1000.0));          // peak value a
  CHECK(y[1] == doctest::Approx(500.0));           // half width at kappa/2
  CHECK(y[2] == doctest::Approx(500.0));

  m.baseline = 590.0;  // default detector floor
  BroadbandModel def;
  CHECK(def.baseline == 590.0);
  auto y2 = broadband_intensity(m, freqs);
  CHECK(y2[0] == doctest::Approx(1590.0));
}

TEST_CASE("broadband is symmetric about the resonance once background is removed") {
  BroadbandModel m;
  m.amplitude_a = 2500.0;
  m.f0_hz = 406.774e12;
  m.kappa_hz = 114.9e9;
  m.b0 = 100.0;
  m.b1 = 2e-9;
  m.b2 = 1e-21;
  m.baseline = 590.0;
  for (double d : {10e9, 37e9, 91e9, 200e9}) {
    double fp = m.f0_hz + d, fm = m.f0_hz - d;
    double freqs[] = {fp, fm};
    auto y = broadband_intensity(m, freqs);
    double lp = y[0] - (m.b0 + m.b1 * d + m.b2 * d * d) - m.baseline;
    double lm = y[1] - (m.b0 - m.b1 * d + m.b2 * d * d) - m.baseline;
    CHECK(lp == doctest::Approx(lm).epsilon(1e-12));
  }
}

TEST_CASE("dit intensity trivial envelopes") {
  DitModel m;
  m.sys = siv1_system();
  m.geometry = scattering::Geometry::kDrop;
  auto grid = scattering::DriveGrid::linspace(-10e9, 10e9, 401);

  auto base = dit_intensity(m, grid);
  auto s = scattering::s_drop(m.sys, grid).intensity();
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i] == doctest::Approx(s[i]).epsilon(1e-14));
  }

  DitModel doubled = m;
  doubled.fp.f0 = 2.0;
  auto twice = dit_intensity(doubled, grid);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(twice[i] == doctest::Approx(2.0 * base[i]).epsilon(1e-14));
  }
}

TEST_CASE("dit intensity shows the narrow dip inside the drop peak") {
  DitModel m;
  m.sys = siv1_system();
  m.geometry = scattering::Geometry::kDrop;
  auto grid = scattering::DriveGrid::linspace(-4e9, 6e9, 2001);
  auto y = dit_intensity(m, grid);

  double y_min = 1e9;
  double at = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < y_min) {
      y_min = y[i];
      at = grid.detunings_hz[i];
    }
  }
  // Dip sits at the emitter detuning, with 1/(1+C)^2-scale depth inside a
  // near-unity drop background (kappa >> the scan span).
  CHECK(std::fabs(at - 0.523e9) < 50e6);
  CHECK(y_min == doctest::Approx(0.1686).epsilon(0.02));

  // Frozen regression vector (hand-checked against the dip structure above).
  double probe[] = {-2e9, 0.0, 0.523e9, 1.2e9, 4e9};
  scattering::DriveGrid pgrid;
  pgrid.detunings_hz.assign(std::begin(probe), std::end(probe));
  auto v = dit_intensity(m, pgrid);
  const double golden[] = {0.99862496613721385, 0.94880114675256655,
                           0.16853725005648637, 0.97281758747868807,
                           0.99708861962241735};
  for (int i = 0; i < 5; ++i) {
    CHECK(v[i] == doctest::Approx(golden[i]).epsilon(1e-9));
  }
}

TEST_CASE("dit with zero coupling reduces to the dark cavity") {
  DitModel m;
  m.sys = siv1_system();
  m.sys.rates.g_hz = 0.0;
  m.geometry = scattering::Geometry::kThru;
  auto grid = scattering::DriveGrid::linspace(-200e9, 200e9, 501);
  auto y = dit_intensity(m, grid);
  auto dark =
      scattering::dark_spectra(m.sys, grid, scattering::Geometry::kThru).intensity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(y[i] == doctest::Approx(dark[i]).epsilon(1e-14));
  }
}

TEST_CASE("non-positive Fabry-Perot envelope is rejected") {
  DitModel m;
  m.sys = siv1_system();
  m.fp.f0 = 1.0;
  m.fp.f1 = 1.0e-9;  // crosses zero inside the window
  auto grid = scattering::DriveGrid::linspace(-10e9, 10e9, 101);
  CHECK_THROWS_AS(dit_intensity(m, grid), std::invalid_argument);
}

TEST_CASE("sample counts determinism and trivial cases") {
  std::vector<double> freqs{1.0, 2.0, 3.0, 4.0};
  std::vector<double> zeros{0.0, 0.0, 0.0, 0.0};
  auto z = sample_counts(freqs, zeros, 0.1, 42);
  for (long long c : z.counts) CHECK(c == 0);

  std::vector<double> mu{10.0, 100.0, 1000.0, 1e5};
  auto a = sample_counts(freqs, mu, 0.1, 42);
  auto b = sample_counts(freqs, mu, 0.1, 42);
  auto c = sample_counts(freqs, mu, 0.1, 43);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
}

TEST_CASE("sample counts mean follows the law of large numbers") {
  const int n = 10000;
  std::vector<double> freqs(n), mu(n, 100.0);
  for (int i = 0; i < n; ++i) freqs[i] = i;
  auto s = sample_counts(freqs, mu, 1.0, 7);
  double mean = 0.0;
  for (long long c : s.counts) mean += static_cast<double>(c);
  mean /= n;
  CHECK(std::fabs(mean - 100.0) < 0.3);  // 3 standard errors
}

TEST_CASE("spectrum csv round trip") {
  auto path = std::filesystem::temp_directory_path() / "cqed_spectrum_test.csv";
  SampledSpectrum s;
  s.frequency_hz = {406.774e12, 406.775e12, 406.776e12};
  s.counts = {100, 200, 300};
  s.exposure_s = 0.25;
  write_spectrum_csv(path, s);
  SampledSpectrum r = read_spectrum_csv(path);
  CHECK(r.frequency_hz == s.frequency_hz);
  CHECK(r.counts == s.counts);
  CHECK(r.exposure_s == s.exposure_s);
  std::filesystem::remove(path);
}
