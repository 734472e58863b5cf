#include "cqed/rng.hpp"

#include <cmath>

#include "cqed/constants.hpp"

namespace cqed {

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller on (0,1] x [0,1).
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * kPi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

double Rng::exponential(double mean) {
  return -mean * std::log(1.0 - uniform());
}

namespace {

long long poisson_inversion(Rng& rng, double mean) {
  // Knuth-style sequential search; fine for mean < ~10.
  double u = rng.uniform();
  double p = std::exp(-mean);
  double cum = p;
  long long k = 0;
  while (u > cum && k < 10000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cum += p;
  }
  return k;
}

// Hormann, "The transformed rejection method for generating Poisson random
// variables" (PTRD). Exact for mean >= 10.
long long poisson_ptrd(Rng& rng, double mean) {
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = -mean + k * std::log(mean) - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<long long>(kf);
  }
}

}  // namespace

long long Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(*this, mean);
  return poisson_ptrd(*this, mean);
}

}  // namespace cqed
