#include <doctest.h>

#include <stdexcept>

#include "cqed/loss_budget.hpp"

using namespace cqed::budget;

TEST_CASE("transmission decomposition of the simulated device") {
  Decomposition d = decompose_from_transmission(4250.0, 0.90);
  CHECK(d.q_c == doctest::Approx(8960.0).epsilon(0.002));
  CHECK(d.q_rad == doctest::Approx(83000.0).epsilon(0.01));
}

TEST_CASE("decomposition infeasible cases") {
  CHECK_THROWS_AS(decompose_from_transmission(4250.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(decompose_from_transmission(100.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(decompose_from_transmission(4250.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(decompose_from_transmission(4250.0, 1.2), std::invalid_argument);
}

TEST_CASE("decomposition round trip") {
  for (double t : {0.1, 0.5, 0.62, 0.90, 0.99}) {
    Decomposition d = decompose_from_transmission(4250.0, t);
    double t_back = 4.0 * (4250.0 / d.q_c) * (4250.0 / d.q_c);
    CHECK(t_back == doctest::Approx(t).epsilon(1e-12));
    // closure: 1/q_sim = 1/q_rad + 2/q_c
    CHECK(1.0 / 4250.0 ==
          doctest::Approx(1.0 / d.q_rad + 2.0 / d.q_c).epsilon(1e-12));
  }
}

TEST_CASE("fabrication q") {
  CHECK(fabrication_q(3540.0, 4250.0) == doctest::Approx(21000.0).epsilon(0.01));
  CHECK(fabrication_q(2125.0, 4250.0) == doctest::Approx(4250.0));
  CHECK_THROWS_AS(fabrication_q(4250.0, 4250.0), std::domain_error);
  CHECK_THROWS_AS(fabrication_q(4300.0, 4250.0), std::domain_error);
  // q_exp -> q_sim from below runs into the configurable cap
  CHECK_THROWS_AS(fabrication_q(4249.99999, 4250.0), std::domain_error);
}

TEST_CASE("budget closure invariants hold for constructed budgets") {
  QBudget b = make_budget(4250.0, 0.90, 3540.0, 406.77e12);
  CHECK_NOTHROW(b.validate());
  QBudget broken = b;
  broken.q_rad *= 1.05;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("on-resonance estimates") {
  QBudget b = make_budget(4250.0, 0.90, 3540.0, 406.77e12);
  OnResonance est = on_resonance_estimates(b);
  CHECK(est.t_est == doctest::Approx(0.624).epsilon(0.005));
  CHECK(est.r_est == doctest::Approx(0.00183).epsilon(0.01));
  // Folding fabrication loss into the radiative channel raises R.
  OnResonance folded = on_resonance_estimates(b, true);
  CHECK(folded.r_est > est.r_est);
  CHECK(folded.t_est == est.t_est);
}

TEST_CASE("on-resonance transmission vanishes for weak coupling") {
  QBudget b = make_budget(4250.0, 1e-6, 4000.0, 406.77e12);
  OnResonance est = on_resonance_estimates(b);
  CHECK(est.t_est < 1e-6);
}

TEST_CASE("q to rate reproduces the measured loss rates") {
  CHECK(q_to_rate(3540.0, 406.77e12) == doctest::Approx(114.9e9).epsilon(0.002));
  CHECK(q_to_rate(8960.0, 406.77e12) == doctest::Approx(45.4e9).epsilon(0.002));
  CHECK(q_to_rate(21000.0, 406.77e12) == doctest::Approx(19.37e9).epsilon(0.002));
  // exact up to rounding: q_to_rate(q) * q = f0
  for (double q : {10.0, 3540.0, 1e7}) {
    CHECK(q_to_rate(q, 406.77e12) * q == doctest::Approx(406.77e12).epsilon(1e-15));
  }
  CHECK_THROWS_AS(q_to_rate(0.0, 406.77e12), std::invalid_argument);
}
