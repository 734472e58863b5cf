#pragma once

namespace cqed::budget {

// Coupled-mode-theory loss bookkeeping:
//   1/q_sim = 1/q_rad + 2/q_c        (two symmetric waveguide ports)
//   1/q_exp = 1/q_sim + 1/q_fab
struct QBudget {
  double q_sim = 0.0;
  double q_exp = 0.0;
  double q_rad = 0.0;
  double q_c = 0.0;
  double q_fab = 0.0;
  double f0_hz = 0.0;

  void validate() const;  // throws when the closure identities are violated
};

struct Decomposition {
  double q_rad;
  double q_c;
};

// From the simulated on-resonance transmission T = 4 q_sim^2 / q_c^2.
// Throws infeasible-budget (std::domain_error) when the implied radiative
// loss would be nonpositive (t_sim too close to 1).
Decomposition decompose_from_transmission(double q_sim, double t_sim);

// 1/q_fab = 1/q_exp - 1/q_sim, capped; throws when q_exp >= q_sim or the
// result exceeds the cap.
double fabrication_q(double q_exp, double q_sim, double cap = 1e9);

// Full budget from the three measured/simulated inputs.
QBudget make_budget(double q_sim, double t_sim, double q_exp, double f0_hz);

struct OnResonance {
  double r_est;
  double t_est;
};

// R = (q_exp/q_rad)^2, T = 4 (q_exp/q_c)^2. Setting fold_fab_into_rad
// replaces q_rad by the harmonic combination with q_fab.
OnResonance on_resonance_estimates(const QBudget& budget,
                                   bool fold_fab_into_rad = false);

// kappa_j = f0 / q_j (cyclic rate in Hz).
double q_to_rate(double q, double f0_hz);

}  // namespace cqed::budget
