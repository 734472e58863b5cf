#include "cqed/loss_budget.hpp"

#include <cmath>
#include <stdexcept>

namespace cqed::budget {

void QBudget::validate() const {
  if (q_sim <= 0.0 || q_exp <= 0.0 || q_rad <= 0.0 || q_c <= 0.0 ||
      q_fab <= 0.0 || f0_hz <= 0.0) {
    throw std::invalid_argument("QBudget: all entries must be > 0");
  }
  double lhs1 = 1.0 / q_sim;
  double rhs1 = 1.0 / q_rad + 2.0 / q_c;
  if (std::fabs(lhs1 - rhs1) > 1e-9 * lhs1) {
    throw std::invalid_argument("QBudget: 1/q_sim != 1/q_rad + 2/q_c");
  }
  double lhs2 = 1.0 / q_exp;
  double rhs2 = 1.0 / q_sim + 1.0 / q_fab;
  if (std::fabs(lhs2 - rhs2) > 1e-9 * lhs2) {
    throw std::invalid_argument("QBudget: 1/q_exp != 1/q_sim + 1/q_fab");
  }
}

Decomposition decompose_from_transmission(double q_sim, double t_sim) {
  if (q_sim <= 0.0) throw std::invalid_argument("decompose: q_sim must be > 0");
  if (t_sim <= 0.0 || t_sim > 1.0) {
    throw std::invalid_argument("decompose: t_sim must be in (0,1]");
  }
  double q_c = 2.0 * q_sim / std::sqrt(t_sim);
  double inv_rad = 1.0 / q_sim - 2.0 / q_c;
  if (inv_rad <= 0.0) {
    throw std::domain_error("decompose: infeasible budget, 2/q_c >= 1/q_sim");
  }
  return {1.0 / inv_rad, q_c};
}

double fabrication_q(double q_exp, double q_sim, double cap) {
  if (q_exp <= 0.0 || q_sim <= 0.0) {
    throw std::invalid_argument("fabrication_q: q factors must be > 0");
  }
  if (q_exp >= q_sim) {
    throw std::domain_error("fabrication_q: infeasible, q_exp >= q_sim");
  }
  double q_fab = 1.0 / (1.0 / q_exp - 1.0 / q_sim);
  if (q_fab > cap) {
    throw std::domain_error("fabrication_q: infeasible, result exceeds cap");
  }
  return q_fab;
}

QBudget make_budget(double q_sim, double t_sim, double q_exp, double f0_hz) {
  if (f0_hz <= 0.0) throw std::invalid_argument("make_budget: f0 must be > 0");
  Decomposition d = decompose_from_transmission(q_sim, t_sim);
  QBudget b;
  b.q_sim = q_sim;
  b.q_exp = q_exp;
  b.q_rad = d.q_rad;
  b.q_c = d.q_c;
  b.q_fab = fabrication_q(q_exp, q_sim);
  b.f0_hz = f0_hz;
  b.validate();
  return b;
}

OnResonance on_resonance_estimates(const QBudget& budget, bool fold_fab_into_rad) {
  budget.validate();
  double q_rad_eff = budget.q_rad;
  if (fold_fab_into_rad) {
    q_rad_eff = 1.0 / (1.0 / budget.q_rad + 1.0 / budget.q_fab);
  }
  OnResonance out;
  double r_ratio = budget.q_exp / q_rad_eff;
  double t_ratio = budget.q_exp / budget.q_c;
  out.r_est = r_ratio * r_ratio;
  out.t_est = 4.0 * t_ratio * t_ratio;
  return out;
}

double q_to_rate(double q, double f0_hz) {
  if (q <= 0.0) throw std::invalid_argument("q_to_rate: q must be > 0");
  return f0_hz / q;
}

}  // namespace cqed::budget
