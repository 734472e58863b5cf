#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cqed::design {

struct ParamBox {
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> point;

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
  std::vector<double> to_unit(std::span<const double> x) const;
  std::vector<double> from_unit(std::span<const double> z) const;
};

// Quadratically chirped lattice: a_n = a_cav + (a_mir - a_cav) n^2/(N_cav-1)^2
// for the taper, then N_mir mirror cells at constant a_mir.
struct ChirpSpec {
  double a_cav_m = 0.0;
  double a_mir_m = 0.0;
  int n_cav = 0;
  int n_mir = 0;

  void validate() const;
};

// Half device, center outward: taper then mirror section.
std::vector<double> chirp_lattice(const ChirpSpec& spec);
// Full device, mirrored about the center.
std::vector<double> chirp_lattice_full(const ChirpSpec& spec);

// eta = [q_fab q_sim / (V (q_fab + q_sim))] * overlap^2 with overlap the
// normalized field amplitude fraction |E_y/max|E||; proportional to the
// achievable cooperativity under a fabrication-limited Q.
double objective_eta(double q_sim, double v_norm, double field_overlap_abs,
                     double q_fab_cap);

// Pure scalar objective over box points, with an optional resonance-window
// gate: designs whose resonance falls outside [window_lo, window_hi] score 0.
struct ObjectiveSpec {
  std::function<double(std::span<const double>)> evaluate;
  std::function<double(std::span<const double>)> resonance_wavelength_nm;  // optional
  double window_lo_nm = 700.0;
  double window_hi_nm = 800.0;
  bool concurrency_safe = false;

  double score(std::span<const double> x) const;
};

struct EvalRecord {
  int index = 0;
  std::vector<double> point;
  double value = 0.0;
  double k_hat = 0.0;  // Lipschitz estimate in effect at evaluation time
};

struct LipoResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::vector<EvalRecord> log;
  bool budget_exhausted = false;
};

// Adaptive-Lipschitz LIPO: a uniform candidate is evaluated only when its
// certified upper bound min_j [f_j + k |x - x_j|] (normalized coordinates)
// reaches the incumbent maximum; k lives on a geometric grid above the
// largest observed pairwise slope. Deterministic per seed.
LipoResult lipo_maximize(const ObjectiveSpec& obj, const ParamBox& box,
                         int budget, std::uint64_t seed);

// Audits the evaluation log: every evaluated point must have satisfied the
// acceptance rule, with a k_hat no smaller than the prefix slope bound.
bool replay_lipo_log(const LipoResult& result, const ParamBox& box,
                     double tol = 1e-9);

struct RefineResult {
  std::vector<double> point;
  double value = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
};

// Derivative-free trust region on a diagonal-plus-linear quadratic model
// interpolated from a 2*dim+1 coordinate stencil; the incumbent never
// regresses and never leaves the box.
RefineResult trust_region_refine(const ObjectiveSpec& obj,
                                 std::span<const double> start,
                                 const ParamBox& box, int budget);

struct RankedDesign {
  std::vector<double> point;
  double value = 0.0;
  int cluster = 0;
};

// LIPO global phase, single-linkage clustering of the top evaluations
// (threshold 5% of the box diagonal), then trust-region refinement per
// cluster; ranked best-first.
std::vector<RankedDesign> interleaved_search(const ObjectiveSpec& obj,
                                             const ParamBox& box,
                                             int global_budget, int local_budget,
                                             int n_clusters, std::uint64_t seed);

enum class SweepKind { kThru, kDrop };

struct SweepRow {
  int row = 0;
  double d_c_m = 0.0;  // coupling gap (thru devices)
  int n_mir = 0;
};

// thru: d_c = 50..140 nm in 10 nm steps at N_mir = 25;
// drop: N_mir = 4..13. Ten rows each.
std::vector<SweepRow> coupling_sweep(SweepKind kind);

struct PatternDevice {
  int row = 0;
  int col = 0;
  SweepKind kind = SweepKind::kThru;
  SweepRow params;
};

// Full 10x4 write pattern: two thru columns then two drop columns, 40 devices.
std::vector<PatternDevice> pattern_layout();

struct GratingParams {
  int periods = 4;
  double a0_m = 3e-6;
  double period_m = 0.5e-6;
  double duty = 0.4;
  double eccentricity = 0.20;
  double axis_angle_rad = -0.5235987755982988;  // -30 deg
  double half_opening_rad = 0.39269908169872414;  // 22.5 deg
  int samples_per_arc = 64;
};

struct ArcPolyline {
  int period = 0;
  bool outer_edge = false;  // slot start (inner) vs period end (outer)
  std::vector<std::array<double, 2>> points_m;
};

// Elliptical grating slots, r(theta) = a(1-e^2)/(1 - e cos(theta - phi)),
// slot n spanning major-axis parameters [a0 + nA + dA, a0 + (n+1)A].
std::vector<ArcPolyline> grating_arcs(const GratingParams& params);

// Fixed synthetic landscape on [0,1]^6: three separated Gaussian bumps with
// a known dominant peak, for optimizer benchmarks.
ObjectiveSpec multibump_landscape_6d();
struct MultibumpTruth {
  std::vector<double> peak_point;
  double peak_value;  // f at the dominant center; exact peak within 2e-3
};
MultibumpTruth multibump_truth();

// Smooth analytic cavity surrogate over (w, h, wx, wy, a_cav, a_mir) in
// meters: resonance wavelength, Q, V and overlap as closed forms feeding
// objective_eta, gated on the 700-800 nm window. A solver stand-in for
// end-to-end pipeline runs.
ObjectiveSpec toy_cavity_objective(double q_fab_cap = 5e4);
ParamBox toy_cavity_box();

// Bridges to an external evaluator: per evaluation the JSON document
// {"names": [...], "point": [...]} is piped to `command` on stdin and the
// reply (a JSON scalar or {"score": x}) is read from its stdout.
ObjectiveSpec subprocess_objective(const std::string& command,
                                   std::vector<std::string> names);

// CSV schema: eval_index,<param names...>,score
void write_eval_log_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& names,
                        const std::vector<EvalRecord>& log);

}  // namespace cqed::design
