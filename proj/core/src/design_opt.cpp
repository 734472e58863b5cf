#include "cqed/design_opt.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cqed/constants.hpp"
#include "cqed/csv.hpp"
#include "cqed/rng.hpp"

namespace cqed::design {

void ParamBox::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw std::invalid_argument("ParamBox: empty or mismatched bounds");
  }
  if (!names.empty() && names.size() != lower.size()) {
    throw std::invalid_argument("ParamBox: names/bounds mismatch");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("ParamBox: lower must be < upper");
    }
    if (!point.empty() && (point[i] < lower[i] || point[i] > upper[i])) {
      throw std::invalid_argument("ParamBox: point outside bounds");
    }
  }
}

std::vector<double> ParamBox::to_unit(std::span<const double> x) const {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = (x[i] - lower[i]) / (upper[i] - lower[i]);
  }
  return z;
}

std::vector<double> ParamBox::from_unit(std::span<const double> z) const {
  std::vector<double> x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    x[i] = lower[i] + z[i] * (upper[i] - lower[i]);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Geometry generators
// ---------------------------------------------------------------------------

void ChirpSpec::validate() const {
  if (n_cav < 2) throw std::invalid_argument("ChirpSpec: n_cav must be >= 2");
  if (n_mir < 0) throw std::invalid_argument("ChirpSpec: n_mir must be >= 0");
  if (a_cav_m <= 0.0 || a_mir_m <= 0.0) {
    throw std::invalid_argument("ChirpSpec: lattice constants must be > 0");
  }
}

std::vector<double> chirp_lattice(const ChirpSpec& spec) {
  spec.validate();
  std::vector<double> a;
  a.reserve(spec.n_cav + spec.n_mir);
  double denom = static_cast<double>(spec.n_cav - 1) * (spec.n_cav - 1);
  for (int n = 0; n < spec.n_cav; ++n) {
    a.push_back(spec.a_cav_m + (spec.a_mir_m - spec.a_cav_m) * n * n / denom);
  }
  for (int n = 0; n < spec.n_mir; ++n) a.push_back(spec.a_mir_m);
  return a;
}

std::vector<double> chirp_lattice_full(const ChirpSpec& spec) {
  std::vector<double> half = chirp_lattice(spec);
  std::vector<double> full(half.rbegin(), half.rend());
  full.insert(full.end(), half.begin(), half.end());
  return full;
}

double objective_eta(double q_sim, double v_norm, double field_overlap_abs,
                     double q_fab_cap) {
  if (q_sim <= 0.0 || v_norm <= 0.0 || q_fab_cap <= 0.0) {
    throw std::invalid_argument("objective_eta: inputs must be > 0");
  }
  double q_eff = q_fab_cap * q_sim / (q_fab_cap + q_sim);
  return q_eff / v_norm * field_overlap_abs * field_overlap_abs;
}

std::vector<SweepRow> coupling_sweep(SweepKind kind) {
  std::vector<SweepRow> rows;
  rows.reserve(10);
  for (int r = 0; r < 10; ++r) {
    SweepRow row;
    row.row = r;
    if (kind == SweepKind::kThru) {
      row.d_c_m = (50.0 + 10.0 * r) * 1e-9;
      row.n_mir = 25;
    } else {
      row.d_c_m = 0.0;
      row.n_mir = 4 + r;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<PatternDevice> pattern_layout() {
  auto thru = coupling_sweep(SweepKind::kThru);
  auto drop = coupling_sweep(SweepKind::kDrop);
  std::vector<PatternDevice> devices;
  devices.reserve(40);
  for (int col = 0; col < 4; ++col) {
    bool is_thru = col < 2;
    for (int row = 0; row < 10; ++row) {
      devices.push_back({row, col, is_thru ? SweepKind::kThru : SweepKind::kDrop,
                         is_thru ? thru[row] : drop[row]});
    }
  }
  return devices;
}

std::vector<ArcPolyline> grating_arcs(const GratingParams& params) {
  if (params.eccentricity < 0.0 || params.eccentricity >= 1.0) {
    throw std::invalid_argument("grating_arcs: eccentricity must be in [0,1)");
  }
  if (params.samples_per_arc < 2) {
    throw std::invalid_argument("grating_arcs: need >= 2 samples per arc");
  }
  std::vector<ArcPolyline> arcs;
  const double e = params.eccentricity;
  auto emit = [&](int period, bool outer, double a) {
    ArcPolyline arc;
    arc.period = period;
    arc.outer_edge = outer;
    arc.points_m.reserve(params.samples_per_arc);
    for (int i = 0; i < params.samples_per_arc; ++i) {
      double theta = -params.half_opening_rad +
                     2.0 * params.half_opening_rad * i /
                         (params.samples_per_arc - 1);
      double r = a * (1.0 - e * e) /
                 (1.0 - e * std::cos(theta - params.axis_angle_rad));
      arc.points_m.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    arcs.push_back(std::move(arc));
  };
  for (int n = 0; n < params.periods; ++n) {
    double a_n = params.a0_m + n * params.period_m;
    emit(n, false, a_n + params.duty * params.period_m);  // slot start
    emit(n, true, a_n + params.period_m);                 // slot end
  }
  return arcs;
}

// ---------------------------------------------------------------------------
// LIPO
// ---------------------------------------------------------------------------

double ObjectiveSpec::score(std::span<const double> x) const {
  if (resonance_wavelength_nm) {
    double wl = resonance_wavelength_nm(x);
    if (wl < window_lo_nm || wl > window_hi_nm) return 0.0;
  }
  return evaluate(x);
}

namespace {

double unit_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Geometric grid for the Lipschitz estimate.
constexpr double kGridRatio = 1.3;

double grid_ceil(double slope) {
  if (slope <= 0.0) return 0.0;
  double i = std::ceil(std::log(slope) / std::log(kGridRatio));
  double k = std::pow(kGridRatio, i);
  while (k < slope) k *= kGridRatio;  // guard rounding
  return k;
}

}  // namespace

LipoResult lipo_maximize(const ObjectiveSpec& obj, const ParamBox& box,
                         int budget, std::uint64_t seed) {
  box.validate();
  const int d = box.dim();
  if (budget < d + 1) {
    throw std::invalid_argument("lipo_maximize: budget must be >= dim + 1");
  }

  Rng rng(seed);
  LipoResult result;
  std::vector<std::vector<double>> unit_pts;  // normalized coordinates
  std::vector<double> values;
  double max_slope = 0.0;
  double k_hat = 0.0;
  int rejects_since_accept = 0;
  const int stall_limit = 500;

  while (static_cast<int>(result.log.size()) < budget) {
    std::vector<double> z(d);
    for (int i = 0; i < d; ++i) z[i] = rng.uniform();

    bool accept = true;
    if (!values.empty()) {
      double f_max = *std::max_element(values.begin(), values.end());
      double ub = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < unit_pts.size(); ++j) {
        ub = std::min(ub, values[j] + k_hat * unit_dist(z, unit_pts[j]));
      }
      accept = ub >= f_max - 1e-12;
    }
    if (!accept) {
      if (++rejects_since_accept >= stall_limit) {
        // The slope estimate is too tight for the unexplored region; relax
        // it by one grid step so random exploration can continue.
        k_hat = k_hat > 0.0 ? k_hat * kGridRatio : 1.0;
        rejects_since_accept = 0;
      }
      continue;
    }
    rejects_since_accept = 0;

    std::vector<double> x = box.from_unit(z);
    double f = obj.score(x);

    EvalRecord rec;
    rec.index = static_cast<int>(result.log.size());
    rec.point = x;
    rec.value = f;
    rec.k_hat = k_hat;
    result.log.push_back(std::move(rec));

    for (std::size_t j = 0; j < unit_pts.size(); ++j) {
      double dist = unit_dist(z, unit_pts[j]);
      if (dist > 0.0) {
        max_slope = std::max(max_slope, std::fabs(f - values[j]) / dist);
      }
    }
    unit_pts.push_back(std::move(z));
    values.push_back(f);
    k_hat = std::max(k_hat, grid_ceil(max_slope));
  }

  auto best = std::max_element(values.begin(), values.end());
  std::size_t bi = static_cast<std::size_t>(best - values.begin());
  result.best_point = box.from_unit(unit_pts[bi]);
  result.best_value = values[bi];
  result.budget_exhausted = true;
  return result;
}

bool replay_lipo_log(const LipoResult& result, const ParamBox& box, double tol) {
  std::vector<std::vector<double>> unit_pts;
  std::vector<double> values;
  double max_slope = 0.0;
  for (const auto& rec : result.log) {
    std::vector<double> z = box.to_unit(rec.point);
    if (!values.empty()) {
      double f_max = *std::max_element(values.begin(), values.end());
      double ub = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < unit_pts.size(); ++j) {
        ub = std::min(ub, values[j] + rec.k_hat * unit_dist(z, unit_pts[j]));
      }
      if (ub < f_max - tol) return false;           // acceptance rule violated
      if (rec.k_hat + tol < grid_ceil(max_slope)) return false;  // k too small
    }
    for (std::size_t j = 0; j < unit_pts.size(); ++j) {
      double dist = unit_dist(z, unit_pts[j]);
      if (dist > 0.0) {
        max_slope = std::max(max_slope, std::fabs(rec.value - values[j]) / dist);
      }
    }
    unit_pts.push_back(std::move(z));
    values.push_back(rec.value);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Trust region
// ---------------------------------------------------------------------------

RefineResult trust_region_refine(const ObjectiveSpec& obj,
                                 std::span<const double> start,
                                 const ParamBox& box, int budget) {
  box.validate();
  const int d = box.dim();
  if (static_cast<int>(start.size()) != d) {
    throw std::invalid_argument("trust_region_refine: start dimension mismatch");
  }
  std::vector<double> z0 = box.to_unit(start);
  for (double zi : z0) {
    if (zi < -1e-12 || zi > 1.0 + 1e-12) {
      throw std::invalid_argument("trust_region_refine: start outside box");
    }
  }

  int evals = 0;
  auto eval_unit = [&](const std::vector<double>& z) {
    ++evals;
    return obj.score(box.from_unit(z));
  };

  std::vector<double> best = z0;
  double f_best = eval_unit(best);

  double radius = 0.25;
  const double min_radius = 1e-9;
  std::vector<double> grad(d), hess(d);

  // Exploratory phase: interpolate the diagonal quadratic on a 2d+1 stencil
  // around p, then take model-optimal steps (radius-adapted) until one
  // improves on f_p. Returns the improved point or p unchanged.
  auto explore = [&](std::vector<double> p, double f_p)
      -> std::pair<std::vector<double>, double> {
    while (evals + 2 * d + 1 <= budget && radius > min_radius) {
      double h = 0.5 * radius;
      for (int i = 0; i < d; ++i) {
        double d1 = h, d2 = -h;
        if (p[i] + h > 1.0) {
          d1 = -h;
          d2 = -0.5 * h;
        } else if (p[i] - h < 0.0) {
          d1 = h;
          d2 = 0.5 * h;
        }
        std::vector<double> za = p, zb = p;
        za[i] = std::clamp(za[i] + d1, 0.0, 1.0);
        zb[i] = std::clamp(zb[i] + d2, 0.0, 1.0);
        double fa = eval_unit(za), fb = eval_unit(zb);
        if (fa > f_best) { f_best = fa; best = za; }
        if (fb > f_best) { f_best = fb; best = zb; }
        // Solve f(p+dx) = f + g dx + H dx^2/2 at the two offsets.
        double det = 0.5 * d1 * d2 * (d2 - d1);
        grad[i] = 0.5 * ((fa - f_p) * d2 * d2 - (fb - f_p) * d1 * d1) / det;
        hess[i] = ((fb - f_p) * d1 - (fa - f_p) * d2) / det;
      }

      // Model steps on the frozen stencil, shrinking on disagreement.
      while (evals < budget) {
        std::vector<double> step(d);
        double gain = 0.0;
        bool on_boundary = false;
        for (int i = 0; i < d; ++i) {
          double lo = std::max(-radius, 0.0 - p[i]);
          double hi = std::min(radius, 1.0 - p[i]);
          double s;
          if (hess[i] < 0.0) {
            s = std::clamp(-grad[i] / hess[i], lo, hi);
          } else {
            double mlo = grad[i] * lo + 0.5 * hess[i] * lo * lo;
            double mhi = grad[i] * hi + 0.5 * hess[i] * hi * hi;
            s = mhi >= mlo ? hi : lo;
          }
          step[i] = s;
          gain += grad[i] * s + 0.5 * hess[i] * s * s;
          if (std::fabs(std::fabs(s) - radius) < 1e-15) on_boundary = true;
        }
        if (gain <= 1e-15 * (std::fabs(f_p) + 1e-15)) {
          radius *= 0.5;
          return {p, f_p};  // flat model at this scale
        }
        std::vector<double> trial(d);
        for (int i = 0; i < d; ++i) trial[i] = std::clamp(p[i] + step[i], 0.0, 1.0);
        double f_trial = eval_unit(trial);
        if (f_trial > f_best) { f_best = f_trial; best = trial; }

        double ratio = (f_trial - f_p) / gain;
        if (ratio >= 0.75 && on_boundary) radius = std::min(radius * 2.0, 1.0);
        else if (ratio < 0.25) radius *= 0.5;

        if (f_trial > f_p) {
          // Slide the diagonal model to the accepted point (the gradient of
          // a quadratic translates exactly) and keep stepping while the
          // agreement holds.
          for (int i = 0; i < d; ++i) grad[i] += hess[i] * step[i];
          p = trial;
          f_p = f_trial;
          if (ratio < 0.25) return {p, f_p};
          continue;
        }
        if (radius <= min_radius) return {p, f_p};
      }
      return {p, f_p};
    }
    return {p, f_p};
  };

  // Pattern-move outer loop: exploratory moves set the direction, pattern
  // points are kept provisionally and judged by the follow-up exploration
  // (composite acceptance), which lets the diagonal model track curved
  // valleys.
  std::vector<double> base = z0;
  double f_base = f_best;
  std::vector<double> probe = base;
  double f_probe = f_base;

  while (evals < budget && radius > min_radius) {
    auto [moved, f_moved] = explore(probe, f_probe);
    if (f_moved > f_base) {
      std::vector<double> pattern(d);
      bool distinct = false;
      for (int i = 0; i < d; ++i) {
        pattern[i] = std::clamp(2.0 * moved[i] - base[i], 0.0, 1.0);
        if (std::fabs(pattern[i] - moved[i]) > 1e-15) distinct = true;
      }
      base = moved;
      f_base = f_moved;
      if (distinct && evals < budget) {
        f_probe = eval_unit(pattern);
        if (f_probe > f_best) { f_best = f_probe; best = pattern; }
        probe = pattern;
      } else {
        probe = base;
        f_probe = f_base;
      }
    } else {
      // Pattern point failed to pay off; retreat to the base and tighten.
      if (probe != base) {
        probe = base;
        f_probe = f_base;
      } else {
        radius *= 0.5;
      }
    }
  }

  RefineResult out;
  out.point = box.from_unit(best);
  out.value = f_best;
  out.evaluations = evals;
  out.budget_exhausted = evals >= budget;
  return out;
}

// ---------------------------------------------------------------------------
// Interleaved search
// ---------------------------------------------------------------------------

std::vector<RankedDesign> interleaved_search(const ObjectiveSpec& obj,
                                             const ParamBox& box,
                                             int global_budget, int local_budget,
                                             int n_clusters, std::uint64_t seed) {
  if (global_budget <= 0 || local_budget <= 0 || n_clusters <= 0) {
    throw std::invalid_argument("interleaved_search: budgets must be positive");
  }
  LipoResult global = lipo_maximize(obj, box, global_budget, seed);

  // Single-linkage clustering in rank order: each evaluation joins the first
  // cluster holding a member within the distance threshold, else opens a new
  // one. Cluster creation order is therefore best-value order.
  std::vector<int> order(global.log.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return global.log[a].value > global.log[b].value;
  });
  const double threshold = 0.05 * std::sqrt(static_cast<double>(box.dim()));

  std::vector<std::vector<std::vector<double>>> members;  // unit coords
  std::vector<int> cluster_seed;                          // log index of best
  for (int idx : order) {
    std::vector<double> z = box.to_unit(global.log[idx].point);
    bool placed = false;
    for (std::size_t c = 0; c < members.size() && !placed; ++c) {
      for (const auto& m : members[c]) {
        if (unit_dist(z, m) <= threshold) {
          members[c].push_back(z);
          placed = true;
          break;
        }
      }
    }
    if (!placed) {
      members.push_back({z});
      cluster_seed.push_back(idx);
    }
  }

  // Refine the best member of the top clusters. Sparse global sampling can
  // fragment one basin into several linkage clusters, so refinement starts
  // are also kept mutually separated at the basin scale.
  const double diversity = 0.20 * std::sqrt(static_cast<double>(box.dim()));
  std::vector<RankedDesign> refined;
  std::vector<std::vector<double>> starts_unit;
  for (std::size_t c = 0;
       c < cluster_seed.size() &&
       static_cast<int>(refined.size()) < n_clusters;
       ++c) {
    std::vector<double> z = box.to_unit(global.log[cluster_seed[c]].point);
    bool crowded = false;
    for (const auto& s : starts_unit) {
      if (unit_dist(z, s) < diversity) {
        crowded = true;
        break;
      }
    }
    if (crowded) continue;
    starts_unit.push_back(z);
    RefineResult r = trust_region_refine(obj, global.log[cluster_seed[c]].point,
                                         box, local_budget);
    RankedDesign design;
    design.point = r.point;
    design.value = r.value;
    design.cluster = static_cast<int>(c);
    refined.push_back(std::move(design));
  }
  std::sort(refined.begin(), refined.end(),
            [](const RankedDesign& a, const RankedDesign& b) {
              return a.value > b.value;
            });
  return refined;
}

// ---------------------------------------------------------------------------
// Benchmark landscapes
// ---------------------------------------------------------------------------

namespace {

struct Bump {
  std::array<double, 6> center;
  double amplitude;
  double width;
};

const std::array<Bump, 3>& multibump_bumps() {
  static const std::array<Bump, 3> bumps{{
      {{0.30, 0.72, 0.45, 0.20, 0.62, 0.55}, 1.0, 0.22},
      {{0.75, 0.25, 0.80, 0.70, 0.25, 0.30}, 0.8, 0.24},
      {{0.15, 0.30, 0.15, 0.85, 0.80, 0.85}, 0.6, 0.26},
  }};
  return bumps;
}

}  // namespace

ObjectiveSpec multibump_landscape_6d() {
  ObjectiveSpec spec;
  spec.concurrency_safe = true;
  spec.evaluate = [](std::span<const double> x) {
    double f = 0.0;
    for (const Bump& b : multibump_bumps()) {
      double r2 = 0.0;
      for (int i = 0; i < 6; ++i) {
        double d = x[i] - b.center[i];
        r2 += d * d;
      }
      f += b.amplitude * std::exp(-r2 / (2.0 * b.width * b.width));
    }
    return f;
  };
  return spec;
}

MultibumpTruth multibump_truth() {
  const Bump& top = multibump_bumps()[0];
  MultibumpTruth truth;
  truth.peak_point.assign(top.center.begin(), top.center.end());
  truth.peak_value = multibump_landscape_6d().evaluate(truth.peak_point);
  return truth;
}

ParamBox toy_cavity_box() {
  ParamBox box;
  box.names = {"w_m", "h_m", "wx_m", "wy_m", "a_cav_m", "a_mir_m"};
  box.lower = {340e-9, 150e-9, 50e-9, 90e-9, 120e-9, 128e-9};
  box.upper = {460e-9, 215e-9, 85e-9, 135e-9, 145e-9, 152e-9};
  return box;
}

ObjectiveSpec toy_cavity_objective(double q_fab_cap) {
  // Smooth stand-in for a full-wave solver: resonance, Q, V and evanescent
  // overlap respond to the design parameters with the qualitative trends of
  // the real structure (thinner slabs push field into the substrate, larger
  // chirp contrast raises Q until the mode delocalizes).
  ObjectiveSpec spec;
  auto features = [](std::span<const double> x) {
    double w = x[0] * 1e9, h = x[1] * 1e9, wx = x[2] * 1e9, wy = x[3] * 1e9;
    double a_cav = x[4] * 1e9, a_mir = x[5] * 1e9;
    struct {
      double wl_nm, q_sim, v_norm, overlap_abs;
    } out{};
    out.wl_nm = 737.0 + 2.4 * (a_cav - 132.5) + 1.1 * (a_mir - 140.1) +
                0.55 * (w - 402.8) + 0.50 * (h - 182.8) - 0.80 * (wx - 66.3) -
                0.50 * (wy - 112.0);
    auto sq = [](double v) { return v * v; };
    double detune = sq((w - 402.8) / 60.0) + sq((h - 182.8) / 40.0) +
                    sq((wx - 66.3) / 12.0) + sq((wy - 112.0) / 18.0) +
                    sq((a_cav - 132.5) / 6.0) + sq((a_mir - 140.1) / 8.0);
    out.q_sim = 1.75e5 * std::exp(-detune);
    out.v_norm = 1.86 * (1.0 + sq((w - 402.8) / 250.0) + sq((h - 182.8) / 150.0) +
                         0.3 * sq((a_mir - a_cav - 7.6) / 15.0));
    out.overlap_abs = 0.5 * std::exp(0.8 * (182.8 - h) / 182.8) *
                      std::exp(-sq((w - 402.8) / 400.0));
    return out;
  };
  spec.resonance_wavelength_nm = [features](std::span<const double> x) {
    return features(x).wl_nm;
  };
  spec.evaluate = [features, q_fab_cap](std::span<const double> x) {
    auto f = features(x);
    return objective_eta(f.q_sim, f.v_norm, std::min(f.overlap_abs, 1.0),
                         q_fab_cap);
  };
  spec.concurrency_safe = true;
  return spec;
}

ObjectiveSpec subprocess_objective(const std::string& command,
                                   std::vector<std::string> names) {
  ObjectiveSpec spec;
  spec.evaluate = [command, names](std::span<const double> x) {
    static int call_counter = 0;
    auto tmp = std::filesystem::temp_directory_path();
    std::string tag = "cqed_obj_" + std::to_string(::getpid()) + "_" +
                      std::to_string(call_counter++);
    auto req_path = tmp / (tag + "_req.json");
    auto resp_path = tmp / (tag + "_resp.json");

    nlohmann::json req;
    req["names"] = names;
    req["point"] = std::vector<double>(x.begin(), x.end());
    {
      std::ofstream out(req_path);
      out << req.dump() << "\n";
    }
    std::string cmd = command + " < " + req_path.string() + " > " + resp_path.string();
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
      std::filesystem::remove(req_path);
      throw std::runtime_error("subprocess objective failed: " + command);
    }
    std::ifstream in(resp_path);
    nlohmann::json resp = nlohmann::json::parse(in);
    std::filesystem::remove(req_path);
    std::filesystem::remove(resp_path);
    if (resp.is_number()) return resp.get<double>();
    if (resp.is_object() && resp.contains("score")) {
      return resp["score"].get<double>();
    }
    throw std::runtime_error("subprocess objective: reply is not a scalar");
  };
  return spec;
}

void write_eval_log_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& names,
                        const std::vector<EvalRecord>& log) {
  std::vector<std::string> header{"eval_index"};
  header.insert(header.end(), names.begin(), names.end());
  header.push_back("score");
  std::vector<std::vector<double>> rows;
  rows.reserve(log.size());
  for (const auto& rec : log) {
    std::vector<double> row{static_cast<double>(rec.index)};
    row.insert(row.end(), rec.point.begin(), rec.point.end());
    row.push_back(rec.value);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

}  // namespace cqed::design
