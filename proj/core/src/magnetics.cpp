#include "cqed/magnetics.hpp"

#include <cmath>

#include "cqed/constants.hpp"

namespace cqed::magnet {

void CylMagnet::validate() const {
  if (diameter_m <= 0.0 || thickness_m <= 0.0 || remanence_t <= 0.0) {
    throw std::invalid_argument("CylMagnet: dimensions and remanence must be > 0");
  }
  if (std::fabs(axis.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("CylMagnet: axis must be unit norm");
  }
}

bool is_inside(const CylMagnet& magnet, const Eigen::Vector3d& point) {
  Eigen::Vector3d rel = point - magnet.center;
  double z = rel.dot(magnet.axis);
  double rho = (rel - z * magnet.axis).norm();
  return std::fabs(z) < 0.5 * magnet.thickness_m && rho < 0.5 * magnet.diameter_m;
}

namespace detail {

double cel(double kc, double p, double c, double s) {
  if (kc == 0.0) {
    throw SingularEvaluationError("cel: kc = 0 (rim edge)");
  }
  const double errtol = 1e-12;
  double k = std::fabs(kc);
  double pp = p, cc = c, ss = s, em = 1.0;
  if (p > 0.0) {
    pp = std::sqrt(p);
    ss = s / pp;
  } else {
    double f = kc * kc;
    double q = 1.0 - f;
    double g = 1.0 - pp;
    f -= pp;
    q *= (ss - c * pp);
    pp = std::sqrt(f / g);
    cc = (c - ss) / g;
    ss = -q / (g * g * pp) + cc * pp;
  }
  double f = cc;
  cc = cc + ss / pp;
  double g = k / pp;
  ss = 2.0 * (ss + f * g);
  pp = g + pp;
  g = em;
  em = k + em;
  double kk = k;
  while (std::fabs(g - k) > g * errtol) {
    k = 2.0 * std::sqrt(kk);
    kk = k * em;
    f = cc;
    cc = cc + ss / pp;
    g = kk / pp;
    ss = 2.0 * (ss + f * g);
    pp = g + pp;
    g = em;
    em = k + em;
  }
  return 0.5 * kPi * (ss + cc * em) / (em * (em + pp));
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] via Newton on Legendre polynomials.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

Eigen::Vector3d field_quadrature(const CylMagnet& magnet,
                                 const Eigen::Vector3d& point, int nz, int nphi) {
  // Equivalent surface current: an azimuthal sheet K = M phi_hat on the
  // lateral wall (uniform axial M has no volume or end-face currents).
  const double a = 0.5 * magnet.diameter_m;
  const double b = 0.5 * magnet.thickness_m;
  const double m_mag = magnet.remanence_t / kMu0;

  // Work in the magnet frame.
  Eigen::Vector3d w = magnet.axis;
  Eigen::Vector3d u = std::fabs(w.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                             : Eigen::Vector3d::UnitY();
  u = (u - u.dot(w) * w).normalized();
  Eigen::Vector3d v = w.cross(u);
  Eigen::Vector3d rel = point - magnet.center;
  Eigen::Vector3d r_local(rel.dot(u), rel.dot(v), rel.dot(w));

  std::vector<double> zx, zw;
  gauss_legendre(nz, zx, zw);

  Eigen::Vector3d field = Eigen::Vector3d::Zero();
  const double dphi = 2.0 * kPi / nphi;
  for (int iz = 0; iz < nz; ++iz) {
    double zp = b * zx[iz];
    double wz = b * zw[iz];
    for (int ip = 0; ip < nphi; ++ip) {
      double phi = dphi * ip;
      Eigen::Vector3d src(a * std::cos(phi), a * std::sin(phi), zp);
      Eigen::Vector3d kdir(-std::sin(phi), std::cos(phi), 0.0);
      Eigen::Vector3d d = r_local - src;
      double r3 = std::pow(d.norm(), 3);
      field += wz * dphi * a * kdir.cross(d) / r3;
    }
  }
  field *= kMu0 * m_mag / (4.0 * kPi);
  return field.x() * u + field.y() * v + field.z() * w;
}

}  // namespace detail

Eigen::Vector3d field_at(const CylMagnet& magnet, const Eigen::Vector3d& point) {
  magnet.validate();
  const double a = 0.5 * magnet.diameter_m;
  const double b = 0.5 * magnet.thickness_m;

  Eigen::Vector3d rel = point - magnet.center;
  double z = rel.dot(magnet.axis);
  Eigen::Vector3d rho_vec = rel - z * magnet.axis;
  double rho = rho_vec.norm();

  // Distance to the rim edge circle (where the field diverges).
  double rim = std::hypot(rho - a, std::fabs(z) - b);
  if (rim < 1e-12 * a) {
    throw SingularEvaluationError("field_at: evaluation on the rim edge circle");
  }
  if (rim < 1e-6 * a) {
    return detail::field_quadrature(magnet, point, 96, 256);
  }

  const double b0 = magnet.remanence_t / kPi;
  const double zp = z + b;
  const double zm = z - b;
  const double rp = rho + a;
  const double rm = a - rho;

  auto hyp = [](double x, double y) { return std::sqrt(x * x + y * y); };
  double np = hyp(zp, rp);
  double nm = hyp(zm, rp);
  double alpha_p = a / np;
  double alpha_m = a / nm;
  double beta_p = zp / np;
  double beta_m = zm / nm;
  double kp = hyp(zp, rm) / np;
  double km = hyp(zm, rm) / nm;
  double gamma = rm / rp;

  double b_rho = b0 * (alpha_p * detail::cel(kp, 1.0, 1.0, -1.0) -
                       alpha_m * detail::cel(km, 1.0, 1.0, -1.0));
  double b_z = b0 * a / rp *
               (beta_p * detail::cel(kp, gamma * gamma, 1.0, gamma) -
                beta_m * detail::cel(km, gamma * gamma, 1.0, gamma));

  Eigen::Vector3d rho_hat =
      rho > 0.0 ? Eigen::Vector3d(rho_vec / rho) : Eigen::Vector3d::Zero();
  return b_rho * rho_hat + b_z * magnet.axis;
}

Eigen::Vector3d field_at(std::span<const CylMagnet> magnets,
                         const Eigen::Vector3d& point) {
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (const auto& m : magnets) b += field_at(m, point);
  return b;
}

double misalignment_deg(const Eigen::Vector3d& b, const Eigen::Vector3d& siv_axis) {
  double bn = b.norm();
  if (bn <= 0.0) throw std::domain_error("misalignment: zero field");
  double c = std::fabs(b.dot(siv_axis)) / (bn * siv_axis.norm());
  return rad_to_deg(std::acos(std::min(c, 1.0)));
}

CrystalFrame CrystalFrame::standard() {
  CrystalFrame frame;
  const double s2 = 1.0 / std::sqrt(2.0);
  const double s3 = 1.0 / std::sqrt(3.0);
  frame.edge_axes = {Eigen::Vector3d(s2, s2, 0.0), Eigen::Vector3d(-s2, s2, 0.0)};
  // Up-pointing <111> set; the cavity lies along [110], so the [-111] and
  // [1-11] orientations carry the TE-aligned dipole projection.
  frame.siv_axes = {Eigen::Vector3d(s3, s3, s3), Eigen::Vector3d(-s3, -s3, s3),
                    Eigen::Vector3d(-s3, s3, s3), Eigen::Vector3d(s3, -s3, s3)};
  frame.cavity_coupled = {false, false, true, true};
  return frame;
}

SweepResult external_sweep(const CylMagnet& mount, const CylMagnet& external,
                           std::span<const double> ys_m,
                           std::span<const double> zs_m,
                           const Eigen::Vector3d& sample_point,
                           const Eigen::Vector3d& siv_axis) {
  if (ys_m.empty() || zs_m.empty()) {
    throw std::invalid_argument("external_sweep: grid must be nonempty");
  }
  SweepResult out;
  out.best.alpha_deg = std::numeric_limits<double>::infinity();
  Eigen::Vector3d b_mount = field_at(mount, sample_point);
  for (double y : ys_m) {
    for (double z : zs_m) {
      CylMagnet ext = external;
      ext.center.y() = y;
      ext.center.z() = z;
      Eigen::Vector3d b = b_mount + field_at(ext, sample_point);
      SweepPoint pt;
      pt.y_m = y;
      pt.z_m = z;
      pt.alpha_deg = misalignment_deg(b, siv_axis);
      pt.b_tesla = b.norm();
      if (pt.alpha_deg < out.best.alpha_deg) out.best = pt;
      out.map.push_back(pt);
    }
  }
  return out;
}

double calibrate_remanence(CylMagnet& magnet, const Eigen::Vector3d& point,
                           double target_b_t) {
  if (target_b_t <= 0.0) {
    throw std::invalid_argument("calibrate_remanence: target must be > 0");
  }
  double b = field_at(magnet, point).norm();
  if (b <= 0.0) throw std::domain_error("calibrate_remanence: zero field at point");
  magnet.remanence_t *= target_b_t / b;
  return magnet.remanence_t;
}

// Mount constants. The sample plane height above the magnet mid-plane is set
// where the mount field tilts onto the <111> cone (54.7 deg from the surface
// normal) at the device radius; the residual ~3 deg misalignment then comes
// from the in-plane placement offset of the device.
namespace {
constexpr double kSampleHeightM = 2.47294e-3;  // from the magnet mid-plane
}

CylMagnet paper_mount_magnet() {
  CylMagnet m;
  m.diameter_m = 6.35e-3;
  m.thickness_m = 3.2e-3;
  m.remanence_t = 1.1;  // typical SmCo grade; calibrate_remanence for |B| pins
  m.center = Eigen::Vector3d::Zero();
  m.axis = Eigen::Vector3d::UnitZ();
  return m;
}

Eigen::Vector3d paper_sample_point() {
  return {3.014e-3, 0.190e-3, kSampleHeightM};
}

Eigen::Vector3d paper_siv_axis() {
  // [-111] expressed in the mount frame: the diamond is placed with its
  // [-110] edge along the radial direction of the device site.
  const double s3 = 1.0 / std::sqrt(3.0);
  return {std::sqrt(2.0) * s3, 0.0, s3};
}

CylMagnet paper_external_magnet(double standoff_m) {
  CylMagnet m;
  m.diameter_m = 0.04;
  m.thickness_m = 0.036;
  m.remanence_t = 1.3;  // typical NdFeB grade
  m.center = Eigen::Vector3d(standoff_m + 0.5 * m.thickness_m, 0.0, 0.0);
  m.axis = Eigen::Vector3d(-1.0, 0.0, 0.0);
  return m;
}

}  // namespace cqed::magnet
