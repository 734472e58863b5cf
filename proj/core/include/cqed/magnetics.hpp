#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <stdexcept>
#include <vector>

namespace cqed::magnet {

struct SingularEvaluationError : std::domain_error {
  using std::domain_error::domain_error;
};

struct CylMagnet {
  double diameter_m = 0.0;
  double thickness_m = 0.0;
  double remanence_t = 0.0;
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  Eigen::Vector3d axis{0.0, 0.0, 1.0};

  void validate() const;
};

bool is_inside(const CylMagnet& magnet, const Eigen::Vector3d& point);

// Closed-form field of an axially magnetized cylinder (generalized complete
// elliptic integrals, Bulirsch cel), valid inside and outside the body.
// Throws SingularEvaluationError on the rim edge circle; points very near
// the rim fall back to surface-current quadrature.
Eigen::Vector3d field_at(const CylMagnet& magnet, const Eigen::Vector3d& point);
Eigen::Vector3d field_at(std::span<const CylMagnet> magnets,
                         const Eigen::Vector3d& point);

// alpha = arccos(|b . axis| / |b|) in degrees; parallel and antiparallel both
// give zero. Throws std::domain_error on zero field.
double misalignment_deg(const Eigen::Vector3d& b, const Eigen::Vector3d& siv_axis);

// Diamond (001) sample frame: in-plane <110> edges and the four <111> defect
// axes, with the two orientations that couple to a [110]-aligned cavity
// flagged.
struct CrystalFrame {
  std::array<Eigen::Vector3d, 2> edge_axes;
  std::array<Eigen::Vector3d, 4> siv_axes;
  std::array<bool, 4> cavity_coupled;

  static CrystalFrame standard();
};

struct SweepPoint {
  double y_m = 0.0;
  double z_m = 0.0;
  double alpha_deg = 0.0;
  double b_tesla = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> map;
  SweepPoint best;
};

// Misalignment map over external-magnet positions in the yz plane (the
// template's x stand-off is kept); reports the argmin.
SweepResult external_sweep(const CylMagnet& mount, const CylMagnet& external,
                           std::span<const double> ys_m,
                           std::span<const double> zs_m,
                           const Eigen::Vector3d& sample_point,
                           const Eigen::Vector3d& siv_axis);

// Rescales the remanence so |B| at the point equals the target (the field is
// linear in Br); returns the calibrated value.
double calibrate_remanence(CylMagnet& magnet, const Eigen::Vector3d& point,
                           double target_b_t);

// Mount geometry of the spin measurements: an embedded SmCo disk under the
// sample plane, the device sitting near the rim where the field tilts onto
// the <111> axis, and a large NdFeB trim magnet on a stage at x ~ 5.5 cm
// (5.7 cm in one drawing; pass your own stand-off to match either).
CylMagnet paper_mount_magnet();
Eigen::Vector3d paper_sample_point();
Eigen::Vector3d paper_siv_axis();
CylMagnet paper_external_magnet(double standoff_m = 0.055);

namespace detail {
// Bulirsch general complete elliptic integral cel(kc, p, c, s).
double cel(double kc, double p, double c, double s);
// Surface-current quadrature used as the near-rim fallback.
Eigen::Vector3d field_quadrature(const CylMagnet& magnet,
                                 const Eigen::Vector3d& point, int nz, int nphi);
}  // namespace detail

}  // namespace cqed::magnet
