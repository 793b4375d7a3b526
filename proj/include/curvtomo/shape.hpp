#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>

namespace curvtomo {

// Rotated ellipsoidal Gaussian smearing
//   f(x) = sqrt(det A) / (2 pi)^{3/2} exp(-x.A.x / 2),  A = R diag(a^2, b^2, c^2) R^T,
// with inverse-length axis parameters sorted a <= b <= c, R proper orthogonal
// (principal frame -> lab frame), and coupling lambda in length units.
class DetectorShape {
 public:
  // Canonicalizes: axes are sorted ascending and the rotation columns are
  // permuted (with a sign flip if needed) so that R stays proper.
  static DetectorShape make(const Eigen::Vector3d& axes, const Eigen::Matrix3d& rotation,
                            double coupling = 1.0);
  static DetectorShape from_axis_angle(const Eigen::Vector3d& axes,
                                       const Eigen::Vector3d& rotation_axis, double angle,
                                       double coupling = 1.0);
  static DetectorShape sphere(double size, double coupling = 1.0);

  const Eigen::Vector3d& axes() const { return axes_; }
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  double coupling() const { return coupling_; }

  double a() const { return axes_[0]; }
  double b() const { return axes_[1]; }
  double c() const { return axes_[2]; }

  // Lab-frame precision matrix A.
  Eigen::Matrix3d precision() const;
  // Lab-frame covariance A^{-1}.
  Eigen::Matrix3d covariance() const;
  double sqrt_det_precision() const { return axes_.prod(); }

  // Scales every length by s (axis parameters by 1/s); coupling unchanged.
  DetectorShape dilated(double s) const;
  // Applies an extra lab rotation Q: A -> Q A Q^T.
  DetectorShape rotated(const Eigen::Matrix3d& q) const;
  DetectorShape with_coupling(double coupling) const;

  double density(const Eigen::Vector3d& x) const;

  std::uint64_t hash() const;

 private:
  DetectorShape(const Eigen::Vector3d& axes, const Eigen::Matrix3d& rotation, double coupling)
      : axes_(axes), rotation_(rotation), coupling_(coupling) {}

  Eigen::Vector3d axes_;
  Eigen::Matrix3d rotation_;
  double coupling_;
};

// Rotation matrix for an axis-angle pair; a zero axis means identity.
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis, double angle);

}  // namespace curvtomo
