#include "curvtomo/shape.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "curvtomo/errors.hpp"

namespace curvtomo {

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double norm = axis.norm();
  if (norm == 0.0 || angle == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis / norm).toRotationMatrix();
}

DetectorShape DetectorShape::make(const Eigen::Vector3d& axes, const Eigen::Matrix3d& rotation,
                                  double coupling) {
  for (int i = 0; i < 3; ++i) {
    if (!(axes[i] > 0.0) || !std::isfinite(axes[i]))
      throw DomainError("DetectorShape: axis parameters must be positive and finite");
  }
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw DomainError("DetectorShape: coupling must be positive");
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
  if (!(ortho < 1e-12)) throw DomainError("DetectorShape: rotation is not orthogonal");
  if (!(std::abs(rotation.determinant() - 1.0) < 1e-12))
    throw DomainError("DetectorShape: rotation is not proper");

  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return axes[i] < axes[j]; });
  Eigen::Vector3d sorted;
  Eigen::Matrix3d rot;
  for (int k = 0; k < 3; ++k) {
    sorted[k] = axes[order[k]];
    rot.col(k) = rotation.col(order[k]);
  }
  if (rot.determinant() < 0.0) rot.col(2) = -rot.col(2);
  return DetectorShape(sorted, rot, coupling);
}

DetectorShape DetectorShape::from_axis_angle(const Eigen::Vector3d& axes,
                                             const Eigen::Vector3d& rotation_axis, double angle,
                                             double coupling) {
  return make(axes, rotation_from_axis_angle(rotation_axis, angle), coupling);
}

DetectorShape DetectorShape::sphere(double size, double coupling) {
  if (!(size > 0.0)) throw DomainError("DetectorShape::sphere: size must be positive");
  const double inv = 1.0 / size;
  return make(Eigen::Vector3d(inv, inv, inv), Eigen::Matrix3d::Identity(), coupling);
}

Eigen::Matrix3d DetectorShape::precision() const {
  return rotation_ * axes_.cwiseProduct(axes_).asDiagonal() * rotation_.transpose();
}

Eigen::Matrix3d DetectorShape::covariance() const {
  return rotation_ * axes_.cwiseProduct(axes_).cwiseInverse().asDiagonal() *
         rotation_.transpose();
}

DetectorShape DetectorShape::dilated(double s) const {
  if (!(s > 0.0)) throw DomainError("DetectorShape::dilated: scale must be positive");
  return DetectorShape(axes_ / s, rotation_, coupling_);
}

DetectorShape DetectorShape::rotated(const Eigen::Matrix3d& q) const {
  return make(axes_, q * rotation_, coupling_);
}

DetectorShape DetectorShape::with_coupling(double coupling) const {
  return make(axes_, rotation_, coupling);
}

double DetectorShape::density(const Eigen::Vector3d& x) const {
  const Eigen::Vector3d y = rotation_.transpose() * x;
  const double quad = (axes_.cwiseProduct(y)).squaredNorm();
  return sqrt_det_precision() * std::exp(-0.5 * quad) / std::pow(2.0 * std::numbers::pi, 1.5);
}

std::uint64_t DetectorShape::hash() const {
  // FNV-1a over the raw bytes of the canonical parameters.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char byte : bytes) {
      h ^= byte;
      h *= 1099511628211ull;
    }
  };
  for (int i = 0; i < 3; ++i) mix(axes_[i]);
  for (int i = 0; i < 9; ++i) mix(rotation_.data()[i]);
  mix(coupling_);
  return h;
}

}  // namespace curvtomo
