#pragma once

// Curvature data in orthonormal Fermi frames with signature (-,+,+,+).
// Frame index 0 is tau, 1..3 are spatial.

#include <Eigen/Core>
#include <array>
#include <string>

namespace curvtomo {

using Matrix4d = Eigen::Matrix4d;
using Vector20d = Eigen::Matrix<double, 20, 1>;

// Dense 4^4 Riemann tensor R_{abcd}; construction validates the pair
// antisymmetries, pair exchange symmetry and the first Bianchi identity.
class RiemannTensor {
 public:
  static constexpr int kIndependent = 20;

  RiemannTensor() { data_.fill(0.0); }

  static RiemannTensor zero() { return RiemannTensor(); }
  // Throws InvalidInput if the symmetries fail beyond 1e-12 * max(1, max|R|).
  static RiemannTensor from_components(const std::array<double, 256>& components);
  // From the 20 independent components (see independent_names()).
  static RiemannTensor from_independent(const Vector20d& params);

  double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }
  const std::array<double, 256>& components() const { return data_; }

  Vector20d independent() const;
  // "0101", "0102", ...; 0 is the tau index. R_{0312} is omitted (Bianchi).
  static const std::array<std::string, 20>& independent_names();

  // Largest violation of the algebraic symmetries.
  double symmetry_defect() const;
  double max_abs() const;

 private:
  static constexpr int index(int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; }
  std::array<double, 256> data_;
};

struct CurvaturePoint {
  RiemannTensor riemann;
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  double omega0 = 0.0;
};

struct BoostSpec {
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
  double speed = 0.0;

  static BoostSpec make(const Eigen::Vector3d& direction, double speed);
  double gamma() const;
};

struct RicciResult {
  Matrix4d ricci;  // R_{ab} = eta^{cd} R_{cadb}
  double scalar = 0.0;
};

const Matrix4d& frame_metric();

RicciResult ricci_from_riemann(const RiemannTensor& r);

// Spatial block R_{ij} of the Ricci tensor.
Eigen::Matrix3d ricci_spatial(const RiemannTensor& r);
// R_{tau i tau j}.
Eigen::Matrix3d tidal_block(const RiemannTensor& r);

// M_ij = 2/3 R_{tau i tau j} - 1/3 R_ij.
Eigen::Matrix3d m_tensor(const RiemannTensor& r);
// N_ij = R_ij / 12 + 4 pi^2 omega0 delta_ij.
Eigen::Matrix3d n_tensor(const Eigen::Matrix3d& ricci_spatial, double omega0);

struct FermiMetric {
  double g_tt = -1.0;
  Eigen::Vector3d g_ti = Eigen::Vector3d::Zero();
  Eigen::Matrix3d g_ij = Eigen::Matrix3d::Identity();
  double sqrt_minus_g = 1.0;
};

// Metric in Fermi normal coordinates to quadratic order about the trajectory.
FermiMetric metric_fermi_expansion(const CurvaturePoint& point, const Eigen::Vector3d& x);

struct CatalogEntry {
  enum class Kind { Minkowski, DeSitter, ConstantSpatialCurvature, SchwarzschildStaticFrame };
  Kind kind = Kind::Minkowski;
  double h = 0.0;       // Hubble rate (DeSitter)
  double k = 0.0;       // sectional curvature of the spatial slices
  double mass = 0.0;    // Schwarzschild mass
  double radius = 0.0;  // areal radius of the static observer
};

CurvaturePoint catalog(const CatalogEntry& entry);

// Lambda^a_b with columns the boosted frame vectors in the original frame:
// e_0' = gamma (e_0 + v n), e_n' = gamma (n + v e_0).
Matrix4d boost_matrix(const BoostSpec& b);
// Components in the boosted frame: T' = Lambda^T T Lambda.
Matrix4d boost_rank2(const Matrix4d& t, const BoostSpec& b);
RiemannTensor boost_riemann(const RiemannTensor& r, const BoostSpec& b);

// Inverse of the boost: the frame moving with velocity -v n.
BoostSpec inverse(const BoostSpec& b);

}  // namespace curvtomo
