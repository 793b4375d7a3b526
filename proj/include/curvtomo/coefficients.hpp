#pragma once

// Smearing coefficients of the short-distance expansion of the detector
// response for ellipsoidal Gaussian smearings:
//   L0   = B[1],                Q^ij = B[x^i x^j],   D^i = B[x^i],
//   L^ij = B[(x-x')^i (x-x')^j], L_R = B[|x-x'|^2 ln(|x-x'|^2 / 2)],
//   L_w  = B[|x-x'|^2],
// with B[h] as in oracle.hpp (W0 = 1 / (4 pi^2 |x - x'|^2)).
//
// Closed forms follow from 1/r^2 = int_0^inf exp(-t r^2) dt applied to the
// Gaussian law of d = x - x' (covariance 2 A^{-1}), which turns L0 and L^ij
// into Carlson integrals of the squared axis parameters.

#include <Eigen/Core>
#include <string>
#include <vector>

#include "curvtomo/execution.hpp"
#include "curvtomo/oracle.hpp"
#include "curvtomo/shape.hpp"

namespace curvtomo {

enum class Provenance { ClosedForm, SemiAnalytic, Oracle };

std::string to_string(Provenance p);

struct CoefficientProvenance {
  Provenance l0 = Provenance::ClosedForm;
  Provenance q = Provenance::ClosedForm;
  Provenance d = Provenance::ClosedForm;
  Provenance lij = Provenance::ClosedForm;
  Provenance lr = Provenance::SemiAnalytic;
  Provenance lomega = Provenance::ClosedForm;
};

struct CoefficientSet {
  double l0 = 0.0;
  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  Eigen::Matrix3d lij = Eigen::Matrix3d::Zero();
  double lr = 0.0;
  double lomega = 0.0;
  CoefficientProvenance provenance;
};

// lambda^2 abc R_F(a^2, b^2, c^2) / (8 pi^2).
double coeff_l0(const DetectorShape& shape);
// Same value through the Legendre form F(acos(a/c) | (c^2-b^2)/(c^2-a^2)).
double coeff_l0_legendre(const DetectorShape& shape);
double coeff_lomega(const DetectorShape& shape);
Eigen::Vector3d coeff_d(const DetectorShape& shape);
// Principal-frame diagonal lambda^2 abc R_D(a_j^2, a_k^2, a_i^2) / (12 pi^2),
// rotated to the lab frame.
Eigen::Matrix3d coeff_lij(const DetectorShape& shape);
// Second moment of the mean coordinate per unit weight: A^{-1}.
Eigen::Matrix3d coeff_eij(const DetectorShape& shape);
Eigen::Matrix3d coeff_qij(const DetectorShape& shape);
// lambda^2 / (4 pi^2) (E[ln r^2] - ln 2) with E[ln r^2] from the Frullani
// integral int_0^inf (e^{-t} - prod_i (1 + 2 t s_i^2)^{-1/2}) dt / t.
double coeff_lr(const DetectorShape& shape, double rel_tol = 1e-12);

CoefficientSet full_set(const DetectorShape& shape);
std::vector<CoefficientSet> full_set_batch(const std::vector<DetectorShape>& shapes,
                                           Execution execution = Execution::Parallel);

// Closed forms as usually tabulated for this smearing (carrying the
// constant-factor and dimensional defects noted in the validation report).
// They are evaluated only for comparison; nothing downstream uses them.
struct TabulatedValue {
  double value = 0.0;
  bool defined = false;
  std::string note;
};

TabulatedValue tabulated_l0(const DetectorShape& shape);
TabulatedValue tabulated_lomega(const DetectorShape& shape);
TabulatedValue tabulated_lij_principal(const DetectorShape& shape, int axis);
TabulatedValue tabulated_eij_principal(const DetectorShape& shape, int axis);
TabulatedValue tabulated_qij_principal(const DetectorShape& shape, int axis);
TabulatedValue tabulated_lr(const DetectorShape& shape, const OracleConfig& cfg = {});

struct CoefficientCheck {
  std::string name;
  double engine = 0.0;
  double oracle = 0.0;
  double tolerance = 0.0;
  bool engine_agrees = false;
  TabulatedValue tabulated;
  double tabulated_over_oracle = 0.0;  // NaN when undefined
};

struct ValidationReport {
  DetectorShape shape;
  std::vector<CoefficientCheck> checks;
  bool all_engine_agree() const;
};

// Compares every engine coefficient with the quadrature oracle (relative
// tolerance, absolute floor 1e-7 * lambda^2 scale for vanishing entries) and
// records the ratio of each tabulated closed form to the oracle.
ValidationReport validate_coefficients(const DetectorShape& shape, const OracleConfig& cfg = {},
                                       double rel_tol = 1e-5);

}  // namespace curvtomo
