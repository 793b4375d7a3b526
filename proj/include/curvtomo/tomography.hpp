#pragma once

// Linear inversion of detector excitation probabilities for the curvature
// combinations M_ij, N_ij and the Ricci scalar R, plus the boosted-frame
// extension to the full Riemann tensor.
//
// Parameter vector (13 entries):
//   (M11, M22, M33, M12, M13, M23, N11, N22, N33, N12, N13, N23, R)
// Design rows carry the matching coefficients with off-diagonal entries
// doubled, so that row . theta = M_ij Q^ij + N_ij L^ij + 2 pi^2 R L_R / 3 times
// exp(-2 L0).

#include <Eigen/Core>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "curvtomo/coefficients.hpp"
#include "curvtomo/execution.hpp"
#include "curvtomo/geometry.hpp"
#include "curvtomo/shape.hpp"

namespace curvtomo {

constexpr int kUnknowns = 13;
using Vector13d = Eigen::Matrix<double, kUnknowns, 1>;
using Matrix13d = Eigen::Matrix<double, kUnknowns, kUnknowns>;

const std::array<std::string, kUnknowns>& parameter_names();

Vector13d pack_parameters(const Eigen::Matrix3d& m, const Eigen::Matrix3d& n, double r);
// Truth parameters of a curvature point as seen in its own frame.
Vector13d parameters_of(const CurvaturePoint& point);

Vector13d assemble_row(const CoefficientSet& coeffs);

struct Probe {
  DetectorShape shape;
  BoostSpec boost;
  CoefficientSet coeffs;
  std::size_t pool_index = 0;
};

struct ExperimentDesign {
  std::vector<Probe> probes;
  Eigen::MatrixXd matrix;  // rows x 13
  double condition_number = 0.0;
  int rank = 0;

  // Same shapes probed from a frame moving with the given boost.
  ExperimentDesign in_frame(const BoostSpec& boost) const;
};

// Builds the design for every probe in order (no selection).
ExperimentDesign make_design(const std::vector<DetectorShape>& shapes,
                             const BoostSpec& boost = {},
                             Execution execution = Execution::Parallel);

// Greedy selection of `count` probes from the pool, each step adding the
// candidate giving the smallest condition number of the selected rows
// (ties go to the lowest pool index). Throws DesignError when the pool is
// rank deficient.
ExperimentDesign design_experiment(const std::vector<DetectorShape>& pool, std::size_t count,
                                   Execution execution = Execution::Parallel);

// Canonical pool: prolate and oblate spheroids along the three axes and the
// three plane diagonals, spheres of two sizes, and a strongly triaxial shape.
std::vector<DetectorShape> canonical_pool(double size = 1.0, double coupling = 1.0);

struct Measurement {
  double p = 0.0;
  double sigma = 1.0;
};

constexpr int kDerived = 15;
using Vector15d = Eigen::Matrix<double, kDerived, 1>;

// Derived vector layout: R_ij (11,22,33,12,13,23), R_{tau i tau j} (same
// order), omega0, R, R_{tau tau}.
const std::array<std::string, kDerived>& derived_names();

struct RecoveryResult {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d n = Eigen::Matrix3d::Zero();
  double r_scalar = 0.0;
  Eigen::Matrix3d ricci_spatial = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d riemann_tautau_block = Eigen::Matrix3d::Zero();
  double omega0 = 0.0;
  double r_tautau = 0.0;
  Vector13d parameters = Vector13d::Zero();
  Matrix13d covariance = Matrix13d::Zero();
  Vector15d derived = Vector15d::Zero();
  Eigen::Matrix<double, kDerived, kDerived> derived_covariance =
      Eigen::Matrix<double, kDerived, kDerived>::Zero();
  double residual_norm = 0.0;
  double condition_number = 0.0;
};

// Recovery algebra applied to a parameter vector.
RecoveryResult recover_from_parameters(const Vector13d& theta);
Vector15d derived_of(const CurvaturePoint& point);

RecoveryResult solve(const ExperimentDesign& design, const std::vector<Measurement>& measurements,
                     const std::vector<double>& p0s);

struct FrameMeasurement {
  BoostSpec boost;
  RecoveryResult result;
};

struct MultiFrameResult {
  RiemannTensor riemann;
  int rank = 0;
  double condition_number = 0.0;
  double residual_norm = 0.0;
};

MultiFrameResult multi_frame_recovery(const std::vector<FrameMeasurement>& frames);

}  // namespace curvtomo
