#pragma once

// Independent evaluation of the smearing-coefficient integrals
//
//   B[h] = lambda^2 int d^3x d^3x' f(x) f(x') W0(x, x') h(x, x'),
//   W0 = 1 / (8 pi^2 sigma),  sigma = |x - x'|^2 / 2,
//
// for ellipsoidal Gaussian smearings. Two routes: a semi-analytic spherical
// reduction (analytic Gaussian moments of the mean coordinate, closed-form
// radial integrals, adaptive angular cubature), and importance-sampled Monte
// Carlo over the full six-dimensional integral.

#include <cstdint>
#include <string>

#include "curvtomo/execution.hpp"
#include "curvtomo/shape.hpp"

namespace curvtomo {

struct KernelKind {
  enum class Tag { One, Linear, Quadratic, DiffQuadratic, DiffSquaredLog, DiffSquared };
  Tag tag = Tag::One;
  int i = 0;  // 0-based spatial indices
  int j = 0;

  static KernelKind one() { return {Tag::One, 0, 0}; }
  static KernelKind linear(int i) { return {Tag::Linear, i, 0}; }
  static KernelKind quadratic(int i, int j) { return {Tag::Quadratic, i, j}; }
  static KernelKind diff_quadratic(int i, int j) { return {Tag::DiffQuadratic, i, j}; }
  static KernelKind diff_squared_log() { return {Tag::DiffSquaredLog, 0, 0}; }
  static KernelKind diff_squared() { return {Tag::DiffSquared, 0, 0}; }

  // h(x, x') for this kernel.
  double evaluate(const Eigen::Vector3d& x, const Eigen::Vector3d& xp) const;
  std::string name() const;
};

struct OracleConfig {
  double angular_tolerance = 1e-9;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 20240611;
  int max_cells = 40000;

  void validate() const;
};

// Closed form of int_0^inf r^power exp(-q r^2 / 2) dr, optionally with an
// extra ln(r^2) factor (Gamma and digamma).
double radial_moment(double q, int power, bool with_log);

double b_functional(const DetectorShape& shape, const KernelKind& kernel,
                    const OracleConfig& cfg = {});

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

McEstimate b_functional_mc(const DetectorShape& shape, const KernelKind& kernel,
                           const OracleConfig& cfg = {},
                           Execution execution = Execution::Parallel);

}  // namespace curvtomo
