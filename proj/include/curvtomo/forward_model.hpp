#pragma once

#include <Eigen/Core>

#include "curvtomo/coefficients.hpp"
#include "curvtomo/geometry.hpp"

namespace curvtomo {

struct ProbabilityBreakdown {
  double p0 = 0.0;
  double correction_volume = 0.0;     // M_ij Q^ij
  double correction_accel = 0.0;      // 2 a_i D^i
  double correction_vanvleck = 0.0;   // R_ij L^ij / 12
  double correction_scalar = 0.0;     // (2 pi^2 / 3) R L_R
  double correction_state = 0.0;      // 4 pi^2 omega0 L_w
  double p = 0.0;
  bool out_of_validity = false;  // |p - p0| > 0.1 p0
  bool clamped = false;          // raw p fell outside [0, 1]

  double correction_sum() const {
    return correction_volume + correction_accel + correction_vanvleck + correction_scalar +
           correction_state;
  }
};

// Flat-space excitation probability (1 - exp(-2 L0)) / 2.
double p0_of(double l0);

// P = P0 + exp(-2 L0) (M.Q + 2 a.D + Ric.L / 12 + 2 pi^2 R L_R / 3 + 4 pi^2 omega0 L_w).
ProbabilityBreakdown excitation_probability(const CoefficientSet& coeffs,
                                            const CurvaturePoint& point);

// Short-distance Hadamard approximation of the equal-time Wightman function
// about the interaction centre.
double wightman_short_distance(const Eigen::Vector3d& x, const Eigen::Vector3d& xp,
                               const CurvaturePoint& point);

// Number of Wick pairings of 2n fields, (2n - 1)!!.
double wick_pairings(int n);

// Partial sum over n < n_terms of (-1)^n 4^n (2n-1)!! / (2n)! l^n, i.e. the
// expectation of exp(2iY) in a quasifree state; tends to exp(-2 l).
double quasifree_series_check(double l, int n_terms);

}  // namespace curvtomo
