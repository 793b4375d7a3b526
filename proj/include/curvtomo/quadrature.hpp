#pragma once

#include <Eigen/Core>
#include <functional>

namespace curvtomo {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

using ScalarFn = std::function<double(double)>;
using SphereFn = std::function<double(const Eigen::Vector3d&)>;

// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. Converged when the
// summed error estimate is below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const ScalarFn& f, double a, double b, double rel_tol,
                                    double abs_tol = 0.0, int max_intervals = 4000);

// Integral over [a, inf) through t = a + scale * u / (1 - u).
QuadratureResult integrate_semi_infinite(const ScalarFn& f, double a, double scale,
                                         double rel_tol, double abs_tol = 0.0,
                                         int max_intervals = 4000);

// Integral of g(n) over the unit sphere, dOmega = sin(theta) dtheta dphi.
// Rectangular cells in (theta, phi) carry a tensor Kronrod-15 rule and are
// bisected along the coordinate with the larger embedded-Gauss error.
// Converged when the error is below rel_tol * max(|I|, int |g| dOmega).
QuadratureResult integrate_sphere(const SphereFn& g, double rel_tol, int max_cells = 20000);

}  // namespace curvtomo
