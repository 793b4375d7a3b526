#include "curvtomo/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvtomo/errors.hpp"

namespace curvtomo {

namespace {
constexpr double kPi = std::numbers::pi;
}

double p0_of(double l0) {
  if (!(l0 >= 0.0)) throw DomainError("p0_of: L0 must be non-negative");
  return -0.5 * std::expm1(-2.0 * l0);
}

ProbabilityBreakdown excitation_probability(const CoefficientSet& coeffs,
                                            const CurvaturePoint& point) {
  const RicciResult ric = ricci_from_riemann(point.riemann);
  const Eigen::Matrix3d ricci_sp = ric.ricci.bottomRightCorner<3, 3>();
  const Eigen::Matrix3d m = m_tensor(point.riemann);

  ProbabilityBreakdown out;
  out.p0 = p0_of(coeffs.l0);
  out.correction_volume = (m.cwiseProduct(coeffs.q)).sum();
  out.correction_accel = 2.0 * point.accel.dot(coeffs.d);
  out.correction_vanvleck = (ricci_sp.cwiseProduct(coeffs.lij)).sum() / 12.0;
  out.correction_scalar = 2.0 * kPi * kPi / 3.0 * ric.scalar * coeffs.lr;
  out.correction_state = 4.0 * kPi * kPi * point.omega0 * coeffs.lomega;

  const double delta = std::exp(-2.0 * coeffs.l0) * out.correction_sum();
  double p = out.p0 + delta;
  out.out_of_validity = std::abs(delta) > 0.1 * out.p0;
  if (p < 0.0 || p > 1.0) {
    out.clamped = true;
    p = std::clamp(p, 0.0, 1.0);
  }
  out.p = p;
  return out;
}

double wightman_short_distance(const Eigen::Vector3d& x, const Eigen::Vector3d& xp,
                               const CurvaturePoint& point) {
  const Eigen::Vector3d d = x - xp;
  const double r2 = d.squaredNorm();
  if (r2 == 0.0) throw DomainError("wightman_short_distance: coincident points");
  const RicciResult ric = ricci_from_riemann(point.riemann);
  const Eigen::Matrix3d ricci_sp = ric.ricci.bottomRightCorner<3, 3>();
  const double sigma = 0.5 * r2;
  const double w0 = 1.0 / (8.0 * kPi * kPi * sigma);
  return w0 * (1.0 + d.dot(ricci_sp * d) / 12.0 +
               2.0 * kPi * kPi / 3.0 * ric.scalar * r2 * std::log(std::abs(sigma)) +
               4.0 * kPi * kPi * point.omega0 * r2);
}

double wick_pairings(int n) {
  if (n < 0) throw DomainError("wick_pairings: n must be non-negative");
  double v = 1.0;
  for (int k = 2 * n - 1; k > 1; k -= 2) v *= k;
  return v;
}

double quasifree_series_check(double l, int n_terms) {
  if (!(l >= 0.0)) throw DomainError("quasifree_series_check: l must be non-negative");
  if (n_terms < 1) throw DomainError("quasifree_series_check: need at least one term");
  // term(n) = (-1)^n 4^n (2n-1)!! / (2n)! l^n, advanced through the ratio of
  // consecutive double factorials (2n+1) and factorials (2n+1)(2n+2).
  double term = 1.0;
  double sum = 0.0;
  double comp = 0.0;  // Neumaier compensation
  for (int n = 0; n < n_terms; ++n) {
    const double t = sum + term;
    comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    const double double_factorial_ratio = 2.0 * n + 1.0;
    const double factorial_ratio = (2.0 * n + 1.0) * (2.0 * n + 2.0);
    term *= -4.0 * l * double_factorial_ratio / factorial_ratio;
  }
  return sum + comp;
}

}  // namespace curvtomo
