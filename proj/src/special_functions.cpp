#include "curvtomo/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "curvtomo/errors.hpp"

namespace curvtomo {

namespace {

// Carlson duplication stops once the scaled spread drops below this bound;
// the seventh-order series then leaves a truncation error well under 1e-15.
constexpr double kDuplicationTolerance = 1e-16;

void check_finite_nonnegative(double v, const char* who) {
  if (!std::isfinite(v)) throw DomainError(std::string(who) + ": non-finite argument");
  if (v < 0.0) throw DomainError(std::string(who) + ": negative argument");
}

void check_elliptic_args(const EllipticArgs& a, const char* who) {
  if (!(a.phi >= 0.0 && a.phi <= std::numbers::pi / 2 + 1e-15))
    throw DomainError(std::string(who) + ": amplitude outside [0, pi/2]");
  if (!(a.m >= 0.0 && a.m <= 1.0))
    throw DomainError(std::string(who) + ": parameter m outside [0, 1]");
}

}  // namespace

double carlson_rf(double x, double y, double z) {
  check_finite_nonnegative(x, "carlson_rf");
  check_finite_nonnegative(y, "carlson_rf");
  check_finite_nonnegative(z, "carlson_rf");
  if ((x == 0.0) + (y == 0.0) + (z == 0.0) >= 2)
    throw DomainError("carlson_rf: two or more zero arguments");

  const double a0 = (x + y + z) / 3.0;
  double an = a0;
  double q = std::pow(3.0 * kDuplicationTolerance, -1.0 / 6.0) *
             std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)});
  double xn = x, yn = y, zn = z;
  double fn = 1.0;  // 4^{-n}
  while (q * fn >= std::abs(an)) {
    const double sx = std::sqrt(xn), sy = std::sqrt(yn), sz = std::sqrt(zn);
    const double lam = sx * sy + sy * sz + sz * sx;
    an = 0.25 * (an + lam);
    xn = 0.25 * (xn + lam);
    yn = 0.25 * (yn + lam);
    zn = 0.25 * (zn + lam);
    fn *= 0.25;
  }
  const double xd = (a0 - x) * fn / an;
  const double yd = (a0 - y) * fn / an;
  const double zd = -xd - yd;
  const double e2 = xd * yd - zd * zd;
  const double e3 = xd * yd * zd;
  return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) /
         std::sqrt(an);
}

double carlson_rd(double x, double y, double z) {
  check_finite_nonnegative(x, "carlson_rd");
  check_finite_nonnegative(y, "carlson_rd");
  check_finite_nonnegative(z, "carlson_rd");
  if (z == 0.0) throw DomainError("carlson_rd: z must be positive");
  if (x == 0.0 && y == 0.0) throw DomainError("carlson_rd: x and y both zero");

  const double a0 = (x + y + 3.0 * z) / 5.0;
  double an = a0;
  double q = std::pow(0.25 * kDuplicationTolerance, -1.0 / 6.0) *
             std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)});
  double xn = x, yn = y, zn = z;
  double fn = 1.0;
  double tail = 0.0;
  while (q * fn >= std::abs(an)) {
    const double sx = std::sqrt(xn), sy = std::sqrt(yn), sz = std::sqrt(zn);
    const double lam = sx * sy + sy * sz + sz * sx;
    tail += fn / (sz * (zn + lam));
    an = 0.25 * (an + lam);
    xn = 0.25 * (xn + lam);
    yn = 0.25 * (yn + lam);
    zn = 0.25 * (zn + lam);
    fn *= 0.25;
  }
  const double xd = (a0 - x) * fn / an;
  const double yd = (a0 - y) * fn / an;
  const double zd = -(xd + yd) / 3.0;
  const double xy = xd * yd;
  const double z2 = zd * zd;
  const double e2 = xy - 6.0 * z2;
  const double e3 = (3.0 * xy - 8.0 * z2) * zd;
  const double e4 = 3.0 * (xy - z2) * z2;
  const double e5 = xy * z2 * zd;
  const double series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 -
                        3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0;
  return fn * series / (an * std::sqrt(an)) + 3.0 * tail;
}

double ellip_f(EllipticArgs args) {
  check_elliptic_args(args, "ellip_f");
  if (args.phi == 0.0) return 0.0;
  const double s = std::sin(args.phi);
  const double c = std::cos(args.phi);
  const double delta2 = 1.0 - args.m * s * s;
  if (args.m == 1.0 && std::abs(c) < 1e-15)
    throw DomainError("ellip_f: pole at phi = pi/2, m = 1");
  return s * carlson_rf(c * c, delta2, 1.0);
}

double ellip_e(EllipticArgs args) {
  check_elliptic_args(args, "ellip_e");
  if (args.phi == 0.0) return 0.0;
  const double s = std::sin(args.phi);
  if (args.m == 1.0) return s;
  const double c = std::cos(args.phi);
  const double delta2 = 1.0 - args.m * s * s;
  const double c2 = c * c;
  return s * carlson_rf(c2, delta2, 1.0) -
         args.m * s * s * s * carlson_rd(c2, delta2, 1.0) / 3.0;
}

double digamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) throw DomainError("digamma: argument must be positive");
  double shift = 0.0;
  // Recurrence psi(x) = psi(x + 1) - 1/x up to the asymptotic regime.
  while (x < 12.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // Bernoulli-number asymptotic series: B_{2k} / (2k).
  constexpr double coeffs[] = {1.0 / 12.0,    -1.0 / 120.0, 1.0 / 252.0,
                               -1.0 / 240.0,  1.0 / 132.0,  -691.0 / 32760.0,
                               1.0 / 12.0};
  const double inv2 = 1.0 / (x * x);
  double poly = 0.0;
  double p = inv2;
  for (double c : coeffs) {
    poly += c * p;
    p *= inv2;
  }
  return shift + std::log(x) - 0.5 / x - poly;
}

}  // namespace curvtomo
