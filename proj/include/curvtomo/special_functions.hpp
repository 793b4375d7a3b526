#pragma once

// Incomplete elliptic integrals (Carlson and Legendre forms) and digamma.
//
// Legendre forms use the parameter convention: the second argument is
// m = k^2, so F(phi | m) = int_0^phi (1 - m sin^2 t)^{-1/2} dt.

namespace curvtomo {

struct EllipticArgs {
  double phi;  // amplitude in radians, 0 <= phi <= pi/2
  double m;    // parameter, 0 <= m <= 1
};

// Carlson's symmetric integral of the first kind,
// R_F(x,y,z) = 1/2 int_0^inf [(t+x)(t+y)(t+z)]^{-1/2} dt.
double carlson_rf(double x, double y, double z);

// Carlson's symmetric integral of the second kind,
// R_D(x,y,z) = 3/2 int_0^inf [(t+x)(t+y)]^{-1/2} (t+z)^{-3/2} dt.
double carlson_rd(double x, double y, double z);

double ellip_f(EllipticArgs args);
double ellip_e(EllipticArgs args);

double digamma(double x);

}  // namespace curvtomo
