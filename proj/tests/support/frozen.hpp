#pragma once

// Reference values computed once with 30-digit arithmetic (mpmath) and
// cross-checked by direct quadrature of the defining integrals.

namespace frozen {

constexpr double kRfHalfOneTwo = 0.968857653272452456;   // R_F(0.5, 1, 2)
constexpr double kRdZeroTwoTwo = 0.833040550904693666;   // R_D(0, 2, 2)
constexpr double kRdOneTwoThree = 0.290460281028990644;  // R_D(1, 2, 3)
constexpr double kFPiThirdHalf = 1.14242905804577725550;  // F(pi/3 | 0.5)
constexpr double kEPiQuarter03 = 0.763462718580619074;   // E(pi/4 | 0.3)
constexpr double kDigammaThreeHalves = 0.0364899739785765205590;
constexpr double kEulerGamma = 0.57721566490153286061;
// int_0^inf r^2 exp(-r^2/2) ln(r^2) dr
constexpr double kLogSecondMoment = 0.914464560893783826;

// Unit sphere (axis parameter 1), coupling 1.
constexpr double kSphereL0 = 0.012665147955292222;
constexpr double kSphereLii = 0.008443431970194815;
constexpr double kSphereLR = 0.018481925031817583;

}  // namespace frozen
