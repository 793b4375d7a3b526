#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "curvtomo/coefficients.hpp"
#include "curvtomo/errors.hpp"
#include "curvtomo/oracle.hpp"
#include "doctest.h"
#include "frozen.hpp"
#include "reference.hpp"
#include "shapes.hpp"

using namespace curvtomo;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

OracleConfig tight() {
  OracleConfig cfg;
  cfg.angular_tolerance = 1e-11;
  return cfg;
}

Eigen::Matrix3d oracle_tensor(const DetectorShape& s, bool diff, const OracleConfig& cfg = tight()) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      m(i, j) = m(j, i) = b_functional(
          s, diff ? KernelKind::diff_quadratic(i, j) : KernelKind::quadratic(i, j), cfg);
  return m;
}

bool is_isotropic(const Eigen::Matrix3d& m, double tol) {
  const double k = m.trace() / 3.0;
  return (m - k * Eigen::Matrix3d::Identity()).norm() <= tol * std::abs(k);
}

const DetectorShape kTriaxial = DetectorShape::make({1.0, 1.5, 2.0}, Eigen::Matrix3d::Identity());

}  // namespace

TEST_CASE("shape canonicalization") {
  const Eigen::Matrix3d r = rotation_from_axis_angle({1, 2, 3}, 0.9);
  const auto s = DetectorShape::make({2.0, 0.5, 1.0}, r);
  CHECK(s.a() == 0.5);
  CHECK(s.b() == 1.0);
  CHECK(s.c() == 2.0);
  CHECK(s.rotation().determinant() == Approx(1.0).epsilon(1e-14));
  // same precision matrix as the unsorted input
  const Eigen::Matrix3d a = r * Eigen::Vector3d(4.0, 0.25, 1.0).asDiagonal() * r.transpose();
  CHECK((s.precision() - a).norm() < 1e-14);
  CHECK((s.precision() * s.covariance() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK_THROWS_AS(DetectorShape::make({1, 1, -1}, Eigen::Matrix3d::Identity()), DomainError);
  CHECK_THROWS_AS(DetectorShape::make({1, 1, 1}, Eigen::Matrix3d::Identity(), 0.0), DomainError);
  CHECK_THROWS_AS(DetectorShape::make({1, 1, 1}, 2.0 * Eigen::Matrix3d::Identity()), DomainError);
}

TEST_CASE("smearing density is normalized") {
  const auto s = DetectorShape::from_axis_angle({0.7, 1.2, 2.5}, {1, 0, 1}, 0.6);
  const auto rule = reference::gauss_legendre(48);
  // integrate in principal coordinates scaled to the unit Gaussian
  double total = 0.0;
  const double half = 8.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    for (std::size_t j = 0; j < rule.x.size(); ++j)
      for (std::size_t k = 0; k < rule.x.size(); ++k) {
        const Eigen::Vector3d u(rule.x[i] * half, rule.x[j] * half, rule.x[k] * half);
        const Eigen::Vector3d y = s.rotation() * u.cwiseQuotient(s.axes());
        total += rule.w[i] * rule.w[j] * rule.w[k] * s.density(y);
      }
  total *= half * half * half / s.axes().prod();
  CHECK(total == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coeff_l0") {
  const auto sphere = DetectorShape::sphere(1.0);
  CHECK(rel(coeff_l0(sphere), frozen::kSphereL0) < 1e-15);
  CHECK(rel(coeff_l0(sphere), 1.0 / (8 * kPi * kPi)) < 1e-15);
  // tabulated sphere constant sits a factor 2 sqrt(2) below the oracle
  CHECK(tabulated_l0(sphere).value == Approx(1.0 / (16 * std::sqrt(2.0) * kPi * kPi)).epsilon(1e-15));
  CHECK(coeff_l0(sphere) / tabulated_l0(sphere).value == Approx(2 * std::sqrt(2.0)).epsilon(1e-14));

  for (const auto& s : testing_shapes::random_shapes(3, 17))
    CHECK(rel(coeff_l0(s.dilated(2.0)), coeff_l0(s) / 4.0) < 1e-14);

  CHECK(rel(coeff_l0(kTriaxial), b_functional(kTriaxial, KernelKind::one(), tight())) < 1e-10);
  CHECK(rel(coeff_l0_legendre(kTriaxial), coeff_l0(kTriaxial)) < 1e-13);
  for (const auto& s : testing_shapes::random_shapes(5, 18))
    CHECK(rel(coeff_l0_legendre(s), coeff_l0(s)) < 1e-13);
}

TEST_CASE("coeff_lomega is shape independent") {
  const auto a = DetectorShape::from_axis_angle({0.3, 1.0, 4.0}, {1, 0, 0}, 0.2);
  const auto b = DetectorShape::from_axis_angle({1.1, 1.2, 1.3}, {0, 1, 1}, 1.4);
  CHECK(coeff_lomega(a) == coeff_lomega(b));
  CHECK(coeff_lomega(a) == Approx(1.0 / (4 * kPi * kPi)).epsilon(1e-15));
  CHECK(coeff_lomega(a.with_coupling(2.0)) == Approx(4 * coeff_lomega(a)).epsilon(1e-15));
  CHECK(rel(coeff_lomega(a), b_functional(a, KernelKind::diff_squared(), tight())) < 1e-10);
  CHECK(tabulated_lomega(a).value / coeff_lomega(a) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("coeff_d vanishes") {
  for (const auto& s : testing_shapes::random_shapes(4, 19)) {
    CHECK(coeff_d(s).norm() == 0.0);
    CHECK(coeff_d(s.rotated(rotation_from_axis_angle({1, 1, 0}, 0.5))).norm() == 0.0);
    OracleConfig cfg;
    cfg.mc_samples = 20000;
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(b_functional_mc(s, KernelKind::linear(i), cfg).estimate) < 1e-8 * s.coupling());
  }
}

TEST_CASE("coeff_lij") {
  const auto sphere = DetectorShape::sphere(1.0);
  const Eigen::Matrix3d ls = coeff_lij(sphere);
  CHECK(is_isotropic(ls, 1e-14));
  CHECK(rel(ls(0, 0), frozen::kSphereLii) < 1e-14);

  const auto s = DetectorShape::make({1.0, 2.0, 3.0}, Eigen::Matrix3d::Identity());
  const Eigen::Matrix3d l = coeff_lij(s);
  CHECK(l(0, 0) > l(1, 1));
  CHECK(l(1, 1) > l(2, 2));
  CHECK(std::abs(l(0, 1)) + std::abs(l(0, 2)) + std::abs(l(1, 2)) == 0.0);
  const Eigen::Matrix3d lo = oracle_tensor(s, true);
  for (int i = 0; i < 3; ++i) CHECK(rel(l(i, i), lo(i, i)) < 1e-10);
  CHECK((coeff_lij(s.dilated(2.0)) - l).norm() < 1e-14 * l.norm());
  CHECK(l.trace() == Approx(coeff_lomega(s)).epsilon(1e-14));
}

TEST_CASE("coeff_qij and the moment ratio") {
  // second moment over zeroth moment of exp(-a^2 v^2 / 2) along one axis
  const double a = 1.7;
  const double m0 = reference::exp_sinh([&](double v) { return std::exp(-0.5 * a * a * v * v); });
  const double m2 = reference::exp_sinh([&](double v) { return v * v * std::exp(-0.5 * a * a * v * v); });
  CHECK(m2 / m0 == Approx(1.0 / (a * a)).epsilon(1e-13));
  const auto s = DetectorShape::make({a, 2.0, 3.0}, Eigen::Matrix3d::Identity());
  CHECK(coeff_eij(s)(0, 0) == Approx(1.0 / (a * a)).epsilon(1e-15));

  CHECK(is_isotropic(coeff_qij(DetectorShape::sphere(0.7)), 1e-14));
  const Eigen::Matrix3d q = coeff_qij(kTriaxial);
  CHECK((q - oracle_tensor(kTriaxial, false)).norm() < 1e-10 * q.norm());
}

TEST_CASE("coeff_lr") {
  const auto sphere = DetectorShape::sphere(1.0);
  CHECK(rel(coeff_lr(sphere), frozen::kSphereLR) < 1e-12);
  // sphere closed form lambda^2 (ln 2 + psi(3/2)) / (4 pi^2)
  CHECK(rel(coeff_lr(sphere), (std::log(2.0) + frozen::kDigammaThreeHalves) / (4 * kPi * kPi)) <
        1e-12);
  OracleConfig cfg;
  cfg.mc_samples = 400000;
  const auto mc = b_functional_mc(sphere, KernelKind::diff_squared_log(), cfg);
  CHECK(std::abs(mc.estimate - coeff_lr(sphere)) < 4 * mc.std_error);

  const auto t = DetectorShape::from_axis_angle({0.5, 1.0, 2.2}, {0, 0, 1}, 0.0, 0.8);
  const auto tr = t.rotated(rotation_from_axis_angle({2, -1, 1}, 2.0));
  CHECK(rel(coeff_lr(tr), coeff_lr(t)) < 1e-12);
  CHECK(rel(coeff_lr(t), b_functional(t, KernelKind::diff_squared_log(), tight())) < 1e-9);
  for (double s : {2.0, 4.0})
    CHECK(rel(coeff_lr(t.dilated(s)), coeff_lr(t) + std::log(s * s) * coeff_lomega(t)) < 1e-10);
}

TEST_CASE("full_set") {
  const auto cs = full_set(DetectorShape::sphere(1.3, 0.4));
  CHECK(cs.d.norm() == 0.0);
  CHECK(is_isotropic(cs.q, 1e-14));
  CHECK(is_isotropic(cs.lij, 1e-14));
  CHECK(to_string(cs.provenance.l0) == "closed_form");
  CHECK(to_string(cs.provenance.lr) == "semi_analytic");
  CHECK(to_string(cs.provenance.lomega) == "closed_form");
}

TEST_CASE("engine matches the oracle on random shapes") {
  for (const auto& s : testing_shapes::random_shapes(6, 23, 0.4, 2.5, 1.7)) {
    const auto cs = full_set(s);
    const auto cfg = tight();
    CHECK(rel(cs.l0, b_functional(s, KernelKind::one(), cfg)) < 1e-9);
    CHECK(rel(cs.lr, b_functional(s, KernelKind::diff_squared_log(), cfg)) < 1e-9);
    CHECK(rel(cs.lomega, b_functional(s, KernelKind::diff_squared(), cfg)) < 1e-9);
    CHECK((cs.q - oracle_tensor(s, false, cfg)).norm() < 1e-9 * cs.q.norm());
    CHECK((cs.lij - oracle_tensor(s, true, cfg)).norm() < 1e-9 * cs.lij.norm());
    CHECK((cs.q - cs.q.transpose()).norm() <= 1e-12 * cs.q.norm());
    CHECK((cs.lij - cs.lij.transpose()).norm() <= 1e-12 * cs.lij.norm());
  }
}

TEST_CASE("rank-2 equivariance of the engine") {
  const auto s = DetectorShape::from_axis_angle({0.6, 1.1, 1.9}, {1, 0, 0}, 0.3, 1.2);
  const Eigen::Matrix3d r = rotation_from_axis_angle({0.2, 1, -0.4}, 2.2);
  const auto a = full_set(s), b = full_set(s.rotated(r));
  CHECK((r * a.q * r.transpose() - b.q).norm() < 1e-12 * a.q.norm());
  CHECK((r * a.lij * r.transpose() - b.lij).norm() < 1e-12 * a.lij.norm());
  CHECK(rel(b.l0, a.l0) < 1e-12);
  CHECK(rel(b.lr, a.lr) < 1e-12);
  CHECK(b.lomega == a.lomega);
}

TEST_CASE("degenerate-axis continuity") {
  const auto cfg = tight();
  for (const auto& axes : {Eigen::Vector3d(1.0, 1.0, 2.0), Eigen::Vector3d(0.5, 1.5, 1.5),
                           Eigen::Vector3d(1.2, 1.2, 1.2)}) {
    const auto limit = DetectorShape::make(axes, Eigen::Matrix3d::Identity());
    const double l0 = b_functional(limit, KernelKind::one(), cfg);
    const double lr = b_functional(limit, KernelKind::diff_squared_log(), cfg);
    const Eigen::Matrix3d l = oracle_tensor(limit, true, cfg);
    const Eigen::Matrix3d q = oracle_tensor(limit, false, cfg);
    for (double eps : {1e-3, 1e-6, 1e-9, 0.0}) {
      Eigen::Vector3d nearby = axes;
      nearby[1] *= 1.0 + eps;
      const auto cs = full_set(DetectorShape::make(nearby, Eigen::Matrix3d::Identity()));
      const double bound = 1e-7 + 5.0 * eps;  // smooth in eps; no jump at eps = 0
      CHECK(rel(cs.l0, l0) < bound);
      CHECK(rel(cs.lr, lr) < bound);
      CHECK((cs.lij - l).norm() < bound * l.norm());
      CHECK((cs.q - q).norm() < bound * q.norm());
    }
  }
}

TEST_CASE("batch evaluation is identical serially and in parallel") {
  const auto shapes = testing_shapes::random_shapes(9, 29);
  const auto a = full_set_batch(shapes, Execution::Serial);
  const auto b = full_set_batch(shapes, Execution::Parallel);
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    CHECK(a[k].l0 == b[k].l0);
    CHECK(a[k].lr == b[k].lr);
    CHECK(a[k].q == b[k].q);
    CHECK(a[k].lij == b[k].lij);
  }
}

TEST_CASE("validation report records engine agreement and tabulated ratios") {
  const auto sphere = validate_coefficients(DetectorShape::sphere(1.0));
  CHECK(sphere.all_engine_agree());
  auto find = [](const ValidationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
      if (c.name == name) return c;
    FAIL("missing check " << name);
    return CoefficientCheck{};
  };
  CHECK(find(sphere, "L0").tabulated_over_oracle == Approx(1.0 / (2 * std::sqrt(2.0))).epsilon(1e-9));
  CHECK(find(sphere, "Lomega").tabulated_over_oracle == Approx(0.5).epsilon(1e-9));

  const auto tri = validate_coefficients(DetectorShape::from_axis_angle({0.7, 1.1, 1.9}, {1, 2, 3}, 0.8));
  CHECK(tri.all_engine_agree());
  // the tabulated E^ij is first order in length; its ratio to 1/a^2 is sqrt(2) a
  const auto e = find(tri, "E1'1'");
  CHECK(e.tabulated.defined);
  CHECK(e.tabulated_over_oracle == Approx(std::sqrt(2.0) * 0.7).epsilon(1e-9));
  for (const auto& c : tri.checks) CHECK(c.engine_agrees);
}
