#include "curvtomo/coefficients.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "curvtomo/errors.hpp"
#include "curvtomo/quadrature.hpp"
#include "curvtomo/special_functions.hpp"

namespace curvtomo {

namespace {

constexpr double kPi = std::numbers::pi;

double lam2(const DetectorShape& s) { return s.coupling() * s.coupling(); }

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed_form";
    case Provenance::SemiAnalytic: return "semi_analytic";
    case Provenance::Oracle: return "oracle";
  }
  return "?";
}

double coeff_l0(const DetectorShape& shape) {
  const Eigen::Vector3d sq = shape.axes().cwiseProduct(shape.axes());
  return lam2(shape) * shape.sqrt_det_precision() * carlson_rf(sq[0], sq[1], sq[2]) /
         (8.0 * kPi * kPi);
}

double coeff_l0_legendre(const DetectorShape& shape) {
  const double a = shape.a(), b = shape.b(), c = shape.c();
  const double spread = c * c - a * a;
  if (spread <= 0.0) return lam2(shape) * a * a / (8.0 * kPi * kPi);
  const double f = ellip_f({std::acos(a / c), (c * c - b * b) / spread});
  return lam2(shape) * a * b * c * f / (8.0 * kPi * kPi * std::sqrt(spread));
}

double coeff_lomega(const DetectorShape& shape) { return lam2(shape) / (4.0 * kPi * kPi); }

Eigen::Vector3d coeff_d(const DetectorShape&) { return Eigen::Vector3d::Zero(); }

Eigen::Matrix3d coeff_lij(const DetectorShape& shape) {
  const Eigen::Vector3d sq = shape.axes().cwiseProduct(shape.axes());
  const double pre = lam2(shape) * shape.sqrt_det_precision() / (12.0 * kPi * kPi);
  Eigen::Vector3d diag;
  diag[0] = pre * carlson_rd(sq[1], sq[2], sq[0]);
  diag[1] = pre * carlson_rd(sq[0], sq[2], sq[1]);
  diag[2] = pre * carlson_rd(sq[0], sq[1], sq[2]);
  const Eigen::Matrix3d& r = shape.rotation();
  return r * diag.asDiagonal() * r.transpose();
}

Eigen::Matrix3d coeff_eij(const DetectorShape& shape) { return shape.covariance(); }

Eigen::Matrix3d coeff_qij(const DetectorShape& shape) {
  return 0.25 * coeff_lij(shape) + 0.5 * coeff_l0(shape) * coeff_eij(shape);
}

double coeff_lr(const DetectorShape& shape, double rel_tol) {
  // Variances of d along the principal axes, normalized by their geometric mean.
  Eigen::Vector3d var;
  for (int i = 0; i < 3; ++i) var[i] = 2.0 / (shape.axes()[i] * shape.axes()[i]);
  const double gm = std::cbrt(var.prod());
  const Eigen::Vector3d c = var / gm;
  auto integrand = [&](double t) {
    if (t == 0.0) return c.sum() - 1.0;
    const double log_prod =
        -0.5 * (std::log1p(2.0 * t * c[0]) + std::log1p(2.0 * t * c[1]) +
                std::log1p(2.0 * t * c[2]));
    return (std::expm1(-t) - std::expm1(log_prod)) / t;
  };
  const QuadratureResult head = integrate_adaptive(integrand, 0.0, 1.0, rel_tol, 1e-15);
  const QuadratureResult tail = integrate_semi_infinite(integrand, 1.0, 1.0, rel_tol, 1e-15);
  const double mean_log_r2 = std::log(gm) + head.value + tail.value;
  return lam2(shape) / (4.0 * kPi * kPi) * (mean_log_r2 - std::log(2.0));
}

CoefficientSet full_set(const DetectorShape& shape) {
  CoefficientSet cs;
  cs.l0 = coeff_l0(shape);
  cs.lij = coeff_lij(shape);
  cs.q = 0.25 * cs.lij + 0.5 * cs.l0 * coeff_eij(shape);
  cs.d = coeff_d(shape);
  cs.lr = coeff_lr(shape);
  cs.lomega = coeff_lomega(shape);
  return cs;
}

std::vector<CoefficientSet> full_set_batch(const std::vector<DetectorShape>& shapes,
                                           Execution execution) {
  std::vector<CoefficientSet> out(shapes.size());
  const auto n = static_cast<std::int64_t>(shapes.size());
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < n; ++k) out[k] = full_set(shapes[k]);
  } else {
    for (std::int64_t k = 0; k < n; ++k) out[k] = full_set(shapes[k]);
  }
  return out;
}

namespace {

bool strictly_triaxial(const DetectorShape& s) { return s.a() < s.b() && s.b() < s.c(); }

TabulatedValue undefined(const std::string& note) { return {std::numeric_limits<double>::quiet_NaN(), false, note}; }

template <typename Fn>
TabulatedValue guarded(Fn&& fn) {
  try {
    const double v = fn();
    if (!std::isfinite(v)) return undefined("non-finite value");
    return {v, true, ""};
  } catch (const DomainError& e) {
    return undefined(e.what());
  }
}

}  // namespace

TabulatedValue tabulated_l0(const DetectorShape& shape) {
  const double a = shape.a(), b = shape.b(), c = shape.c();
  const double pre = lam2(shape) / (16.0 * std::sqrt(2.0) * kPi * kPi);
  if (a == c) return {pre * a * a, true, "sphere form"};
  return guarded([&] {
    const double det = a * a * b * b * c * c;
    const double spread = c * c - a * a;
    return pre * det / std::sqrt(spread) *
           ellip_f({std::acos(a / c), (c * c - b * b) / spread});
  });
}

TabulatedValue tabulated_lomega(const DetectorShape& shape) {
  return {lam2(shape) / (8.0 * kPi * kPi), true, "shape independent"};
}

TabulatedValue tabulated_lij_principal(const DetectorShape& shape, int axis) {
  if (!strictly_triaxial(shape)) return undefined("requires a < b < c");
  const double a = shape.a(), b = shape.b(), c = shape.c();
  const double a2 = a * a, b2 = b * b, c2 = c * c;
  const double sqrt_det = a * b * c;
  const double l2 = lam2(shape);
  const double s2pi2 = std::sqrt(2.0) * kPi * kPi;
  return guarded([&] {
    switch (axis) {
      case 0: {
        const EllipticArgs args{std::asin(b / c), (c2 - a2) / (c2 - b2)};
        return -l2 * sqrt_det * std::sqrt(c2 - b2) / (32.0 * s2pi2 * (b2 - a2)) *
               (ellip_e(args) / (a2 - c2) + ellip_f(args) / (c2 - b2) - 2.0 * b / (a * c));
      }
      case 1: {
        const EllipticArgs args{std::asin(a / c), (c2 - b2) / (c2 - a2)};
        const double f2 = l2 / (16.0 * s2pi2) * sqrt_det / std::pow(2.0 * kPi, 1.5) * a *
                          (a2 * (2.0 * b2 + c2) + c2 * (b2 - 4.0 * c2) +
                           6.0 * c2 * c * std::sqrt(c2 - b2) * std::atanh(std::sqrt(1.0 - b2 / c2))) /
                          (3.0 * b * c2 * c * (a2 - b2) * (a2 - b2));
        return l2 * sqrt_det * std::sqrt(c2 - a2) / (16.0 * s2pi2) *
                   (ellip_e(args) / ((b2 - a2) * (b2 - c2)) -
                    ellip_f(args) / ((c2 - a2) * (c2 - b2))) +
               f2;
      }
      default: {
        const EllipticArgs args{std::asin(a / c), (c2 - b2) / (c2 - a2)};
        return l2 * sqrt_det / (16.0 * s2pi2) * (-ellip_e(args) + ellip_f(args)) /
               (std::sqrt(c2 - a2) * (c2 - b2));
      }
    }
  });
}

TabulatedValue tabulated_eij_principal(const DetectorShape& shape, int axis) {
  return {std::sqrt(2.0) / shape.axes()[axis], true, "first order in length"};
}

TabulatedValue tabulated_qij_principal(const DetectorShape& shape, int axis) {
  const TabulatedValue l = tabulated_lij_principal(shape, axis);
  const TabulatedValue l0 = tabulated_l0(shape);
  if (!l.defined || !l0.defined) return undefined("depends on an undefined tabulated form");
  return {0.25 * l.value + 0.5 * l0.value * tabulated_eij_principal(shape, axis).value, true, ""};
}

TabulatedValue tabulated_lr(const DetectorShape& shape, const OracleConfig& cfg) {
  // lambda^2/(8 pi^2) sqrt(det A)/(2 pi)^{3/2} int d^3u e^{-u.A.u/2} ln(u^2) / (2 u^2).
  const Eigen::Matrix3d a = shape.precision();
  const QuadratureResult r = integrate_sphere(
      [&](const Eigen::Vector3d& n) { return 0.5 * radial_moment(n.dot(a * n), 0, true); },
      cfg.angular_tolerance, cfg.max_cells);
  const double pre = lam2(shape) / (8.0 * kPi * kPi) * shape.sqrt_det_precision() /
                     std::pow(2.0 * kPi, 1.5);
  return {pre * r.value, true, "log kernel with a 1/(2u^2) weight"};
}

bool ValidationReport::all_engine_agree() const {
  for (const auto& c : checks)
    if (!c.engine_agrees) return false;
  return true;
}

ValidationReport validate_coefficients(const DetectorShape& shape, const OracleConfig& cfg,
                                       double rel_tol) {
  const CoefficientSet cs = full_set(shape);
  ValidationReport rep{shape, {}};
  const Eigen::Matrix3d& rot = shape.rotation();

  auto add = [&](const std::string& name, double engine, double oracle, double scale,
                 TabulatedValue tab) {
    CoefficientCheck c;
    c.name = name;
    c.engine = engine;
    c.oracle = oracle;
    c.tolerance = rel_tol * std::max(std::abs(oracle), scale);
    c.engine_agrees = std::abs(engine - oracle) <= c.tolerance;
    c.tabulated_over_oracle = (tab.defined && oracle != 0.0)
                                  ? tab.value / oracle
                                  : std::numeric_limits<double>::quiet_NaN();
    c.tabulated = std::move(tab);
    rep.checks.push_back(std::move(c));
  };

  add("L0", cs.l0, b_functional(shape, KernelKind::one(), cfg), 0.0, tabulated_l0(shape));
  add("Lomega", cs.lomega, b_functional(shape, KernelKind::diff_squared(), cfg), 0.0,
      tabulated_lomega(shape));
  add("LR", cs.lr, b_functional(shape, KernelKind::diff_squared_log(), cfg), cs.lomega,
      tabulated_lr(shape, cfg));
  const double d_floor = 1e-7 * shape.coupling() / rel_tol;
  for (int i = 0; i < 3; ++i) {
    add(KernelKind::linear(i).name(), cs.d[i], b_functional(shape, KernelKind::linear(i), cfg),
        d_floor, undefined("vanishes by parity"));
  }

  Eigen::Matrix3d oracle_l, oracle_q;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      oracle_l(i, j) = oracle_l(j, i) = b_functional(shape, KernelKind::diff_quadratic(i, j), cfg);
      oracle_q(i, j) = oracle_q(j, i) = b_functional(shape, KernelKind::quadratic(i, j), cfg);
    }
  const double l_scale = cs.lij.cwiseAbs().maxCoeff();
  const double q_scale = cs.q.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      add(KernelKind::diff_quadratic(i, j).name(), cs.lij(i, j), oracle_l(i, j), l_scale,
          undefined("lab frame"));
      add(KernelKind::quadratic(i, j).name(), cs.q(i, j), oracle_q(i, j), q_scale,
          undefined("lab frame"));
    }
  // Principal-frame diagonals, where the tabulated forms live.
  const Eigen::Matrix3d pl = rot.transpose() * oracle_l * rot;
  const Eigen::Matrix3d pq = rot.transpose() * oracle_q * rot;
  const Eigen::Matrix3d el = rot.transpose() * cs.lij * rot;
  const Eigen::Matrix3d eq = rot.transpose() * cs.q * rot;
  const Eigen::Matrix3d ee = rot.transpose() * coeff_eij(shape) * rot;
  for (int i = 0; i < 3; ++i) {
    const std::string p = std::to_string(i + 1) + "'" + std::to_string(i + 1) + "'";
    add("L" + p, el(i, i), pl(i, i), 0.0, tabulated_lij_principal(shape, i));
    add("Q" + p, eq(i, i), pq(i, i), 0.0, tabulated_qij_principal(shape, i));
    // E^ij is a ratio of exact Gaussian moments; its oracle is A^{-1} itself.
    const double exact_e = 1.0 / (shape.axes()[i] * shape.axes()[i]);
    add("E" + p, ee(i, i), exact_e, 0.0, tabulated_eij_principal(shape, i));
  }
  return rep;
}

}  // namespace curvtomo
