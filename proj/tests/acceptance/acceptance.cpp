// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.
// With no argument every criterion runs; with an argument N only criterion N.
// Exits nonzero if any selected criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "curvtomo/coefficients.hpp"
#include "curvtomo/forward_model.hpp"
#include "curvtomo/geometry.hpp"
#include "curvtomo/measurement_sim.hpp"
#include "curvtomo/oracle.hpp"
#include "curvtomo/special_functions.hpp"
#include "curvtomo/tomography.hpp"
#include "reference.hpp"
#include "shapes.hpp"

using namespace curvtomo;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RiemannTensor random_riemann(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Vector20d v;
  for (int k = 0; k < 20; ++k) v[k] = g(rng);
  return RiemannTensor::from_independent(v);
}

const ExperimentDesign& canonical() {
  static const ExperimentDesign d = design_experiment(canonical_pool(), 13);
  return d;
}

RecoveryResult noiseless(const ExperimentDesign& d, const CurvaturePoint& truth) {
  std::vector<Measurement> m;
  std::vector<double> p0s;
  for (const auto& b : forward_design(d, truth)) {
    m.push_back({b.p, 1.0});
    p0s.push_back(b.p0);
  }
  return solve(d, m, p0s);
}

// Unit sphere, lambda = 1: engine vs oracle at 1e-6; tabulated constants
// either agree at 1e-6 or differ by a constant factor recorded in the
// validation report (the oracle value is what flows downstream).
Outcome criterion1() {
  const double tol = 1e-6;
  const auto sphere = DetectorShape::sphere(1.0);
  const double stated_l0 = 1.0 / (16.0 * std::sqrt(2.0) * kPi * kPi);
  const double stated_lw = 1.0 / (8.0 * kPi * kPi);
  const double l0_oracle = b_functional(sphere, KernelKind::one());
  const double lw_oracle = b_functional(sphere, KernelKind::diff_squared());
  bool ok = rel(coeff_l0(sphere), l0_oracle) < tol && rel(coeff_lomega(sphere), lw_oracle) < tol &&
            rel(full_set(sphere).l0, l0_oracle) < tol;

  // the tabulated forms are the stated constants
  ok = ok && rel(tabulated_l0(sphere).value, stated_l0) < 1e-12 &&
       rel(tabulated_lomega(sphere).value, stated_lw) < 1e-12;

  const double r_l0 = stated_l0 / l0_oracle, r_lw = stated_lw / lw_oracle;
  const bool direct = std::abs(r_l0 - 1) < tol && std::abs(r_lw - 1) < tol;

  // a mismatch is admissible only as a constant factor that the emitted
  // report documents: same ratio for other sizes and couplings, and the
  // report's engine-vs-oracle verdict is clean
  bool documented = true;
  for (const auto& s : {sphere, DetectorShape::sphere(0.5, 1.7), DetectorShape::sphere(3.0, 0.4)}) {
    const auto report = validate_coefficients(s);
    documented = documented && report.all_engine_agree();
    for (const auto& c : report.checks) {
      if (c.name == "L0")
        documented = documented && c.tabulated.defined && std::abs(c.tabulated_over_oracle - r_l0) < 1e-9;
      if (c.name == "Lomega")
        documented = documented && c.tabulated.defined && std::abs(c.tabulated_over_oracle - r_lw) < 1e-9;
    }
  }
  const bool pass = ok && (direct || documented);
  return {pass, fmt("engine L0=%.16g Lw=%.16g vs oracle (rel %.1e, %.1e); stated L0=%.6g Lw=%.6g; "
                    "stated/oracle = %.9f (1/(2 sqrt 2) = %.9f), %.9f; %s",
                    coeff_l0(sphere), coeff_lomega(sphere), rel(coeff_l0(sphere), l0_oracle),
                    rel(coeff_lomega(sphere), lw_oracle), stated_l0, stated_lw, r_l0,
                    1 / (2 * std::sqrt(2.0)), r_lw,
                    direct ? "stated constants agree"
                           : (documented ? "constant-factor mismatch documented in validation report"
                                         : "mismatch not documented"))};
}

Outcome criterion2() {
  double worst = 0.0;
  OracleConfig cfg;
  cfg.mc_samples = 1'000'000;
  for (const auto& s : testing_shapes::random_shapes(10, 2024, 0.5, 2.0, 1.3)) {
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, std::abs(b_functional(s, KernelKind::linear(i), cfg)) / s.coupling());
      worst = std::max(worst, std::abs(b_functional_mc(s, KernelKind::linear(i), cfg).estimate) /
                                  s.coupling());
      worst = std::max(worst, std::abs(coeff_d(s)[i]) / s.coupling());
    }
  }
  return {worst < 1e-8, fmt("max |D^i| / lambda = %.2e over 10 shapes, quadrature and Monte Carlo", worst)};
}

Outcome criterion3() {
  OracleConfig cfg;
  cfg.mc_samples = 1'000'000;
  std::vector<KernelKind> kernels = {KernelKind::one(), KernelKind::diff_squared_log(),
                                     KernelKind::diff_squared()};
  for (int i = 0; i < 3; ++i) {
    kernels.push_back(KernelKind::linear(i));
    for (int j = i; j < 3; ++j) {
      kernels.push_back(KernelKind::quadratic(i, j));
      kernels.push_back(KernelKind::diff_quadratic(i, j));
    }
  }
  double worst_z = 0.0;
  int comparisons = 0;
  bool ok = true;
  for (const auto& s : testing_shapes::random_shapes(10, 77)) {
    for (const auto& k : kernels) {
      const auto mc = b_functional_mc(s, k, cfg);
      const double q = b_functional(s, k, cfg);
      const double diff = std::abs(mc.estimate - q);
      ++comparisons;
      if (mc.std_error > 0.0)
        worst_z = std::max(worst_z, diff / mc.std_error);
      else if (diff > 1e-15)
        ok = false;
    }
  }
  ok = ok && worst_z < 4.0;
  return {ok, fmt("%d kernel components on 10 shapes at 1e6 samples, max |z| = %.2f", comparisons, worst_z)};
}

Outcome criterion4() {
  const double tol = 1e-9;
  OracleConfig cfg;
  cfg.angular_tolerance = 1e-11;
  auto tensor = [&](const DetectorShape& s, bool diff) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        m(i, j) = m(j, i) = b_functional(
            s, diff ? KernelKind::diff_quadratic(i, j) : KernelKind::quadratic(i, j), cfg);
    return m;
  };
  double w_l0 = 0, w_lw = 0, w_q = 0, w_l = 0, w_lr = 0, factor_dev = 0;
  for (const auto& base : testing_shapes::random_shapes(3, 314, 0.5, 2.0, 1.2)) {
    const double l0 = b_functional(base, KernelKind::one(), cfg);
    const double lw = b_functional(base, KernelKind::diff_squared(), cfg);
    const double lr = b_functional(base, KernelKind::diff_squared_log(), cfg);
    const Eigen::Matrix3d q = tensor(base, false), l = tensor(base, true);
    // L_omega is the same for every shape at fixed coupling
    w_lw = std::max(w_lw, rel(lw, base.coupling() * base.coupling() / (4 * kPi * kPi)));
    // normalization of the logarithmic shift, measured between s = 1 and s = e
    const double lr_e = b_functional(base.dilated(std::exp(1.0)), KernelKind::diff_squared_log(), cfg);
    const double factor = (lr_e - lr) / (2.0 * lw);
    factor_dev = std::max(factor_dev, std::abs(factor - 1.0));
    for (double s : {1.0, 2.0, 4.0}) {
      const auto d = base.dilated(s);
      w_l0 = std::max(w_l0, rel(b_functional(d, KernelKind::one(), cfg), l0 / (s * s)));
      w_lw = std::max(w_lw, rel(b_functional(d, KernelKind::diff_squared(), cfg), lw));
      w_lr = std::max(w_lr, rel(b_functional(d, KernelKind::diff_squared_log(), cfg),
                                lr + factor * std::log(s * s) * lw));
      w_q = std::max(w_q, (tensor(d, false) - q).norm() / q.norm());
      w_l = std::max(w_l, (tensor(d, true) - l).norm() / l.norm());
    }
  }
  const bool ok = std::max({w_l0, w_lw, w_lr, w_q, w_l}) < tol && factor_dev < tol;
  return {ok, fmt("s in {1,2,4}: L0 s^2 %.1e, Lw %.1e, Q %.1e, L %.1e, LR shift %.1e; "
                  "measured shift factor deviation %.1e",
                  w_l0, w_lw, w_q, w_l, w_lr, factor_dev)};
}

Outcome criterion5() {
  const double tol = 1e-8;
  const auto ds = catalog({CatalogEntry::Kind::DeSitter, 1e-3});
  const auto sw = catalog({CatalogEntry::Kind::SchwarzschildStaticFrame, 0, 0, 1.0, 10.0});
  auto err = [](const CurvaturePoint& p) {
    const auto r = noiseless(canonical(), p);
    return (r.derived - derived_of(p)).norm() / derived_of(p).norm();
  };
  const double e_ds = err(ds), e_sw = err(sw);
  return {canonical().probes.size() == 13 && e_ds < tol && e_sw < tol,
          fmt("13 probes, cond %.1f; relative error de Sitter %.1e, Schwarzschild %.1e",
              canonical().condition_number, e_ds, e_sw)};
}

Outcome criterion6() {
  CurvaturePoint truth;
  // small enough that every frame stays in the linear, unclamped regime
  truth.riemann = random_riemann(606, 1e-4);
  std::vector<BoostSpec> boosts = {BoostSpec{}};
  for (const Eigen::Vector3d& n :
       {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0), Eigen::Vector3d(0, 1, 0),
        Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0, 0, -1),
        Eigen::Vector3d(1, 1, 0), Eigen::Vector3d(1, 0, 1), Eigen::Vector3d(0, 1, 1)})
    boosts.push_back(BoostSpec::make(n, 0.1));
  std::vector<FrameMeasurement> frames;
  int clamped = 0;
  for (const auto& b : boosts) {
    const auto d = canonical().in_frame(b);
    for (const auto& x : forward_design(d, truth)) clamped += x.clamped;
    frames.push_back({b, noiseless(d, truth)});
  }
  const auto r = multi_frame_recovery(frames);
  const Vector20d want = truth.riemann.independent();
  const double err = (r.riemann.independent() - want).cwiseAbs().maxCoeff() / want.cwiseAbs().maxCoeff();

  // R_tautau = gamma^2 (R'_tautau - 2 v R'_tau n + v^2 R'_nn) on the recovered tensor
  double rel_worst = 0.0;
  const Matrix4d ric = ricci_from_riemann(r.riemann).ricci;
  for (std::size_t f = 1; f < boosts.size(); ++f) {
    const auto& b = boosts[f];
    const Eigen::Vector3d n = b.direction.normalized();
    const Matrix4d rp = ricci_from_riemann(boost_riemann(r.riemann, b)).ricci;
    const Eigen::Vector4d axis(0.0, n[0], n[1], n[2]);
    const double v = b.speed, g = b.gamma();
    const double rhs = g * g * (rp(0, 0) - 2 * v * rp.row(0).dot(axis) + v * v * axis.dot(rp * axis));
    rel_worst = std::max(rel_worst, std::abs(ric(0, 0) - rhs) / ric.norm());
  }
  return {clamped == 0 && r.rank == 20 && err < 1e-6 && rel_worst < 1e-12,
          fmt("%d clamped probes; rank %d, cond %.1f; max component error / max component %.1e; "
              "R_tautau boost relation residual %.1e",
              clamped, r.rank, r.condition_number, err, rel_worst)};
}

Outcome criterion7() {
  // Scale a generic curvature point so the largest correction is 1e-3 of p0.
  CurvaturePoint truth;
  truth.riemann = random_riemann(707, 1.0);
  truth.omega0 = 0.3;
  double worst = 0.0;
  for (const auto& b : forward_design(canonical(), truth)) worst = std::max(worst, std::abs(b.p - b.p0) / b.p0);
  const double scale = 1e-3 / worst;
  truth.riemann = RiemannTensor::from_independent(truth.riemann.independent() * scale);
  truth.omega0 *= scale;
  const Vector13d theta = parameters_of(truth);

  int good = 0;
  double max_z = 0.0;
  for (std::uint64_t c = 0; c < 100; ++c) {
    const auto r = run_campaign({canonical(), truth, 1'000'000, 7000 + c}).recovery;
    double z = 0.0;
    for (int k = 0; k < kUnknowns; ++k)
      z = std::max(z, std::abs(r.parameters[k] - theta[k]) / std::sqrt(r.covariance(k, k)));
    max_z = std::max(max_z, z);
    good += z < 5.0;
  }

  std::vector<double> ln_n, ln_e;
  for (double n : {1e4, 1e6, 1e8}) {
    double sq = 0.0;
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto r = run_campaign({canonical(), truth, std::uint64_t(n), 9000 + s}).recovery;
      sq += (r.parameters - theta).squaredNorm();
    }
    ln_n.push_back(std::log(n));
    ln_e.push_back(0.5 * std::log(sq / 30));
  }
  double ss_xy = 0, ss_xx = 0;
  const double mx = (ln_n[0] + ln_n[1] + ln_n[2]) / 3, my = (ln_e[0] + ln_e[1] + ln_e[2]) / 3;
  for (int k = 0; k < 3; ++k) {
    ss_xy += (ln_n[k] - mx) * (ln_e[k] - my);
    ss_xx += (ln_n[k] - mx) * (ln_n[k] - mx);
  }
  const double fit = ss_xy / ss_xx;
  return {good >= 95 && std::abs(fit + 0.5) <= 0.1,
          fmt("corrections 1e-3 of p0: %d/100 campaigns with all |z| < 5 (max %.2f); "
              "error scaling exponent %.3f",
              good, max_z, fit)};
}

Outcome criterion8() {
  double worst_abs = 0.0, worst_rel = 0.0;
  for (int k = 0; k <= 500; ++k) {
    const double l = 0.01 * k;
    const double got = quasifree_series_check(l, 80), want = std::exp(-2 * l);
    worst_abs = std::max(worst_abs, std::abs(got - want));
    worst_rel = std::max(worst_rel, std::abs(got - want) / want);
  }
  return {worst_abs < 1e-10,
          fmt("L in [0,5] step 0.01, 80 terms: max |series - exp(-2L)| = %.1e (relative %.1e)",
              worst_abs, worst_rel)};
}

Outcome criterion9() {
  double worst = 0.0;
  for (int p = 1; p <= 15; ++p)
    for (int k = 0; k <= 9; ++k) {
      const double phi = 0.1 * p, m = 0.1 * k;
      auto f = [=](double t) { return 1.0 / std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); };
      auto e = [=](double t) { return std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); };
      worst = std::max(worst, rel(ellip_f({phi, m}), reference::tanh_sinh(f, 0.0, phi)));
      worst = std::max(worst, rel(ellip_e({phi, m}), reference::tanh_sinh(e, 0.0, phi)));
    }
  // pointlike limit: shrinking the unit sphere drives p0 up towards 1/2
  bool monotone = true;
  double prev = 0.0, last = 0.0;
  for (int k = 0; k <= 5; ++k) {
    const double p0 = p0_of(coeff_l0(DetectorShape::sphere(1.0).dilated(std::pow(0.5, k))));
    monotone = monotone && p0 > prev && p0 < 0.5;
    prev = last = p0;
  }
  return {worst < 1e-11 && monotone && 0.5 - last < 1e-9,
          fmt("F, E on phi in {0.1..1.5} x m in {0..0.9}: max rel error %.1e; p0 strictly increasing "
              "to 1/2 - %.1e at 1/32 scale",
              worst, 0.5 - last)};
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  const std::vector<Criterion> criteria = {
      {1, "closed-form/oracle agreement (unit sphere)", 60, criterion1},
      {2, "parity of the dipole coefficient", 60, criterion2},
      {3, "oracle self-consistency (quadrature vs Monte Carlo)", 300, criterion3},
      {4, "dilation scaling laws", 120, criterion4},
      {5, "noiseless 13-probe tomography round trip", 60, criterion5},
      {6, "full-Riemann boost recovery", 60, criterion6},
      {7, "statistical recovery", 600, criterion7},
      {8, "quasifree series identity", 1, criterion8},
      {9, "special functions and pointlike limit", 60, criterion9},
  };
  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < c.time_limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %d: %s  %s | %s | %.2f s (limit %.0f s)%s\n", c.id, pass ? "PASS" : "FAIL",
                c.title.c_str(), o.detail.c_str(), dt, c.time_limit_s, in_time ? "" : " TIME EXCEEDED");
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
