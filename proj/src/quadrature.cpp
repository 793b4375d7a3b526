#include "curvtomo/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "curvtomo/errors.hpp"

namespace curvtomo {

namespace {

// QUADPACK qk15 abscissae (positive half, descending) and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule15 {
  std::array<double, 15> x{};
  std::array<double, 15> wk{};
  std::array<double, 15> wg{};  // zero at Kronrod-only nodes
};

Rule15 make_rule() {
  Rule15 r;
  for (int k = 0; k < 7; ++k) {
    r.x[k] = -kXgk[k];
    r.x[14 - k] = kXgk[k];
    r.wk[k] = r.wk[14 - k] = kWgk[k];
    r.wg[k] = r.wg[14 - k] = (k % 2 == 1) ? kWg[k / 2] : 0.0;
  }
  r.x[7] = 0.0;
  r.wk[7] = kWgk[7];
  r.wg[7] = kWg[3];
  return r;
}

const Rule15& rule() {
  static const Rule15 r = make_rule();
  return r;
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const ScalarFn& f, double a, double b) {
  const auto& r = rule();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * r.x[i]);
    k += r.wk[i] * fx;
    g += r.wg[i] * fx;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadratureResult integrate_adaptive(const ScalarFn& f, double a, double b, double rel_tol,
                                    double abs_tol, int max_intervals) {
  std::priority_queue<Interval> heap;
  Interval first = gk15(f, a, b);
  double value = first.value, error = first.error;
  int evals = 15;
  heap.push(first);
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (static_cast<int>(heap.size()) >= max_intervals)
      throw ConvergenceError("integrate_adaptive: interval budget exhausted", value, error);
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Interval left = gk15(f, worst.a, mid);
    Interval right = gk15(f, mid, worst.b);
    evals += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, evals};
}

QuadratureResult integrate_semi_infinite(const ScalarFn& f, double a, double scale,
                                         double rel_tol, double abs_tol, int max_intervals) {
  auto mapped = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u;
    return f(a + scale * u / w) * scale / (w * w);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, rel_tol, abs_tol, max_intervals);
}

namespace {

struct Cell {
  double t0, t1, p0, p1;
  double value, abs_value, error;
  int split_dim;  // 0 = theta, 1 = phi
  bool operator<(const Cell& o) const { return error < o.error; }
};

Cell sphere_cell(const SphereFn& g, double t0, double t1, double p0, double p1) {
  const auto& r = rule();
  const double tc = 0.5 * (t0 + t1), th = 0.5 * (t1 - t0);
  const double pc = 0.5 * (p0 + p1), ph = 0.5 * (p1 - p0);
  std::array<double, 15> cos_p{}, sin_p{};
  for (int j = 0; j < 15; ++j) {
    const double p = pc + ph * r.x[j];
    cos_p[j] = std::cos(p);
    sin_p[j] = std::sin(p);
  }
  double kk = 0.0, gk = 0.0, kg = 0.0, gg = 0.0, kabs = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double t = tc + th * r.x[i];
    const double st = std::sin(t), ct = std::cos(t);
    double row_k = 0.0, row_g = 0.0, row_abs = 0.0;
    for (int j = 0; j < 15; ++j) {
      const Eigen::Vector3d n(st * cos_p[j], st * sin_p[j], ct);
      const double v = g(n) * st;
      row_k += r.wk[j] * v;
      row_g += r.wg[j] * v;
      row_abs += r.wk[j] * std::abs(v);
    }
    kk += r.wk[i] * row_k;
    kg += r.wk[i] * row_g;
    gk += r.wg[i] * row_k;
    gg += r.wg[i] * row_g;
    kabs += r.wk[i] * row_abs;
  }
  const double jac = th * ph;
  const double err_theta = std::abs(kk - gk) * jac;
  const double err_phi = std::abs(kk - kg) * jac;
  const double err = std::abs(kk - gg) * jac;
  return {t0, t1, p0, p1, kk * jac, kabs * jac, err, err_theta >= err_phi ? 0 : 1};
}

}  // namespace

QuadratureResult integrate_sphere(const SphereFn& g, double rel_tol, int max_cells) {
  constexpr double pi = std::numbers::pi;
  std::priority_queue<Cell> heap;
  double value = 0.0, abs_value = 0.0, error = 0.0;
  int evals = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) {
      Cell c = sphere_cell(g, i * pi / 2, (i + 1) * pi / 2, j * pi / 2, (j + 1) * pi / 2);
      value += c.value;
      abs_value += c.abs_value;
      error += c.error;
      evals += 225;
      heap.push(c);
    }
  }
  while (error > rel_tol * std::max(std::abs(value), abs_value)) {
    if (static_cast<int>(heap.size()) >= max_cells)
      throw ConvergenceError("integrate_sphere: cell budget exhausted", value, error);
    Cell worst = heap.top();
    heap.pop();
    Cell a, b;
    if (worst.split_dim == 0) {
      const double mid = 0.5 * (worst.t0 + worst.t1);
      a = sphere_cell(g, worst.t0, mid, worst.p0, worst.p1);
      b = sphere_cell(g, mid, worst.t1, worst.p0, worst.p1);
    } else {
      const double mid = 0.5 * (worst.p0 + worst.p1);
      a = sphere_cell(g, worst.t0, worst.t1, worst.p0, mid);
      b = sphere_cell(g, worst.t0, worst.t1, mid, worst.p1);
    }
    evals += 450;
    value += a.value + b.value - worst.value;
    abs_value += a.abs_value + b.abs_value - worst.abs_value;
    error += a.error + b.error - worst.error;
    heap.push(a);
    heap.push(b);
  }
  // Deterministic final reduction in heap order.
  std::vector<Cell> cells;
  cells.reserve(heap.size());
  while (!heap.empty()) {
    cells.push_back(heap.top());
    heap.pop();
  }
  value = 0.0;
  error = 0.0;
  for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
    value += it->value;
    error += it->error;
  }
  return {value, error, evals};
}

}  // namespace curvtomo
