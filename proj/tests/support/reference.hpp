#pragma once

// Reference integrators for the test suite. Deliberately unrelated to the
// library's Gauss-Kronrod machinery: double-exponential (tanh-sinh) rules
// with step halving, plus a Gauss-Legendre rule from Newton iteration.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace reference {

// Integral of f over [a, b] by tanh-sinh with step halving until two
// successive levels agree to rel_tol.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-14, int max_level = 12) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const double pi2 = 0.5 * std::numbers::pi;
  const double t_max = 3.2;
  auto node = [&](double t, double& x, double& w, double& dist) {
    const double s = pi2 * std::sinh(t);
    const double ch = std::cosh(s);
    const double u = std::tanh(s);
    w = pi2 * std::cosh(t) / (ch * ch);
    x = mid + half * u;
    // distance to the nearer endpoint, computed without cancellation
    dist = half / (std::exp(std::abs(s)) * ch);
  };
  auto eval = [&](double t) {
    double x, w, dist;
    node(t, x, w, dist);
    if (!(dist > 0.0)) return 0.0;
    const double v = f(x);
    return std::isfinite(v) ? w * v : 0.0;
  };
  double h = 1.0;
  double sum = eval(0.0);
  for (double t = h; t <= t_max; t += h) sum += eval(t) + eval(-t);
  double prev = sum * h * half;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += eval(t) + eval(-t);
    const double cur = sum * h * half;
    if (level > 3 && std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

// Integral of f over [0, inf) by the exp-sinh rule x = exp(pi/2 sinh t);
// suited to integrands with algebraic decay.
inline double exp_sinh(const std::function<double(double)>& f, double rel_tol = 1e-14,
                       int max_level = 12) {
  const double pi2 = 0.5 * std::numbers::pi;
  const double t_lo = -6.0, t_hi = 5.0;
  auto eval = [&](double t) {
    const double x = std::exp(pi2 * std::sinh(t));
    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
    const double v = f(x) * x * pi2 * std::cosh(t);
    return std::isfinite(v) ? v : 0.0;
  };
  double h = 0.5;
  double sum = 0.0;
  for (double t = t_lo; t <= t_hi; t += h) sum += eval(t);
  double prev = sum * h;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double t = t_lo + h; t <= t_hi; t += 2.0 * h) sum += eval(t);
    const double cur = sum * h;
    if (level > 3 && std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

struct Rule {
  std::vector<double> x, w;
};

// n-point Gauss-Legendre rule on [-1, 1].
inline Rule gauss_legendre(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace reference
