#include "curvtomo/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "curvtomo/errors.hpp"
#include "curvtomo/quadrature.hpp"
#include "curvtomo/rng.hpp"
#include "curvtomo/special_functions.hpp"

namespace curvtomo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kPairsPerBatch = 8192;

void check_index(int i) {
  if (i < 0 || i > 2) throw DomainError("KernelKind: spatial index outside {0,1,2}");
}

}  // namespace

double KernelKind::evaluate(const Eigen::Vector3d& x, const Eigen::Vector3d& xp) const {
  const Eigen::Vector3d d = x - xp;
  switch (tag) {
    case Tag::One:
      return 1.0;
    case Tag::Linear:
      return x[i];
    case Tag::Quadratic:
      return x[i] * x[j];
    case Tag::DiffQuadratic:
      return d[i] * d[j];
    case Tag::DiffSquaredLog: {
      const double r2 = d.squaredNorm();
      return r2 * std::log(0.5 * r2);
    }
    case Tag::DiffSquared:
      return d.squaredNorm();
  }
  return 0.0;
}

std::string KernelKind::name() const {
  const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
  switch (tag) {
    case Tag::One: return "L0";
    case Tag::Linear: return "D" + std::to_string(i + 1);
    case Tag::Quadratic: return "Q" + ij;
    case Tag::DiffQuadratic: return "L" + ij;
    case Tag::DiffSquaredLog: return "LR";
    case Tag::DiffSquared: return "Lomega";
  }
  return "?";
}

void OracleConfig::validate() const {
  if (!(angular_tolerance > 0.0)) throw DomainError("OracleConfig: angular_tolerance must be > 0");
  if (mc_samples < 10'000) throw DomainError("OracleConfig: mc_samples must be >= 1e4");
}

double radial_moment(double q, int power, bool with_log) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("radial_moment: q must be positive");
  if (power < 0) throw DomainError("radial_moment: power must be non-negative");
  // Substituting t = q r^2 / 2 gives (1/2) (2/q)^s Gamma(s) with s = (power+1)/2;
  // the log factor becomes ln(2t/q), whose Gamma-weighted mean is psi(s) + ln(2/q).
  const double s = 0.5 * (power + 1);
  const double base = 0.5 * std::pow(2.0 / q, s) * std::tgamma(s);
  if (!with_log) return base;
  return base * (digamma(s) + std::log(2.0 / q));
}

double b_functional(const DetectorShape& shape, const KernelKind& kernel,
                    const OracleConfig& cfg) {
  cfg.validate();
  check_index(kernel.i);
  check_index(kernel.j);
  const Eigen::Matrix3d precision = shape.precision();
  // d = x - x' is N(0, 2 A^{-1}); the mean s = (x + x')/2 is N(0, (2A)^{-1}).
  const Eigen::Matrix3d half_precision = 0.5 * precision;
  const Eigen::Matrix3d mean_cov = 0.5 * shape.covariance();
  const double sqrt_det = shape.sqrt_det_precision();
  const double d_norm = sqrt_det / std::sqrt(8.0) / std::pow(2.0 * kPi, 1.5);
  const double lam = shape.coupling();
  const double prefactor = lam * lam / (4.0 * kPi * kPi) * d_norm;

  const int i = kernel.i, j = kernel.j;
  SphereFn integrand;
  using Tag = KernelKind::Tag;
  switch (kernel.tag) {
    case Tag::One:
      integrand = [&](const Eigen::Vector3d& n) {
        return radial_moment(n.dot(half_precision * n), 0, false);
      };
      break;
    case Tag::Linear:
      // x = s + d/2 and E[s] = 0.
      integrand = [&](const Eigen::Vector3d& n) {
        return 0.5 * n[i] * radial_moment(n.dot(half_precision * n), 1, false);
      };
      break;
    case Tag::Quadratic:
      integrand = [&](const Eigen::Vector3d& n) {
        const double q = n.dot(half_precision * n);
        return mean_cov(i, j) * radial_moment(q, 0, false) +
               0.25 * n[i] * n[j] * radial_moment(q, 2, false);
      };
      break;
    case Tag::DiffQuadratic:
      integrand = [&](const Eigen::Vector3d& n) {
        return n[i] * n[j] * radial_moment(n.dot(half_precision * n), 2, false);
      };
      break;
    case Tag::DiffSquaredLog:
      integrand = [&](const Eigen::Vector3d& n) {
        const double q = n.dot(half_precision * n);
        return radial_moment(q, 2, true) - std::log(2.0) * radial_moment(q, 2, false);
      };
      break;
    case Tag::DiffSquared:
      integrand = [&](const Eigen::Vector3d& n) {
        return radial_moment(n.dot(half_precision * n), 2, false);
      };
      break;
  }
  try {
    const QuadratureResult r = integrate_sphere(integrand, cfg.angular_tolerance, cfg.max_cells);
    return prefactor * r.value;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("b_functional(" + kernel.name() + "): " + e.what(),
                           prefactor * e.estimate(), prefactor * e.error_bound());
  }
}

namespace {

struct BatchStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
};

BatchStats combine(const BatchStats& a, const BatchStats& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  BatchStats out;
  out.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  out.mean = a.mean + delta * static_cast<double>(b.count) / static_cast<double>(out.count);
  out.m2 = a.m2 + b.m2 +
           delta * delta * static_cast<double>(a.count) * static_cast<double>(b.count) /
               static_cast<double>(out.count);
  return out;
}

// One batch of antithetic pairs (s, d), (-s, -d) with s drawn from its exact
// Gaussian marginal and d from an isotropic density p(r) / (4 pi r^2) with a
// half-normal radius wider than the widest axis, so every weight is bounded.
class McSampler {
 public:
  McSampler(const DetectorShape& shape, const KernelKind& kernel)
      : shape_(shape), kernel_(kernel) {
    const Eigen::Matrix3d mean_cov = 0.5 * shape.covariance();
    mean_chol_ = mean_cov.llt().matrixL();
    mean_prec_ = mean_cov.inverse();
    mean_norm_ = 1.0 / (std::pow(2.0 * kPi, 1.5) * std::sqrt(mean_cov.determinant()));
    // Widest standard deviation of d is sqrt(2) / a.
    radius_scale_ = 1.5 * std::sqrt(2.0) / shape.a();
    const double lam = shape.coupling();
    lam2_ = lam * lam;
  }

  BatchStats run(std::uint64_t key, std::uint64_t pairs) const {
    auto engine = make_engine(key);
    std::normal_distribution<double> normal(0.0, 1.0);
    BatchStats st;
    for (std::uint64_t k = 0; k < pairs; ++k) {
      const Eigen::Vector3d z(normal(engine), normal(engine), normal(engine));
      const Eigen::Vector3d s = mean_chol_ * z;
      Eigen::Vector3d dir(normal(engine), normal(engine), normal(engine));
      dir.normalize();
      const double r = radius_scale_ * std::abs(normal(engine));
      const Eigen::Vector3d d = r * dir;
      const double v = 0.5 * (weighted(s, d, r) + weighted(-s, -d, r));
      ++st.count;
      const double delta = v - st.mean;
      st.mean += delta / static_cast<double>(st.count);
      st.m2 += delta * (v - st.mean);
    }
    return st;
  }

 private:
  double weighted(const Eigen::Vector3d& s, const Eigen::Vector3d& d, double r) const {
    const Eigen::Vector3d x = s + 0.5 * d;
    const Eigen::Vector3d xp = s - 0.5 * d;
    const double ff = shape_.density(x) * shape_.density(xp);
    const double p_mean = mean_norm_ * std::exp(-0.5 * s.dot(mean_prec_ * s));
    const double p_radius = std::sqrt(2.0 / kPi) / radius_scale_ *
                            std::exp(-0.5 * r * r / (radius_scale_ * radius_scale_));
    const double p_diff = p_radius / (4.0 * kPi * r * r);
    const double r2 = d.squaredNorm();
    const double w0 = 1.0 / (4.0 * kPi * kPi * r2);
    return lam2_ * w0 * kernel_.evaluate(x, xp) * ff / (p_mean * p_diff);
  }

  const DetectorShape& shape_;
  const KernelKind& kernel_;
  Eigen::Matrix3d mean_chol_;
  Eigen::Matrix3d mean_prec_;
  double mean_norm_ = 0.0;
  double radius_scale_ = 0.0;
  double lam2_ = 0.0;
};

}  // namespace

McEstimate b_functional_mc(const DetectorShape& shape, const KernelKind& kernel,
                           const OracleConfig& cfg, Execution execution) {
  cfg.validate();
  check_index(kernel.i);
  check_index(kernel.j);
  const std::uint64_t total_pairs = std::max<std::uint64_t>(1, cfg.mc_samples / 2);
  const std::uint64_t batches = (total_pairs + kPairsPerBatch - 1) / kPairsPerBatch;
  const std::uint64_t base_key =
      stream_key({cfg.seed, static_cast<std::uint64_t>(kernel.tag),
                  static_cast<std::uint64_t>(kernel.i), static_cast<std::uint64_t>(kernel.j),
                  shape.hash()});
  const McSampler sampler(shape, kernel);
  std::vector<BatchStats> stats(batches);
  auto run_batch = [&](std::uint64_t b) {
    const std::uint64_t pairs =
        std::min(kPairsPerBatch, total_pairs - b * kPairsPerBatch);
    stats[b] = sampler.run(stream_key({base_key, b}), pairs);
  };
  if (execution == Execution::Parallel) {
    const auto n = static_cast<std::int64_t>(batches);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < n; ++b) run_batch(static_cast<std::uint64_t>(b));
  } else {
    for (std::uint64_t b = 0; b < batches; ++b) run_batch(b);
  }
  BatchStats total;
  for (const auto& s : stats) total = combine(total, s);
  McEstimate out;
  out.estimate = total.mean;
  out.std_error = total.count > 1
                      ? std::sqrt(total.m2 / static_cast<double>(total.count - 1) /
                                  static_cast<double>(total.count))
                      : 0.0;
  return out;
}

}  // namespace curvtomo
