#include "curvtomo/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "curvtomo/errors.hpp"

namespace curvtomo {

namespace {

// Bivector pairs (a < b) in canonical order.
constexpr std::array<std::pair<int, int>, 6> kPairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Upper-triangle (P <= Q) bivector entries, skipping (03, 12).
std::array<std::pair<int, int>, 20> independent_slots() {
  std::array<std::pair<int, int>, 20> slots{};
  int k = 0;
  for (int p = 0; p < 6; ++p) {
    for (int q = p; q < 6; ++q) {
      if (p == 2 && q == 3) continue;
      slots[k++] = {p, q};
    }
  }
  return slots;
}

void set_pair_entry(std::array<double, 256>& data, int p, int q, double v) {
  auto idx = [](int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; };
  const auto [a, b] = kPairs[p];
  const auto [c, d] = kPairs[q];
  for (int s = 0; s < 2; ++s) {
    const int x = s ? c : a, y = s ? d : b, z = s ? a : c, w = s ? b : d;
    data[idx(x, y, z, w)] = v;
    data[idx(y, x, z, w)] = -v;
    data[idx(x, y, w, z)] = -v;
    data[idx(y, x, w, z)] = v;
  }
}

}  // namespace

RiemannTensor RiemannTensor::from_components(const std::array<double, 256>& components) {
  RiemannTensor r;
  r.data_ = components;
  for (double v : components) {
    if (!std::isfinite(v)) throw InvalidInput("RiemannTensor: non-finite component");
  }
  const double defect = r.symmetry_defect();
  if (defect > 1e-12 * std::max(1.0, r.max_abs()))
    throw InvalidInput("RiemannTensor: symmetry violation " + std::to_string(defect));
  return r;
}

RiemannTensor RiemannTensor::from_independent(const Vector20d& params) {
  static const auto slots = independent_slots();
  RiemannTensor r;
  double r0123 = 0.0, r0213 = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto [p, q] = slots[k];
    set_pair_entry(r.data_, p, q, params[k]);
    if (p == 0 && q == 5) r0123 = params[k];
    if (p == 1 && q == 4) r0213 = params[k];
  }
  // R_{0312} = -R_{0123} - R_{0231} = -R_{0123} + R_{0213}.
  set_pair_entry(r.data_, 2, 3, -r0123 + r0213);
  return r;
}

Vector20d RiemannTensor::independent() const {
  static const auto slots = independent_slots();
  Vector20d out;
  for (int k = 0; k < 20; ++k) {
    const auto [p, q] = slots[k];
    const auto [a, b] = kPairs[p];
    const auto [c, d] = kPairs[q];
    out[k] = (*this)(a, b, c, d);
  }
  return out;
}

const std::array<std::string, 20>& RiemannTensor::independent_names() {
  static const std::array<std::string, 20> names = [] {
    std::array<std::string, 20> n;
    const auto slots = independent_slots();
    for (int k = 0; k < 20; ++k) {
      const auto [p, q] = slots[k];
      n[k] = std::to_string(kPairs[p].first) + std::to_string(kPairs[p].second) +
             std::to_string(kPairs[q].first) + std::to_string(kPairs[q].second);
    }
    return n;
  }();
  return names;
}

double RiemannTensor::symmetry_defect() const {
  double worst = 0.0;
  const auto& r = *this;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const double v = r(a, b, c, d);
          worst = std::max(worst, std::abs(v + r(b, a, c, d)));
          worst = std::max(worst, std::abs(v + r(a, b, d, c)));
          worst = std::max(worst, std::abs(v - r(c, d, a, b)));
          worst = std::max(worst, std::abs(v + r(a, c, d, b) + r(a, d, b, c)));
        }
  return worst;
}

double RiemannTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

BoostSpec BoostSpec::make(const Eigen::Vector3d& direction, double speed) {
  const double n = direction.norm();
  if (!(n > 0.0)) throw DomainError("BoostSpec: zero direction");
  if (!(std::abs(speed) < 1.0)) throw DomainError("BoostSpec: |v| must be < 1");
  return {direction / n, speed};
}

double BoostSpec::gamma() const { return 1.0 / std::sqrt(1.0 - speed * speed); }

BoostSpec inverse(const BoostSpec& b) { return {b.direction, -b.speed}; }

const Matrix4d& frame_metric() {
  static const Matrix4d eta = Eigen::Vector4d(-1.0, 1.0, 1.0, 1.0).asDiagonal();
  return eta;
}

RicciResult ricci_from_riemann(const RiemannTensor& r) {
  const double defect = r.symmetry_defect();
  if (defect > 1e-12 * std::max(1.0, r.max_abs()))
    throw InvalidInput("ricci_from_riemann: symmetry violation");
  const Matrix4d& eta = frame_metric();
  RicciResult out;
  out.ricci.setZero();
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a) s += eta(a, a) * r(a, b, a, d);
      out.ricci(b, d) = s;
    }
  for (int a = 0; a < 4; ++a) out.scalar += eta(a, a) * out.ricci(a, a);
  return out;
}

Eigen::Matrix3d ricci_spatial(const RiemannTensor& r) {
  return ricci_from_riemann(r).ricci.bottomRightCorner<3, 3>();
}

Eigen::Matrix3d tidal_block(const RiemannTensor& r) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = r(0, i + 1, 0, j + 1);
  return e;
}

Eigen::Matrix3d m_tensor(const RiemannTensor& r) {
  return (2.0 / 3.0) * tidal_block(r) - (1.0 / 3.0) * ricci_spatial(r);
}

Eigen::Matrix3d n_tensor(const Eigen::Matrix3d& ricci_spatial, double omega0) {
  return ricci_spatial / 12.0 +
         4.0 * std::numbers::pi * std::numbers::pi * omega0 * Eigen::Matrix3d::Identity();
}

FermiMetric metric_fermi_expansion(const CurvaturePoint& point, const Eigen::Vector3d& x) {
  const RiemannTensor& r = point.riemann;
  FermiMetric g;
  const double ax = point.accel.dot(x);
  const Eigen::Matrix3d tidal = tidal_block(r);
  g.g_tt = -(1.0 + 2.0 * ax + ax * ax + x.dot(tidal * x));
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) s += r(0, k + 1, i + 1, j + 1) * x[k] * x[j];
    g.g_ti[i] = -(2.0 / 3.0) * s;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += r(i + 1, k + 1, j + 1, l + 1) * x[k] * x[l];
      g.g_ij(i, j) = (i == j ? 1.0 : 0.0) - s / 3.0;
    }
  g.sqrt_minus_g = 1.0 + ax + 0.5 * x.dot(m_tensor(r) * x);
  return g;
}

namespace {

RiemannTensor maximally_symmetric(double k, bool spatial_only) {
  std::array<double, 256> data{};
  const Matrix4d& eta = frame_metric();
  auto idx = [](int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; };
  const int lo = spatial_only ? 1 : 0;
  for (int a = lo; a < 4; ++a)
    for (int b = lo; b < 4; ++b)
      for (int c = lo; c < 4; ++c)
        for (int d = lo; d < 4; ++d)
          data[idx(a, b, c, d)] = k * (eta(a, c) * eta(b, d) - eta(a, d) * eta(b, c));
  return RiemannTensor::from_components(data);
}

}  // namespace

CurvaturePoint catalog(const CatalogEntry& entry) {
  using Kind = CatalogEntry::Kind;
  CurvaturePoint p;
  switch (entry.kind) {
    case Kind::Minkowski:
      break;
    case Kind::DeSitter:
      p.riemann = maximally_symmetric(entry.h * entry.h, false);
      break;
    case Kind::ConstantSpatialCurvature:
      // Static product R x S_K: only the spatial block is curved.
      p.riemann = maximally_symmetric(entry.k, true);
      break;
    case Kind::SchwarzschildStaticFrame: {
      const double m = entry.mass, r = entry.radius;
      if (!(m >= 0.0)) throw DomainError("catalog: Schwarzschild mass must be non-negative");
      if (!(r > 2.0 * m)) throw DomainError("catalog: static frame requires r > 2M");
      // Static observer frame (tau, r, theta, phi) -> indices (0, 1, 2, 3).
      const double e = m / (r * r * r);
      Vector20d params = Vector20d::Zero();
      const auto& names = RiemannTensor::independent_names();
      auto set = [&](const std::string& key, double v) {
        const auto it = std::find(names.begin(), names.end(), key);
        params[it - names.begin()] = v;
      };
      set("0101", -2.0 * e);
      set("0202", e);
      set("0303", e);
      set("1212", -e);
      set("1313", -e);
      set("2323", 2.0 * e);
      p.riemann = RiemannTensor::from_independent(params);
      p.accel = Eigen::Vector3d(m / (r * r * std::sqrt(1.0 - 2.0 * m / r)), 0.0, 0.0);
      break;
    }
  }
  return p;
}

Matrix4d boost_matrix(const BoostSpec& b) {
  const double g = b.gamma();
  const Eigen::Vector3d& n = b.direction;
  Matrix4d lam;
  lam(0, 0) = g;
  lam.block<3, 1>(1, 0) = g * b.speed * n;
  lam.block<1, 3>(0, 1) = g * b.speed * n.transpose();
  lam.block<3, 3>(1, 1) = Eigen::Matrix3d::Identity() + (g - 1.0) * n * n.transpose();
  return lam;
}

Matrix4d boost_rank2(const Matrix4d& t, const BoostSpec& b) {
  const Matrix4d lam = boost_matrix(b);
  return lam.transpose() * t * lam;
}

RiemannTensor boost_riemann(const RiemannTensor& r, const BoostSpec& b) {
  const Matrix4d lam = boost_matrix(b);
  // Contract one index at a time: four passes of 4^5 operations.
  std::array<double, 256> cur = r.components();
  std::array<double, 256> next{};
  for (int slot = 0; slot < 4; ++slot) {
    next.fill(0.0);
    for (int i0 = 0; i0 < 4; ++i0)
      for (int i1 = 0; i1 < 4; ++i1)
        for (int i2 = 0; i2 < 4; ++i2)
          for (int i3 = 0; i3 < 4; ++i3) {
            std::array<int, 4> out = {i0, i1, i2, i3};
            double s = 0.0;
            for (int e = 0; e < 4; ++e) {
              std::array<int, 4> in = out;
              in[slot] = e;
              s += lam(e, out[slot]) * cur[((in[0] * 4 + in[1]) * 4 + in[2]) * 4 + in[3]];
            }
            next[((i0 * 4 + i1) * 4 + i2) * 4 + i3] = s;
          }
    cur = next;
  }
  // Rounding can leave tiny symmetry defects; rebuild from the independent set.
  RiemannTensor out = RiemannTensor::from_components(cur);
  return RiemannTensor::from_independent(out.independent());
}

}  // namespace curvtomo
