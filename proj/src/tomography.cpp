#include "curvtomo/tomography.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include "curvtomo/errors.hpp"

namespace curvtomo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRankTol = 1e-9;

constexpr int kPairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};

void put_symmetric(Eigen::Ref<Eigen::VectorXd> out, const Eigen::Matrix3d& m, double off_scale) {
  for (int k = 0; k < 6; ++k) {
    const double w = k < 3 ? 1.0 : off_scale;
    out[k] = w * m(kPairs[k][0], kPairs[k][1]);
  }
}

Eigen::Matrix3d get_symmetric(const Eigen::VectorXd& v, int offset) {
  Eigen::Matrix3d m;
  for (int k = 0; k < 6; ++k) {
    const int i = kPairs[k][0], j = kPairs[k][1];
    m(i, j) = m(j, i) = v[offset + k];
  }
  return m;
}

// Ratio of the largest to the smallest relevant singular value; infinite
// when the rows do not reach full rank min(rows, 13).
double condition_of(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& s = svd.singularValues();
  const Eigen::Index k = std::min<Eigen::Index>(rows.rows(), kUnknowns);
  const double lo = s[k - 1];
  if (!(s[0] > 0.0) || lo <= kRankTol * s[0]) return std::numeric_limits<double>::infinity();
  return s[0] / lo;
}

template <typename Names>
std::string describe_direction(const Eigen::VectorXd& v, const Names& names) {
  std::ostringstream os;
  os.precision(4);
  bool first = true;
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) < 1e-3 * scale) continue;
    os << (first ? "" : " ") << (v[k] < 0 ? "-" : "+") << std::abs(v[k]) << "*" << names[k];
    first = false;
  }
  return os.str();
}

Eigen::Matrix3d rotation_taking_z_to(const Eigen::Vector3d& u) {
  return Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), u.normalized())
      .toRotationMatrix();
}

}  // namespace

const std::array<std::string, kUnknowns>& parameter_names() {
  static const std::array<std::string, kUnknowns> names = {
      "M11", "M22", "M33", "M12", "M13", "M23", "N11", "N22", "N33", "N12", "N13", "N23", "R"};
  return names;
}

const std::array<std::string, kDerived>& derived_names() {
  static const std::array<std::string, kDerived> names = {
      "Ric11",  "Ric22",  "Ric33",  "Ric12",  "Ric13",  "Ric23",  "Rt1t1", "Rt2t2",
      "Rt3t3",  "Rt1t2",  "Rt1t3",  "Rt2t3",  "omega0", "R",      "Rtt"};
  return names;
}

Vector13d pack_parameters(const Eigen::Matrix3d& m, const Eigen::Matrix3d& n, double r) {
  Eigen::VectorXd v(kUnknowns);
  put_symmetric(v.segment(0, 6), m, 1.0);
  put_symmetric(v.segment(6, 6), n, 1.0);
  v[12] = r;
  return v;
}

Vector13d parameters_of(const CurvaturePoint& point) {
  const Eigen::Matrix3d ric = ricci_spatial(point.riemann);
  return pack_parameters(m_tensor(point.riemann), n_tensor(ric, point.omega0),
                         ricci_from_riemann(point.riemann).scalar);
}

Vector13d assemble_row(const CoefficientSet& coeffs) {
  Eigen::VectorXd v(kUnknowns);
  put_symmetric(v.segment(0, 6), coeffs.q, 2.0);
  put_symmetric(v.segment(6, 6), coeffs.lij, 2.0);
  v[12] = 2.0 * kPi * kPi / 3.0 * coeffs.lr;
  return std::exp(-2.0 * coeffs.l0) * v;
}

ExperimentDesign ExperimentDesign::in_frame(const BoostSpec& boost) const {
  ExperimentDesign out = *this;
  for (auto& p : out.probes) p.boost = boost;
  return out;
}

namespace {

int rank_of(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > kRankTol * s[0]) ++r;
  return r;
}

}  // namespace

ExperimentDesign make_design(const std::vector<DetectorShape>& shapes, const BoostSpec& boost,
                             Execution execution) {
  const auto coeffs = full_set_batch(shapes, execution);
  ExperimentDesign d;
  d.matrix.resize(static_cast<Eigen::Index>(shapes.size()), kUnknowns);
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    d.probes.push_back({shapes[k], boost, coeffs[k], k});
    d.matrix.row(static_cast<Eigen::Index>(k)) = assemble_row(coeffs[k]).transpose();
  }
  d.rank = rank_of(d.matrix);
  d.condition_number = condition_of(d.matrix);
  return d;
}

ExperimentDesign design_experiment(const std::vector<DetectorShape>& pool, std::size_t count,
                                   Execution execution) {
  if (count < static_cast<std::size_t>(kUnknowns))
    throw DesignError("design needs at least 13 probes, requested " + std::to_string(count));
  if (count > pool.size())
    throw DesignError("requested " + std::to_string(count) + " probes from a pool of " +
                      std::to_string(pool.size()));

  const ExperimentDesign all = make_design(pool, {}, execution);
  if (all.rank < kUnknowns) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(all.matrix, Eigen::ComputeFullV);
    std::ostringstream os;
    os << "probe pool has rank " << all.rank << " of 13; null-space directions:";
    for (int k = all.rank; k < kUnknowns; ++k)
      os << " [" << describe_direction(svd.matrixV().col(k), parameter_names()) << "]";
    throw DesignError(os.str());
  }

  std::vector<bool> used(pool.size(), false);
  std::vector<std::size_t> chosen;
  Eigen::MatrixXd rows(0, kUnknowns);
  while (chosen.size() < count) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = pool.size();
    Eigen::MatrixXd trial(rows.rows() + 1, kUnknowns);
    trial.topRows(rows.rows()) = rows;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (used[k]) continue;
      trial.row(rows.rows()) = all.matrix.row(static_cast<Eigen::Index>(k));
      const double c = condition_of(trial);
      if (best_k == pool.size() || c < best * (1.0 - 1e-12)) {
        best = c;
        best_k = k;
      }
    }
    used[best_k] = true;
    chosen.push_back(best_k);
    rows = trial;
    rows.row(rows.rows() - 1) = all.matrix.row(static_cast<Eigen::Index>(best_k));
  }

  ExperimentDesign d;
  d.matrix = rows;
  for (std::size_t k : chosen) d.probes.push_back(all.probes[k]);
  d.rank = rank_of(d.matrix);
  d.condition_number = condition_of(d.matrix);
  if (d.rank < kUnknowns)
    throw DesignError("greedy selection reached rank " + std::to_string(d.rank) + " of 13");
  return d;
}

std::vector<DetectorShape> canonical_pool(double size, double coupling) {
  const std::array<Eigen::Vector3d, 6> directions = {
      Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1),
      Eigen::Vector3d(1, 1, 0), Eigen::Vector3d(1, 0, 1), Eigen::Vector3d(0, 1, 1)};
  std::vector<DetectorShape> pool;
  for (double along : {0.5, 2.0}) {
    for (const auto& u : directions) {
      pool.push_back(DetectorShape::make(Eigen::Vector3d(1.0, 1.0, along) / size,
                                         rotation_taking_z_to(u), coupling));
    }
  }
  pool.push_back(DetectorShape::sphere(size, coupling));
  pool.push_back(DetectorShape::sphere(size / 2.0, coupling));
  pool.push_back(DetectorShape::make(Eigen::Vector3d(0.5, 1.0, 2.0) / size,
                                     Eigen::Matrix3d::Identity(), coupling));
  return pool;
}

RecoveryResult recover_from_parameters(const Vector13d& theta) {
  RecoveryResult r;
  r.parameters = theta;
  const Eigen::VectorXd v = theta;
  r.m = get_symmetric(v, 0);
  r.n = get_symmetric(v, 6);
  r.r_scalar = theta[12];

  const double ricci_trace = 2.0 * r.r_scalar + 3.0 * r.m.trace();
  r.omega0 = (r.n.trace() - ricci_trace / 12.0) / (12.0 * kPi * kPi);
  r.ricci_spatial = 12.0 * (r.n - 4.0 * kPi * kPi * r.omega0 * Eigen::Matrix3d::Identity());
  r.riemann_tautau_block = 1.5 * r.m + 0.5 * r.ricci_spatial;
  r.r_tautau = ricci_trace - r.r_scalar;

  Eigen::VectorXd d(kDerived);
  put_symmetric(d.segment(0, 6), r.ricci_spatial, 1.0);
  put_symmetric(d.segment(6, 6), r.riemann_tautau_block, 1.0);
  d[12] = r.omega0;
  d[13] = r.r_scalar;
  d[14] = r.r_tautau;
  r.derived = d;
  return r;
}

Vector15d derived_of(const CurvaturePoint& point) {
  const auto ric = ricci_from_riemann(point.riemann);
  Eigen::VectorXd d(kDerived);
  put_symmetric(d.segment(0, 6), ric.ricci.bottomRightCorner<3, 3>(), 1.0);
  put_symmetric(d.segment(6, 6), tidal_block(point.riemann), 1.0);
  d[12] = point.omega0;
  d[13] = ric.scalar;
  d[14] = ric.ricci(0, 0);
  return d;
}

RecoveryResult solve(const ExperimentDesign& design, const std::vector<Measurement>& measurements,
                     const std::vector<double>& p0s) {
  const auto rows = design.matrix.rows();
  if (static_cast<std::size_t>(rows) != measurements.size() ||
      static_cast<std::size_t>(rows) != p0s.size())
    throw InvalidInput("solve: design has " + std::to_string(rows) + " rows but " +
                       std::to_string(measurements.size()) + " measurements and " +
                       std::to_string(p0s.size()) + " p0 values");

  Eigen::MatrixXd a(rows, kUnknowns);
  Eigen::VectorXd b(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto& m = measurements[static_cast<std::size_t>(k)];
    if (!(m.sigma > 0.0) || !std::isfinite(m.sigma))
      throw InvalidInput("solve: sigma must be positive for probe " + std::to_string(k));
    a.row(k) = design.matrix.row(k) / m.sigma;
    b[k] = (m.p - p0s[static_cast<std::size_t>(k)]) / m.sigma;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cond = rows >= kUnknowns && s[0] > 0.0 ? s[0] / s[kUnknowns - 1]
                                                      : std::numeric_limits<double>::infinity();
  if (rows < kUnknowns || !(s[kUnknowns - 1] > kRankTol * s[0])) {
    std::ostringstream os;
    os << "weighted normal system is singular: " << rows << " rows, condition number " << cond;
    throw SolveError(os.str());
  }

  const Eigen::VectorXd theta = svd.solve(b);
  const Eigen::VectorXd inv_s = s.cwiseInverse();
  const Eigen::MatrixXd vs = svd.matrixV() * inv_s.asDiagonal();
  const Matrix13d cov = vs * vs.transpose();

  RecoveryResult r = recover_from_parameters(theta);
  r.covariance = cov;
  r.residual_norm = (a * theta - b).norm();
  r.condition_number = cond;

  // The recovery algebra is linear, so its Jacobian follows from unit inputs.
  Eigen::Matrix<double, kDerived, kUnknowns> jac;
  for (int k = 0; k < kUnknowns; ++k)
    jac.col(k) = recover_from_parameters(Vector13d::Unit(k)).derived;
  r.derived_covariance = jac * cov * jac.transpose();
  return r;
}

namespace {

constexpr int kFrameFeatures = 13;

Eigen::Matrix<double, kFrameFeatures, 1> frame_features(const RiemannTensor& boosted) {
  const auto ric = ricci_from_riemann(boosted);
  Eigen::VectorXd f(kFrameFeatures);
  put_symmetric(f.segment(0, 6), ric.ricci.bottomRightCorner<3, 3>(), 1.0);
  put_symmetric(f.segment(6, 6), tidal_block(boosted), 1.0);
  f[12] = ric.ricci(0, 0);
  return f;
}

Eigen::Matrix<double, kFrameFeatures, 1> frame_features(const RecoveryResult& r) {
  Eigen::VectorXd f(kFrameFeatures);
  put_symmetric(f.segment(0, 6), r.ricci_spatial, 1.0);
  put_symmetric(f.segment(6, 6), r.riemann_tautau_block, 1.0);
  f[12] = r.r_tautau;
  return f;
}

}  // namespace

MultiFrameResult multi_frame_recovery(const std::vector<FrameMeasurement>& frames) {
  constexpr int n = RiemannTensor::kIndependent;
  if (frames.empty()) throw FrameSetError("no frames supplied");
  const auto rows = static_cast<Eigen::Index>(frames.size()) * kFrameFeatures;
  Eigen::MatrixXd a(rows, n);
  Eigen::VectorXd b(rows);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto r0 = static_cast<Eigen::Index>(f) * kFrameFeatures;
    for (int k = 0; k < n; ++k) {
      const RiemannTensor basis = RiemannTensor::from_independent(Vector20d::Unit(k));
      a.block(r0, k, kFrameFeatures, 1) = frame_features(boost_riemann(basis, frames[f].boost));
    }
    b.segment(r0, kFrameFeatures) = frame_features(frames[f].result);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > kRankTol * s[0]) ++rank;
  if (rank < n) {
    std::ostringstream os;
    os << "frame set determines " << rank << " of 20 Riemann components; unresolved:";
    const auto& names = RiemannTensor::independent_names();
    for (int k = rank; k < n; ++k)
      os << " [" << describe_direction(svd.matrixV().col(k), names) << "]";
    throw FrameSetError(os.str());
  }

  const Eigen::VectorXd x = svd.solve(b);
  MultiFrameResult out;
  out.riemann = RiemannTensor::from_independent(x);
  out.rank = rank;
  out.condition_number = s[0] / s[n - 1];
  out.residual_norm = (a * x - b).norm();
  return out;
}

}  // namespace curvtomo
