#include "curvtomo/measurement_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "curvtomo/errors.hpp"
#include "curvtomo/rng.hpp"

namespace curvtomo {

std::uint64_t sample_clicks(double p, std::uint64_t n, std::uint64_t key) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("sample_clicks: probability " + std::to_string(p) + " outside [0, 1]");
  if (p == 0.0 || n == 0) return 0;
  if (p == 1.0) return n;
  auto engine = make_engine(key);
  std::binomial_distribution<std::uint64_t> dist(n, p);
  return dist(engine);
}

Measurement estimate(std::uint64_t count, std::uint64_t n) {
  if (n == 0) throw InvalidInput("estimate: zero shots");
  if (count > n) throw InvalidInput("estimate: more clicks than shots");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(count) / nn;
  const double sigma = std::max(std::sqrt(p * (1.0 - p) / nn), std::sqrt(0.5) / nn);
  return {p, sigma};
}

CurvaturePoint truth_in_frame(const CurvaturePoint& truth, const BoostSpec& boost) {
  if (boost.speed == 0.0) return truth;
  CurvaturePoint out = truth;
  out.riemann = boost_riemann(truth.riemann, boost);
  return out;
}

std::vector<ProbabilityBreakdown> forward_design(const ExperimentDesign& design,
                                                 const CurvaturePoint& truth) {
  std::vector<ProbabilityBreakdown> out;
  out.reserve(design.probes.size());
  for (const auto& probe : design.probes)
    out.push_back(excitation_probability(probe.coeffs, truth_in_frame(truth, probe.boost)));
  return out;
}

std::uint64_t probe_stream_key(std::uint64_t seed, std::size_t probe) {
  return stream_key({seed, static_cast<std::uint64_t>(probe)});
}

CampaignResult run_campaign(const Campaign& c, Execution execution) {
  if (c.shots_per_probe < 1) throw InvalidInput("campaign: shots_per_probe must be >= 1");
  const auto truths = forward_design(c.design, c.truth);
  CampaignResult out;
  out.probes.resize(truths.size());
  const auto n = static_cast<std::int64_t>(truths.size());
  auto draw = [&](std::int64_t k) {
    const auto idx = static_cast<std::size_t>(k);
    ProbeRecord& r = out.probes[idx];
    r.probe = idx;
    r.breakdown = truths[idx];
    r.p_truth = truths[idx].p;
    r.p0 = truths[idx].p0;
    r.clicks = sample_clicks(r.p_truth, c.shots_per_probe, probe_stream_key(c.seed, idx));
    r.measured = estimate(r.clicks, c.shots_per_probe);
  };
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) draw(k);
  } else {
    for (std::int64_t k = 0; k < n; ++k) draw(k);
  }

  std::vector<Measurement> meas;
  std::vector<double> p0s;
  for (const auto& r : out.probes) {
    meas.push_back(r.measured);
    p0s.push_back(r.p0);
  }
  out.recovery = solve(c.design, meas, p0s);
  return out;
}

double shots_for_5sigma(const ProbabilityBreakdown& b) {
  const double shift = b.p - b.p0;
  if (shift == 0.0) return std::numeric_limits<double>::infinity();
  return 25.0 * b.p * (1.0 - b.p) / (shift * shift);
}

}  // namespace curvtomo
