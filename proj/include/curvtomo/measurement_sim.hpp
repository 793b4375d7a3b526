#pragma once

// Finite-shot click statistics for probe ensembles. Each probe draws from
// its own stream keyed by (seed, probe index), so adding probes never
// perturbs earlier draws.

#include <cstdint>
#include <vector>

#include "curvtomo/execution.hpp"
#include "curvtomo/forward_model.hpp"
#include "curvtomo/geometry.hpp"
#include "curvtomo/tomography.hpp"

namespace curvtomo {

// Binomial(n, p) draw from the stream with the given key.
std::uint64_t sample_clicks(double p, std::uint64_t n, std::uint64_t key);

// p = count / n, sigma = sqrt(p (1 - p) / n) floored at sqrt(0.5) / n.
Measurement estimate(std::uint64_t count, std::uint64_t n);

struct Campaign {
  ExperimentDesign design;
  CurvaturePoint truth;
  std::uint64_t shots_per_probe = 1000000;
  std::uint64_t seed = 1;
};

struct ProbeRecord {
  std::size_t probe = 0;
  double p_truth = 0.0;
  double p0 = 0.0;
  std::uint64_t clicks = 0;
  Measurement measured;
  ProbabilityBreakdown breakdown;
};

struct CampaignResult {
  std::vector<ProbeRecord> probes;
  RecoveryResult recovery;
};

// Truth as seen by a probe: the curvature point boosted into its frame.
CurvaturePoint truth_in_frame(const CurvaturePoint& truth, const BoostSpec& boost);

// Forward breakdown for every probe of a design.
std::vector<ProbabilityBreakdown> forward_design(const ExperimentDesign& design,
                                                 const CurvaturePoint& truth);

std::uint64_t probe_stream_key(std::uint64_t seed, std::size_t probe);

CampaignResult run_campaign(const Campaign& c, Execution execution = Execution::Parallel);

// Shots per probe for the curvature shift p - p0 to reach 5 standard
// deviations; +inf when the shift vanishes.
double shots_for_5sigma(const ProbabilityBreakdown& b);

}  // namespace curvtomo
