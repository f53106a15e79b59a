#pragma once

#include "georob/norm.hpp"
#include "georob/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace georob {

class ManifoldSpec;

enum class FormulaId {
  LinfAxisOffset,
  NnCover,
  BallLearnerCover,
  NnNoiseCover,
  SamplingGapRatio,
  CoverageRatio,
  PlaneCoverage,
  TubeCoverLowerBound,
  SphereCoverage,
  SegmentCount,
  LinearRegion,
  MedialProximity,
};

const char* to_string(FormulaId id);

// A closed-form bound. `log_value` is always populated (natural log) so that
// callers can work with bounds whose value over- or underflows a double.
struct BoundResult {
  double value = 0.0;
  double log_value = 0.0;
  FormulaId formula = FormulaId::CoverageRatio;
  std::map<std::string, double> inputs;
};

// ln Gamma(a) - ln Gamma(b); exact product form when a - b is a small integer.
double log_gamma_ratio(double a, double b);

// Offset Delta of the L-infinity decision axis from the inner sphere along a
// coordinate pole, for concentric spheres of radii r1 < r2 in R^d.
double linf_axis_offset(double r1, double r2, int d);

// Largest cover radius for which a nearest-neighbour classifier (resp. the
// ball-based learner) is guaranteed to classify the eps-tube correctly.
double nn_cover_bound(double rch, double eps);
double l_cover_bound(double rch, double eps);
double nn_noise_cover_bound(double rch, double eps, double tau);

// |X_L| / |X_nn| for the bounded-flat construction; always >= 2^(k/2).
double sampling_gap_ratio(int k, double eps);

BoundResult coverage_ratio_bound(int k, int d, double eps, double vol_k_manifold, double n_samples);
BoundResult plane_coverage_bound(int k, int d);
BoundResult tube_cover_sample_lower_bound(int k, int d, double lo, double hi);
BoundResult sphere_coverage_bound(double n, int d, double eps);
BoundResult linear_region_lower_bound(double r1, double rch, double tau, int d);

double segment_count_lower_bound(double r1, double r2, double eps);

struct MedialProximity {
  double t_star = 0.0;
  double dist_bound = 0.0;
};
MedialProximity medial_proximity_bound(double delta, double omega1, double omega2, double rch);

struct AccuracyBoundEstimate {
  double value = 1.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t n_union = 0;
  std::uint64_t n_intersection = 0;
};

inline constexpr std::uint64_t kDefaultMonteCarloSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultMonteCarloBlock = 65'536;

using RegionTest = std::function<bool(const Vector&)>;

// 1 - vol(T1 ∩ T2) / (2 vol(T1 ∪ T2)) by uniform rejection sampling in the
// box [lo, hi]. Block b draws from its own counter-derived stream.
AccuracyBoundEstimate accuracy_upper_bound_mc(const Vector& box_lo, const Vector& box_hi,
                                              const RegionTest& in_first,
                                              const RegionTest& in_second, std::uint64_t n_mc,
                                              std::uint64_t seed,
                                              std::uint64_t block = kDefaultMonteCarloBlock);

AccuracyBoundEstimate accuracy_upper_bound_mc(const ManifoldSpec& spec, double eps, NormKind norm,
                                              std::uint64_t n_mc, std::uint64_t seed,
                                              std::uint64_t block = kDefaultMonteCarloBlock);

}  // namespace georob
