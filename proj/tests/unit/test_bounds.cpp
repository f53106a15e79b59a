#include "georob/bounds.hpp"
#include "georob/manifold.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace georob;

namespace {

struct FixtureRow {
  std::string formula;
  std::vector<double> args;
  double expected = 0.0;
};

std::vector<FixtureRow> load_fixtures() {
  std::ifstream in(std::string(GEOROB_FIXTURES) + "/bounds_reference.csv");
  std::string line;
  std::getline(in, line);
  std::vector<FixtureRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    FixtureRow r;
    std::getline(ss, r.formula, ',');
    for (int i = 0; i < 5; ++i) {
      std::getline(ss, cell, ',');
      if (!cell.empty()) r.args.push_back(std::stod(cell));
    }
    std::getline(ss, cell, ',');
    r.expected = std::stod(cell);
    rows.push_back(r);
  }
  return rows;
}

double evaluate(const FixtureRow& r) {
  const auto& a = r.args;
  if (r.formula == "coverage_ratio")
    return coverage_ratio_bound(int(a[0]), int(a[1]), a[2], a[3], a[4]).value;
  if (r.formula == "plane_coverage") return plane_coverage_bound(int(a[0]), int(a[1])).value;
  if (r.formula == "tube_cover_lower_bound")
    return tube_cover_sample_lower_bound(int(a[0]), int(a[1]), a[2], a[3]).value;
  if (r.formula == "sphere_coverage") return sphere_coverage_bound(a[0], int(a[1]), a[2]).value;
  if (r.formula == "linear_region") return linear_region_lower_bound(a[0], a[1], a[2], int(a[3])).value;
  if (r.formula == "segment_count") return segment_count_lower_bound(a[0], a[1], a[2]);
  if (r.formula == "medial_t_star") return medial_proximity_bound(a[0], a[1], a[2], a[3]).t_star;
  if (r.formula == "medial_dist_bound") return medial_proximity_bound(a[0], a[1], a[2], a[3]).dist_bound;
  ADD_FAILURE() << "unknown formula " << r.formula;
  return 0.0;
}

}  // namespace

TEST(Bounds, MatchesHighPrecisionFixtures) {
  const auto rows = load_fixtures();
  ASSERT_EQ(rows.size(), 27u);
  for (const auto& r : rows) {
    const double got = evaluate(r);
    EXPECT_LE(std::abs(got - r.expected) / std::abs(r.expected), 1e-10) << r.formula;
  }
}

TEST(Bounds, LogValueAgreesWithValue) {
  const auto b = plane_coverage_bound(2, 100);
  EXPECT_NEAR(std::exp(b.log_value), b.value, 1e-15);
  // 10^12 / 2^500 only survives through the log path.
  const auto s = sphere_coverage_bound(1e12, 500, 1.0);
  EXPECT_NEAR(s.log_value, 12 * std::log(10.0) - 500 * std::log(2.0), 1e-9);
}

TEST(Bounds, LogGammaRatioIntegerAndGeneralPaths) {
  EXPECT_NEAR(log_gamma_ratio(51.0, 50.0), std::log(50.0), 1e-14);
  EXPECT_NEAR(log_gamma_ratio(2.5, 1.5), std::log(1.5), 1e-14);
  EXPECT_NEAR(log_gamma_ratio(10.3, 2.1), std::lgamma(10.3) - std::lgamma(2.1), 1e-12);
  EXPECT_NEAR(log_gamma_ratio(5001.0, 4001.0), std::lgamma(5001.0) - std::lgamma(4001.0), 1e-8);
}

TEST(Bounds, LinfAxisOffsetExactValues) {
  EXPECT_NEAR(linf_axis_offset(1, 3, 1), 1.0, 1e-12);
  EXPECT_NEAR(linf_axis_offset(1, 3, 9), 2.0 / 3.0, 1e-12);
  for (int d : {10000, 100000, 1000000})
    EXPECT_NEAR(linf_axis_offset(1, 3, d) * std::sqrt(double(d)) / std::sqrt(8.0), 1.0, 0.01);
  EXPECT_THROW(linf_axis_offset(3, 1, 2), Error);
  EXPECT_THROW(linf_axis_offset(1, 3, 0), Error);
}

TEST(Bounds, CoverRadiusBounds) {
  EXPECT_DOUBLE_EQ(nn_cover_bound(1, 0), 2);
  EXPECT_DOUBLE_EQ(l_cover_bound(1, 0), 1);
  EXPECT_DOUBLE_EQ(nn_cover_bound(1, 0.5), 1);
  EXPECT_DOUBLE_EQ(l_cover_bound(1, 0.5), 0.5);
  EXPECT_THROW(nn_cover_bound(1, 1), Error);
  EXPECT_THROW(l_cover_bound(1, 1.5), Error);
  EXPECT_DOUBLE_EQ(nn_noise_cover_bound(1, 0.25, 0.25), 1.25);
  EXPECT_DOUBLE_EQ(nn_noise_cover_bound(1, 0.3, 0.0), nn_cover_bound(1, 0.3));
  EXPECT_THROW(nn_noise_cover_bound(1, 0.9, 0.3), Error);
}

TEST(Bounds, SamplingGapRatioValues) {
  EXPECT_NEAR(sampling_gap_ratio(2, 0.0), 4.0, 1e-12);
  EXPECT_NEAR(sampling_gap_ratio(10, 1.0), 32.0, 1e-9);
  for (int k = 1; k <= 64; ++k)
    for (int i = 0; i <= 100; ++i) EXPECT_GE(sampling_gap_ratio(k, i / 100.0), std::pow(2.0, k / 2.0) * (1 - 1e-12));
}

TEST(Bounds, SpecExamples) {
  EXPECT_NEAR(coverage_ratio_bound(2, 100, 1, 400, 450).value, M_PI / 50 * 1.125, 1e-14);
  EXPECT_NEAR(coverage_ratio_bound(2, 4, 1, 400, 450).value, 1.767, 1e-3);
  EXPECT_NEAR(plane_coverage_bound(2, 3).value, 1.047, 1e-3);
  EXPECT_NEAR(tube_cover_sample_lower_bound(2, 102, -10, 10).value, 51.0 / M_PI * 400, 1e-8);
  EXPECT_NEAR(sphere_coverage_bound(1, 2, 1).value, 0.25, 1e-15);
  EXPECT_NEAR(sphere_coverage_bound(std::pow(2.0, 30), 30, 1).value, 1.0, 1e-12);
  EXPECT_NEAR(segment_count_lower_bound(1, 3, 0), 2.552, 1e-3);
  EXPECT_NEAR(segment_count_lower_bound(1, 3, 0.5), 3.388, 1e-3);
  EXPECT_NEAR(linear_region_lower_bound(1, 1, 0.25, 2).value, M_PI * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(linear_region_lower_bound(1, 1, 0.5, 2).value, M_PI, 1e-12);
  EXPECT_LT(linear_region_lower_bound(1, 1, 1, 40).value, 1.0);
  const auto m = medial_proximity_bound(0.1, 0.2, 0.5, 1.0);
  EXPECT_NEAR(m.t_star, 0.32 / 1.21, 1e-14);
  EXPECT_NEAR(medial_proximity_bound(0.0, 0.4, 0.4, 1.0).t_star, 0.0, 1e-15);
}

TEST(Bounds, ErrorPaths) {
  EXPECT_THROW(coverage_ratio_bound(3, 3, 1, 1, 1), Error);
  EXPECT_THROW(plane_coverage_bound(4, 2), Error);
  EXPECT_THROW(tube_cover_sample_lower_bound(2, 5, 1, 1), Error);
  EXPECT_THROW(sphere_coverage_bound(10, 3, 1.5), Error);
  EXPECT_THROW(linear_region_lower_bound(1, 1, 0, 3), Error);
  EXPECT_THROW(segment_count_lower_bound(1, 3, 1.0), Error);
  EXPECT_THROW(medial_proximity_bound(0.1, 0.6, 0.5, 1), Error);
}

TEST(Bounds, CoverageBoundsStrictlyDecreaseInDimension) {
  for (int k : {1, 2, 5}) {
    double prev_ratio = INFINITY, prev_plane = INFINITY;
    for (int d = k + 2; d <= 2000; ++d) {
      const double r = coverage_ratio_bound(k, d, 1.0, 400, 450).log_value;
      const double p = plane_coverage_bound(k, d).log_value;
      EXPECT_LT(r, prev_ratio) << "k=" << k << " d=" << d;
      EXPECT_LT(p, prev_plane) << "k=" << k << " d=" << d;
      prev_ratio = r;
      prev_plane = p;
    }
  }
}

TEST(Bounds, HugeDimensionStaysFiniteInLogSpace) {
  const auto b = tube_cover_sample_lower_bound(2, 100000, -10, 10);
  EXPECT_TRUE(std::isfinite(b.log_value));
  const auto p = plane_coverage_bound(2, 100000);
  EXPECT_NEAR(p.value, M_PI / 50000 * 0.5, 1e-15);
}

TEST(MonteCarloAccuracy, DisjointTubesGiveOne) {
  const auto flats = ManifoldSpec::flats(-10, 10, 2, 3);
  EXPECT_DOUBLE_EQ(accuracy_upper_bound_mc(flats, 0.5, NormKind::L2, 20000, 1).value, 1.0);
  const auto circles = ManifoldSpec::spheres(1, 3, 1, 2);
  EXPECT_DOUBLE_EQ(accuracy_upper_bound_mc(circles, 0.9, NormKind::L2, 20000, 1).value, 1.0);
  // L-inf tubes reach t*sqrt(2) along the diagonal, so they separate only below t = 1/sqrt(2).
  EXPECT_LT(accuracy_upper_bound_mc(circles, 0.9, NormKind::Linf, 20000, 1).value, 1.0);
  EXPECT_DOUBLE_EQ(accuracy_upper_bound_mc(circles, 0.7, NormKind::Linf, 20000, 1).value, 1.0);
}

TEST(MonteCarloAccuracy, IdenticalRegionsGiveHalf) {
  const Vector lo = Vector::Constant(2, -1), hi = Vector::Constant(2, 1);
  const RegionTest disk = [](const Vector& x) { return x.norm() <= 1.0; };
  EXPECT_DOUBLE_EQ(accuracy_upper_bound_mc(lo, hi, disk, disk, 10000, 3).value, 0.5);
}

TEST(MonteCarloAccuracy, OverlappingCirclesMatchRadialIntegral) {
  // Annuli [0.5,2.5] and [1.5,4.5] (r1=1, r2=3, eps=1.5): union area and
  // overlap area are exact.
  const double inter = M_PI * (2.5 * 2.5 - 1.5 * 1.5);
  const double uni = M_PI * (4.5 * 4.5 - 0.5 * 0.5);
  const double exact = 1.0 - 0.5 * inter / uni;
  const auto est = accuracy_upper_bound_mc(ManifoldSpec::spheres(1, 3, 1, 2), 1.5, NormKind::L2, 200000, 7);
  EXPECT_LT(est.value, 1.0);
  EXPECT_NEAR(est.value, exact, 5 * est.std_error + 1e-3);
}

TEST(MonteCarloAccuracy, DeterministicGivenSeedAndBlock) {
  const auto spec = ManifoldSpec::spheres(1, 3, 1, 2);
  const auto a = accuracy_upper_bound_mc(spec, 1.5, NormKind::L2, 100000, 11, 4096);
  const auto b = accuracy_upper_bound_mc(spec, 1.5, NormKind::L2, 100000, 11, 4096);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.n_union, b.n_union);
}

TEST(MonteCarloAccuracy, EmptyUnionIsAnError) {
  const Vector lo = Vector::Constant(2, 5), hi = Vector::Constant(2, 6);
  const RegionTest disk = [](const Vector& x) { return x.norm() <= 1.0; };
  EXPECT_THROW(accuracy_upper_bound_mc(lo, hi, disk, disk, 1000, 1), Error);
}
