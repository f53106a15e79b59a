#include "georob/manifold.hpp"
#include "georob/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace georob;

namespace {

// Brute-force distance from a point to a circle in the x1-x2 plane, any norm.
double circle_distance_bruteforce(const Vector& p, double r, NormKind norm) {
  const auto at = [&](double t) {
    Vector y = Vector::Zero(p.size());
    y[0] = r * std::cos(t);
    y[1] = r * std::sin(t);
    return georob::distance(p, y, norm);
  };
  const int n = 200000;
  const double h = 2 * M_PI / n;
  double best = INFINITY;
  for (int i = 0; i < n; ++i) {
    // Golden-section refinement inside each bracket that holds a local grid minimum.
    const double t = h * i;
    const double f = at(t);
    if (f > at(t - h) || f > at(t + h)) continue;
    double a = t - h, b = t + h;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int k = 0; k < 80; ++k) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (at(c) < at(d)) b = d; else a = c;
    }
    best = std::min({best, f, at(0.5 * (a + b))});
  }
  return best;
}

}  // namespace

TEST(ManifoldSpec, FactoriesAndDimensions) {
  const auto s = ManifoldSpec::spheres(1, 3, 1, 501);
  EXPECT_EQ(s.intrinsic_dim(), 1);
  EXPECT_EQ(s.codimension(), 500);
  const auto f = ManifoldSpec::flats(-10, 10, 2, 102);
  EXPECT_EQ(f.codimension(), 100);
  EXPECT_THROW(ManifoldSpec::spheres(3, 1, 1, 2), Error);
  EXPECT_THROW(ManifoldSpec::spheres(1, 3, 2, 2), Error);
  EXPECT_THROW(ManifoldSpec::flats(-10, 10, 2, 2), Error);
  EXPECT_THROW(ManifoldSpec::flats(1, -1, 2, 3), Error);
}

TEST(ManifoldSpec, RotationIsOrthogonalAndRoundTrips) {
  const auto spec = ManifoldSpec::spheres(1, 3, 1, 12).with_rotation(42);
  ASSERT_TRUE(spec.rotated());
  const auto& r = *spec.rotation();
  EXPECT_LT((r.transpose() * r - Eigen::MatrixXd::Identity(12, 12)).norm(), 1e-12);
  Vector x = Vector::LinSpaced(12, -1, 2);
  EXPECT_LT((spec.to_canonical(spec.to_ambient(x)) - x).norm(), 1e-12);
  // Same seed gives the same matrix.
  EXPECT_EQ(*spec.rotation(), *ManifoldSpec::spheres(1, 3, 1, 12).with_rotation(42).rotation());
}

TEST(Geometry, DecisionAxisReach) {
  EXPECT_DOUBLE_EQ(decision_axis_reach(ManifoldSpec::spheres(1, 3, 1, 2), NormKind::L2), 1.0);
  EXPECT_DOUBLE_EQ(decision_axis_reach(ManifoldSpec::flats(-10, 10, 2, 50), NormKind::L2), 1.0);
  EXPECT_DOUBLE_EQ(decision_axis_reach(ManifoldSpec::flats(-10, 10, 2, 50), NormKind::Linf), 1.0);
  EXPECT_DOUBLE_EQ(decision_axis_reach(ManifoldSpec::flats(-10, 10, 2, 5, 4.0), NormKind::L2), 2.0);
}

TEST(Geometry, SummaryReportsLinfOffsetForSpheres) {
  const auto s = summarize(ManifoldSpec::spheres(1, 3, 8, 9));
  EXPECT_DOUBLE_EQ(s.reach_l2_decision_axis, 1.0);
  ASSERT_TRUE(s.reach_linf_decision_axis_l2.has_value());
  EXPECT_NEAR(*s.reach_linf_decision_axis_l2, 2.0 / 3.0, 1e-12);
  EXPECT_FALSE(summarize(ManifoldSpec::flats(-1, 1, 1, 3)).reach_linf_decision_axis_l2.has_value());
}

TEST(Geometry, CircleDistancesMatchBruteForce) {
  const auto spec = ManifoldSpec::spheres(1, 3, 1, 3);
  Engine eng(5);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector p(3);
    p << g(eng), g(eng), g(eng);
    for (NormKind norm : {NormKind::L2, NormKind::Linf}) {
      EXPECT_NEAR(distance_to_class(p, spec, 0, norm), circle_distance_bruteforce(p, 1, norm), 1e-6);
      EXPECT_NEAR(distance_to_class(p, spec, 1, norm), circle_distance_bruteforce(p, 3, norm), 1e-6);
    }
  }
}

TEST(Geometry, FlatDistancesAreAnalytic) {
  const auto spec = ManifoldSpec::flats(-10, 10, 2, 4);
  Vector p(4);
  p << 11, 0, 0.5, 0.5;
  EXPECT_NEAR(distance_to_class(p, spec, 0, NormKind::L2), std::sqrt(1 + 0.25 + 0.25), 1e-14);
  EXPECT_NEAR(distance_to_class(p, spec, 1, NormKind::L2), std::sqrt(1 + 0.25 + 1.5 * 1.5), 1e-14);
  EXPECT_NEAR(distance_to_class(p, spec, 0, NormKind::Linf), 1.0, 1e-14);
  EXPECT_TRUE(in_tube(p, spec, 0, 1.3, NormKind::L2));
  EXPECT_FALSE(in_tube(p, spec, 0, 1.2, NormKind::L2));
}

TEST(Geometry, RotatedDistancesAreInvariant) {
  const auto base = ManifoldSpec::spheres(1, 3, 1, 6);
  const auto rot = base.with_rotation(9);
  Vector c = Vector::Zero(6);
  c << 2, 0.5, 0.1, -0.3, 0.2, 1;
  EXPECT_NEAR(distance_to_class(rot.to_ambient(c), rot, 0, NormKind::L2),
              distance_to_class(c, base, 0, NormKind::L2), 1e-12);
  const Vector nearest = nearest_point_l2(rot.to_ambient(c), rot, 1);
  EXPECT_TRUE(on_manifold(nearest, rot, 1));
}

TEST(Geometry, OnManifoldAndClassLookup) {
  const auto spec = ManifoldSpec::spheres(1, 3, 1, 3);
  Vector p(3);
  p << 0, 3, 0;
  EXPECT_TRUE(on_manifold(p, spec, 1));
  EXPECT_EQ(manifold_class_of(p, spec), 1);
  p[2] = 1e-3;
  EXPECT_FALSE(manifold_class_of(p, spec).has_value());
}

TEST(Geometry, NormalSpaceAnglesForCircle) {
  const auto spec = ManifoldSpec::spheres(1, 3, 1, 5);
  Vector base = Vector::Zero(5);
  base[0] = 1;
  const Eigen::MatrixXd n = normal_basis(base, spec);
  EXPECT_EQ(n.cols(), 4);
  EXPECT_LT((n.transpose() * n - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-12);
  Vector tangent = Vector::Zero(5);
  tangent[1] = 1;
  EXPECT_NEAR(normal_space_angle(tangent, base, spec), 90.0, 1e-9);
  Vector radial = Vector::Zero(5);
  radial[0] = 1;
  EXPECT_NEAR(normal_space_angle(radial, base, spec), 0.0, 1e-9);
  Vector mixed = Vector::Zero(5);
  mixed[1] = 1;
  mixed[3] = 1;
  EXPECT_NEAR(normal_space_angle(mixed, base, spec), 45.0, 1e-9);
  Vector off = base;
  off[2] = 0.5;
  EXPECT_THROW(normal_basis(off, spec), Error);
}

TEST(Geometry, SeparationSignChangeOnSegment) {
  const auto spec = ManifoldSpec::flats(-10, 10, 2, 3);
  std::vector<Vector> path;
  for (int i = 0; i <= 10; ++i) path.push_back((Vector(3) << 0, 0, 0.2 * i).finished());
  const auto idx = separation_sign_change(spec, path);
  ASSERT_TRUE(idx.has_value());
  EXPECT_GE(*idx, 5u);
  EXPECT_LE(*idx, 6u);
}
