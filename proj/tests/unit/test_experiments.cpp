#include "georob/bounds.hpp"
#include "georob/experiments.hpp"
#include "georob/nn_classifier.hpp"
#include "georob/sampling.hpp"

#include <gtest/gtest.h>

using namespace georob;

namespace {

CodimSweepConfig tiny_sweep() {
  CodimSweepConfig c;
  c.codims = {1, 5};
  c.eps_grid = {0.5, 1.0};
  c.attacks = {AttackMethod::Fgsm, AttackMethod::Bim};
  c.bim_iters = 5;
  c.n_retrain = 2;
  c.train.epochs = 20;
  c.train_per_class = 60;
  c.test_per_class = 30;
  c.workers = 1;
  return c;
}

}  // namespace

TEST(Experiments, LinspaceGrid) {
  const auto g = linspace_grid(0.1, 1.0, 10);
  ASSERT_EQ(g.size(), 10u);
  EXPECT_DOUBLE_EQ(g.front(), 0.1);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[4], 0.5, 1e-15);
}

TEST(Experiments, CodimSweepShapeAndDeterminism) {
  const auto cfg = tiny_sweep();
  const auto a = run_codim_sweep(cfg);
  EXPECT_EQ(a.results.size(), 2u * 2 * 2 * 2);
  EXPECT_EQ(a.aggregates.size(), 2u * 2 * 2);
  for (std::size_t i = 0; i < a.aggregates.size(); ++i) {
    EXPECT_EQ(a.aggregates.number(i, "n"), 2);
    // eps = 1 reaches the decision axis between the circles.
    if (a.aggregates.number(i, "eps") < 0.9) EXPECT_GE(a.aggregates.number(i, "nn_min"), 0.99) << i;
  }
  const auto b = run_codim_sweep(cfg);
  for (std::size_t i = 0; i < a.results.size(); ++i)
    EXPECT_EQ(a.results.number(i, "mlp_acc"), b.results.number(i, "mlp_acc"));
  auto parallel = cfg;
  parallel.workers = 3;
  const auto c = run_codim_sweep(parallel);
  for (std::size_t i = 0; i < a.results.size(); ++i)
    EXPECT_EQ(a.results.number(i, "mlp_acc"), c.results.number(i, "mlp_acc"));
}

TEST(Experiments, ConfigsRoundTripThroughJson) {
  const auto sweep = tiny_sweep();
  CodimSweepConfig s2;
  from_json(to_json(sweep), s2);
  EXPECT_EQ(to_json(s2), to_json(sweep));
  TradeoffConfig t;
  t.d_grid = {2, 4};
  TradeoffConfig t2;
  from_json(to_json(t), t2);
  EXPECT_EQ(to_json(t2), to_json(t));
  AngleConfig a;
  a.codims = {3};
  AngleConfig a2;
  from_json(to_json(a), a2);
  EXPECT_EQ(to_json(a2), to_json(a));
  MnistConfig m;
  m.mnist_dir = "/x";
  MnistConfig m2;
  from_json(to_json(m), m2);
  EXPECT_EQ(to_json(m2), to_json(m));
}

TEST(Experiments, TradeoffReportsPerDimensionThreshold) {
  TradeoffConfig c;
  c.d_grid = {2, 3};
  c.eps_grid = {0.5, 1.5};
  c.n_retrain = 1;
  c.train.epochs = 10;
  c.train_per_class = 40;
  c.test_per_class = 20;
  c.adversary.iters = 3;
  c.bim_iters = 3;
  c.workers = 1;
  const auto r = run_tradeoff(c);
  EXPECT_EQ(r.results.size(), 4u);
  ASSERT_EQ(r.summary.at("per_dimension").size(), 2u);
  EXPECT_NEAR(r.results.number(0, "delta_linf"), linf_axis_offset(1, 3, 2), 1e-12);
}

TEST(Experiments, AngleHistogramFractionsSumToOne) {
  AngleConfig c;
  c.codims = {2};
  c.n_retrain = 1;
  c.train.epochs = 10;
  c.train_per_class = 50;
  c.test_per_class = 25;
  c.workers = 1;
  const auto r = run_angle_histogram(c);
  EXPECT_EQ(r.results.size(), std::size_t(kAngleBins));
  double total = 0.0;
  for (std::size_t i = 0; i < r.results.size(); ++i) total += r.results.number(i, "fraction");
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Experiments, GradFieldOnGrid) {
  GradFieldConfig c;
  c.grid_res = 11;
  const auto r = run_gradfield(MlpModel::random({2, 10, 2}, 1), c);
  EXPECT_EQ(r.results.size(), 121u);
  EXPECT_TRUE(r.summary.contains("ratio"));
  EXPECT_EQ(gradfield_spec().ambient_dim(), 2);
}

TEST(Experiments, SlicesAverageOracles) {
  SliceConfig c;
  c.z_values = {0.0, 1.0};
  c.grid_res = 9;
  const ClassOracle ones = [](const Points& p) { return Labels(std::size_t(p.rows()), 1); };
  const ClassOracle zeros = [](const Points& p) { return Labels(std::size_t(p.rows()), 0); };
  const auto r = run_boundary_slices({ones, zeros}, c);
  EXPECT_EQ(r.results.size(), 2u * 81);
  for (std::size_t i = 0; i < r.results.size(); ++i) EXPECT_DOUBLE_EQ(r.results.number(i, "freq_class1"), 0.5);
}

TEST(Experiments, MnistWithoutFilesIsAnError) {
  MnistConfig c;
  c.mnist_dir = "/nonexistent/mnist";
  EXPECT_THROW(run_mnist_nn(c), Error);
}
