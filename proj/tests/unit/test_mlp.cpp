#include "georob/mlp.hpp"
#include "georob/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace georob;

namespace {

Points random_batch(int n, int d, std::uint64_t seed) {
  Engine eng(seed);
  std::normal_distribution<double> g;
  Points p(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = g(eng);
  return p;
}

Labels random_labels(int n, int classes, std::uint64_t seed) {
  Engine eng(seed);
  std::uniform_int_distribution<int> u(0, classes - 1);
  Labels l(static_cast<std::size_t>(n));
  for (auto& v : l) v = u(eng);
  return l;
}

// Plain-loop forward pass and mean cross-entropy.
double reference_loss(const MlpModel& m, const Points& x, const Labels& y) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<double> a(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) a[std::size_t(j)] = x(r, j);
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
      std::vector<double> z(std::size_t(m.weights[l].rows()));
      for (Eigen::Index o = 0; o < m.weights[l].rows(); ++o) {
        double s = m.biases[l][o];
        for (Eigen::Index i = 0; i < m.weights[l].cols(); ++i) s += m.weights[l](o, i) * a[std::size_t(i)];
        z[std::size_t(o)] = (l + 1 < m.layer_count()) ? std::max(0.0, s) : s;
      }
      a = z;
    }
    double mx = *std::max_element(a.begin(), a.end());
    double se = 0.0;
    for (double v : a) se += std::exp(v - mx);
    total += -(a[std::size_t(y[std::size_t(r)])] - mx - std::log(se));
  }
  return total / double(x.rows());
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= std::max(tol * std::max(std::abs(a), std::abs(b)), 1e-8);
}

}  // namespace

TEST(Mlp, ShapesAndInit) {
  const auto m = MlpModel::random({5, 100, 2}, 3);
  EXPECT_EQ(m.input_dim(), 5);
  EXPECT_EQ(m.class_count(), 2);
  EXPECT_EQ(m.parameter_count(), 5u * 100 + 100 + 100 * 2 + 2);
  EXPECT_LE(m.weights[0].cwiseAbs().maxCoeff(), 1 / std::sqrt(5.0));
  EXPECT_LE(m.weights[1].cwiseAbs().maxCoeff(), 0.1);
  EXPECT_EQ(m, MlpModel::random({5, 100, 2}, 3));
  EXPECT_FALSE(m == MlpModel::random({5, 100, 2}, 4));
  EXPECT_THROW(MlpModel::random({5}, 1), Error);
}

TEST(Mlp, ForwardMatchesReferenceLoops) {
  const auto m = MlpModel::random({4, 7, 6, 3}, 1);
  const Points x = random_batch(9, 4, 2);
  const Labels y = random_labels(9, 3, 3);
  EXPECT_NEAR(loss_and_grads(m, x, y).loss, reference_loss(m, x, y), 1e-12);
  const Matrix p = softmax(forward(m, x));
  for (Eigen::Index r = 0; r < p.rows(); ++r) EXPECT_NEAR(p.row(r).sum(), 1.0, 1e-12);
}

TEST(Mlp, SoftmaxIsStableForLargeLogits) {
  Matrix logits(1, 3);
  logits << 1000, 999, -1000;
  const Matrix p = softmax(logits);
  EXPECT_TRUE(p.allFinite());
  EXPECT_NEAR(p(0, 0), 1 / (1 + std::exp(-1.0)), 1e-12);
}

TEST(Mlp, ConfidentRowsKeepNonzeroInputGradient) {
  auto m = MlpModel::random({2, 8, 2}, 5);
  m.weights[1] *= 200.0;
  const Points x = random_batch(20, 2, 6);
  const Labels y = predict(m, x);
  const Points g = input_gradients(m, x, y);
  int nonzero = 0;
  for (Eigen::Index r = 0; r < g.rows(); ++r) nonzero += g.row(r).norm() > 0.0;
  EXPECT_GT(nonzero, 0);
}

TEST(Mlp, GradientsMatchCentralDifferences) {
  const double h = 1e-4;
  for (int inst = 0; inst < 20; ++inst) {
    const int d = 2 + inst % 4;
    const auto m = MlpModel::random({d, 6 + inst % 3, 5, 2 + inst % 2}, 100 + inst);
    const Points x = random_batch(4, d, 200 + inst);
    const Labels y = random_labels(4, m.class_count(), 300 + inst);
    const Gradients g = loss_and_grads(m, x, y);
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
      for (Eigen::Index i = 0; i < m.weights[l].size(); ++i) {
        MlpModel p = m, q = m;
        p.weights[l].data()[i] += h;
        q.weights[l].data()[i] -= h;
        const double fd = (reference_loss(p, x, y) - reference_loss(q, x, y)) / (2 * h);
        EXPECT_TRUE(close_rel(g.weights[l].data()[i], fd, 1e-5)) << "inst " << inst << " layer " << l;
      }
      for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) {
        MlpModel p = m, q = m;
        p.biases[l][i] += h;
        q.biases[l][i] -= h;
        const double fd = (reference_loss(p, x, y) - reference_loss(q, x, y)) / (2 * h);
        EXPECT_TRUE(close_rel(g.biases[l][i], fd, 1e-5)) << "inst " << inst << " bias " << l;
      }
    }
    const Points per_row = input_gradients(m, x, y);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index j = 0; j < d; ++j) {
        Points p = x, q = x;
        p(r, j) += h;
        q(r, j) -= h;
        const double fd = (reference_loss(m, p, y) - reference_loss(m, q, y)) / (2 * h);
        EXPECT_TRUE(close_rel(g.input(r, j), fd, 1e-5)) << "inst " << inst << " input";
        // Per-row gradients are of each row's own loss, i.e. n times the mean-loss gradient.
        EXPECT_TRUE(close_rel(per_row(r, j), fd * double(x.rows()), 1e-5));
      }
    }
  }
}

TEST(Mlp, RejectsBadInput) {
  const auto m = MlpModel::random({3, 4, 2}, 1);
  EXPECT_THROW(forward(m, Points::Zero(2, 4)), Error);
  Points nan = Points::Zero(1, 3);
  nan(0, 1) = NAN;
  EXPECT_THROW(forward(m, nan), Error);
  EXPECT_THROW(loss_and_grads(m, Points::Zero(2, 3), {0, 2}), Error);
}

TEST(Training, AdamFirstStepMatchesHandUpdate) {
  const auto m = MlpModel::random({2, 5, 2}, 7);
  const Points x = random_batch(10, 2, 8);
  const Labels y = random_labels(10, 2, 9);
  const Gradients g = loss_and_grads(m, x, y);
  TrainConfig cfg;
  cfg.epochs = 1;
  const auto out = train(m, x, y, cfg).model;
  // Bias-corrected first step reduces to lr * g / (|g| + eps_hat).
  for (std::size_t l = 0; l < m.layer_count(); ++l)
    for (Eigen::Index i = 0; i < m.weights[l].size(); ++i) {
      const double gi = g.weights[l].data()[i];
      EXPECT_NEAR(out.weights[l].data()[i], m.weights[l].data()[i] - 0.1 * gi / (std::abs(gi) + 1e-8), 1e-12);
    }
}

TEST(Training, SgdStepDecays) {
  const auto m = MlpModel::random({2, 5, 2}, 7);
  const Points x = random_batch(10, 2, 8);
  const Labels y = random_labels(10, 2, 9);
  TrainConfig cfg;
  cfg.optimizer = SgdConfig{0.1, 10.0, 1};
  cfg.epochs = 2;
  const auto after1 = train(m, x, y, TrainConfig{SgdConfig{0.1, 10.0, 1}, 1, 0, 0, std::nullopt}).model;
  const auto after2 = train(m, x, y, cfg).model;
  const Gradients g2 = loss_and_grads(after1, x, y);
  EXPECT_NEAR((after2.weights[0] - (after1.weights[0] - 0.01 * g2.weights[0])).norm(), 0.0, 1e-12);
}

TEST(Training, LearnsSeparableDataAndIsDeterministic) {
  Points x = random_batch(200, 2, 10);
  Labels y(200);
  for (int i = 0; i < 200; ++i) y[std::size_t(i)] = x(i, 0) + 0.5 * x(i, 1) > 0 ? 1 : 0;
  TrainConfig cfg;
  cfg.optimizer = AdamConfig{0.01};
  cfg.epochs = 200;
  cfg.seed = 4;
  const auto a = train(MlpModel::random({2, 16, 2}, 1), x, y, cfg);
  const auto b = train(MlpModel::random({2, 16, 2}, 1), x, y, cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_LT(a.loss_trace.back(), a.loss_trace.front());
  EXPECT_GE(accuracy(predict(a.model, x), y), 0.97);
}

TEST(Training, MinibatchShufflingDependsOnSeed) {
  const Points x = random_batch(300, 2, 1);
  const Labels y = random_labels(300, 2, 2);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 32;
  cfg.seed = 1;
  const auto a = train(MlpModel::random({2, 4, 2}, 1), x, y, cfg).model;
  cfg.seed = 2;
  const auto b = train(MlpModel::random({2, 4, 2}, 1), x, y, cfg).model;
  EXPECT_FALSE(a == b);
  EXPECT_EQ(effective_batch_size(TrainConfig{}, 4096), 4096);
  EXPECT_EQ(effective_batch_size(TrainConfig{}, 4097), 128);
}

TEST(Training, DivergenceIsReported) {
  const Points x = random_batch(50, 2, 1) * 1e150;
  const Labels y = random_labels(50, 2, 2);
  TrainConfig cfg;
  cfg.optimizer = SgdConfig{1e200, 10, 100};
  cfg.epochs = 5;
  EXPECT_THROW(train(MlpModel::random({2, 4, 2}, 1), x, y, cfg), DivergenceError);
}

TEST(Checkpoint, RoundTripsBitExactly) {
  const auto dir = std::filesystem::temp_directory_path() / "georob_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "m.ckpt").string();
  const auto m = MlpModel::random({3, 9, 2}, 12);
  save_checkpoint(m, path, 12, "abc");
  const auto c = load_checkpoint(path);
  EXPECT_EQ(c.model, m);
  EXPECT_EQ(c.seed, 12u);
  EXPECT_EQ(c.config_hash, "abc");

  // Truncated blob.
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(load_checkpoint(path), Error);
  // Trailing garbage.
  save_checkpoint(m, path, 12, "abc");
  std::ofstream(path, std::ios::app | std::ios::binary) << "x";
  EXPECT_THROW(load_checkpoint(path), Error);
  std::ofstream(path) << "not a checkpoint\n";
  EXPECT_THROW(load_checkpoint(path), Error);
  EXPECT_THROW(load_checkpoint((dir / "missing").string()), Error);
  std::filesystem::remove_all(dir);
}
