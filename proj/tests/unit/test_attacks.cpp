#include "georob/rng.hpp"
#include "georob/attacks.hpp"
#include "georob/mlp.hpp"
#include "georob/nn_classifier.hpp"

#include <gtest/gtest.h>

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

Labels half_space_labels(const Points& x) {
  Labels y(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) y[std::size_t(i)] = x(i, 0) > 0 ? 1 : 0;
  return y;
}

struct Fixture {
  MlpModel model = MlpModel::random({6, 20, 2}, 3);
  Points x = random_batch(40, 6, 4);
  Labels y = half_space_labels(x);
};

double max_perturbation(const Points& adv, const Points& x, NormKind norm) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    worst = std::max(worst, georob::norm((adv.row(r) - x.row(r)).transpose().eval(), norm));
  return worst;
}

}  // namespace

TEST(Attacks, FgsmMatchesClosedForm) {
  Fixture f;
  const Points g = input_gradients(f.model, f.x, f.y);
  const auto l2 = fgsm(f.model, f.x, f.y, 0.3, NormKind::L2);
  const auto linf = fgsm(f.model, f.x, f.y, 0.3, NormKind::Linf);
  for (Eigen::Index r = 0; r < f.x.rows(); ++r) {
    const Eigen::RowVectorXd step2 = 0.3 * g.row(r) / g.row(r).norm();
    EXPECT_LT((l2.adversarial.row(r) - f.x.row(r) - step2).norm(), 1e-12);
    const Eigen::RowVectorXd stepi = 0.3 * g.row(r).array().sign().matrix();
    EXPECT_LT((linf.adversarial.row(r) - f.x.row(r) - stepi).norm(), 1e-12);
  }
}

TEST(Attacks, FgsmWithZeroEpsIsIdentity) {
  Fixture f;
  EXPECT_EQ(fgsm(f.model, f.x, f.y, 0.0, NormKind::L2).adversarial, f.x);
}

TEST(Attacks, BimSingleFullStepEqualsFgsmBitwise) {
  Fixture f;
  for (NormKind norm : {NormKind::L2, NormKind::Linf})
    for (double eps : {0.05, 0.5, 2.0}) {
      const auto a = fgsm(f.model, f.x, f.y, eps, norm);
      const auto b = bim(f.model, f.x, f.y, eps, norm, eps, 1);
      EXPECT_EQ(a.adversarial, b.adversarial);
      EXPECT_EQ(a.success, b.success);
    }
}

TEST(Attacks, OutputsStayInTheirBalls) {
  Fixture f;
  for (NormKind norm : {NormKind::L2, NormKind::Linf})
    for (double eps : {0.1, 1.0, 3.0}) {
      EXPECT_LE(max_perturbation(fgsm(f.model, f.x, f.y, eps, norm).adversarial, f.x, norm), eps + 1e-9);
      EXPECT_LE(max_perturbation(bim(f.model, f.x, f.y, eps, norm, 0.2, 25).adversarial, f.x, norm), eps + 1e-9);
      const PgdConfig cfg{eps, 0.2, 25, norm, true, std::nullopt};
      EXPECT_LE(max_perturbation(pgd(f.model, f.x, f.y, cfg, 5).adversarial, f.x, norm), eps + 1e-9);
    }
}

TEST(Attacks, ClipBoxIsRespected) {
  const auto model = MlpModel::random({4, 10, 2}, 1);
  Points x = (random_batch(30, 4, 2).array().abs() / 4.0).min(1.0).matrix();
  const Labels y = half_space_labels(x);
  const InputBox box{0.0, 1.0};
  const auto out = bim(model, x, y, 0.3, NormKind::Linf, 0.05, 20, box);
  EXPECT_GE(out.adversarial.minCoeff(), 0.0);
  EXPECT_LE(out.adversarial.maxCoeff(), 1.0);
  EXPECT_LE(max_perturbation(out.adversarial, x, NormKind::Linf), 0.3 + 1e-9);
}

TEST(Attacks, IteratedAttackIsAtLeastAsStrongOnAverage) {
  Fixture f;
  TrainConfig cfg;
  cfg.optimizer = AdamConfig{0.01};
  cfg.epochs = 100;
  const auto trained = train(f.model, f.x, f.y, cfg).model;
  const double one = fgsm(trained, f.x, f.y, 0.5, NormKind::L2).robust_accuracy();
  const double many = bim(trained, f.x, f.y, 0.5, NormKind::L2, 0.05, 30).robust_accuracy();
  EXPECT_LE(many, one + 0.05);
}

TEST(Attacks, PgdIsDeterministicPerSeed) {
  Fixture f;
  const PgdConfig cfg{0.5, 0.1, 10, NormKind::L2, true, std::nullopt};
  EXPECT_EQ(pgd(f.model, f.x, f.y, cfg, 9).adversarial, pgd(f.model, f.x, f.y, cfg, 9).adversarial);
  EXPECT_NE(pgd(f.model, f.x, f.y, cfg, 9).adversarial, pgd(f.model, f.x, f.y, cfg, 10).adversarial);
}

TEST(Attacks, BallSamplerStaysInside) {
  for (NormKind norm : {NormKind::L2, NormKind::Linf})
    for (std::uint64_t s = 0; s < 200; ++s) EXPECT_LE(georob::norm(sample_in_ball(7, 0.4, norm, s), norm), 0.4 + 1e-12);
}

TEST(Attacks, GradientFreeNormsAreZeroOrRadius) {
  Fixture f;
  const ClassOracle oracle = [&](const Points& p) { return predict(f.model, p); };
  for (NormKind norm : {NormKind::L2, NormKind::Linf}) {
    const auto out = gradient_free_projection(oracle, f.x, f.y, 0.8, norm);
    std::size_t successes = 0;
    for (std::size_t r = 0; r < out.success.size(); ++r) {
      const double n = out.perturbation_norms[r];
      if (out.success[r]) {
        ++successes;
        if (norm == NormKind::Linf) {
          EXPECT_EQ(n, 0.8);
        } else {
          EXPECT_NEAR(n, 0.8, 0.8 * 1e-12);
        }
      } else {
        EXPECT_EQ(n, 0.0);
      }
    }
    EXPECT_GT(successes, 0u);
  }
}

TEST(Attacks, NnWalkStaysInBallAndFindsOppositeClass) {
  Points train(2, 2);
  train << 0, 0, 1, 0;
  const NnIndex idx(train, {0, 1}, NormKind::L2);
  Vector q(2);
  q << 0.3, 0.0;
  const auto far = nn_walk_attack(idx, q, 0, NnWalkConfig{0.3, 0.0, 50, 2, NormKind::L2, std::nullopt});
  EXPECT_TRUE(far.success);
  EXPECT_LE((far.adversarial - q).norm(), 0.3 + 1e-9);
  const auto near = nn_walk_attack(idx, q, 0, NnWalkConfig{0.1, 0.0, 50, 2, NormKind::L2, std::nullopt});
  EXPECT_FALSE(near.success);
  EXPECT_LE((near.adversarial - q).norm(), 0.1 + 1e-9);
}

TEST(Attacks, MethodNamesRoundTrip) {
  for (auto m : {AttackMethod::Fgsm, AttackMethod::Bim, AttackMethod::Pgd, AttackMethod::GradientFreeProjection,
                 AttackMethod::NnWalk})
    EXPECT_EQ(parse_attack_method(to_string(m)), m);
  EXPECT_THROW(parse_attack_method("cw"), Error);
}
