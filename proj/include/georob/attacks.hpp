#pragma once

#include "georob/mlp.hpp"
#include "georob/norm.hpp"
#include "georob/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace georob {

class NnIndex;

enum class AttackMethod { Fgsm, Bim, Pgd, GradientFreeProjection, NnWalk };

const char* to_string(AttackMethod m);
AttackMethod parse_attack_method(const std::string& s);

struct AttackOutcome {
  Points adversarial;
  std::vector<bool> success;             // prediction differs from the reference label
  std::vector<double> perturbation_norms;
  std::vector<bool> zero_gradient;       // gradient vanished on the first step

  std::size_t success_count() const;
  double robust_accuracy() const;  // fraction of rows not fooled
};

// x + eps * sign(grad) (L-inf) or x + eps * grad / |grad| (L2).
AttackOutcome fgsm(const MlpModel& model, const Points& points, const Labels& labels, double eps,
                   NormKind norm, std::optional<InputBox> clip = std::nullopt);

// Iterated steps of size `step`, projected back onto the eps-ball each time.
AttackOutcome bim(const MlpModel& model, const Points& points, const Labels& labels, double eps,
                  NormKind norm, double step = 0.05, int iters = 30,
                  std::optional<InputBox> clip = std::nullopt);

// BIM with an optional uniform random start in the ball; row r draws from
// its own stream derived from (seed, r).
AttackOutcome pgd(const MlpModel& model, const Points& points, const Labels& labels,
                  const PgdConfig& cfg, std::uint64_t seed);

// Uniform point of the closed ball of radius `radius` around zero.
Vector sample_in_ball(int dim, double radius, NormKind norm, std::uint64_t seed);

using ClassOracle = std::function<Labels(const Points&)>;

// For each test point x, radially projects every other test point onto the
// sphere of radius r around x and keeps the first (index order) projection
// whose predicted class differs from the prediction at x.
AttackOutcome gradient_free_projection(const ClassOracle& oracle, const Points& test_points,
                                       const Labels& labels, double r, NormKind norm);

struct NnWalkConfig {
  double eps = 1.0;
  double step = 0.0;  // 0: eps / 10
  int iters = 50;
  int k = 10;
  NormKind norm = NormKind::L2;
  std::optional<InputBox> clip;
};

struct NnWalkResult {
  Vector adversarial;
  bool success = false;
  int iterations = 0;
};

NnWalkResult nn_walk_attack(const NnIndex& index, const Vector& point, int label,
                            const NnWalkConfig& cfg);

AttackOutcome nn_walk_attack(const NnIndex& index, const Points& points, const Labels& labels,
                             const NnWalkConfig& cfg);

}  // namespace georob
