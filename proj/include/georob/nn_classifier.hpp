#pragma once

#include "georob/manifold.hpp"
#include "georob/norm.hpp"
#include "georob/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace georob {

enum class Acceleration {
  Auto,         // tree for L2 in low dimension, brute force otherwise
  BruteForce,
  SpatialTree,  // L2 only
};

struct Neighbor {
  Eigen::Index index = -1;
  double distance = 0.0;
  int label = -1;
};

// Exact 1-NN / k-NN over an immutable copy of the training set. Ties go to
// the lowest training index in every mode.
class NnIndex {
 public:
  NnIndex(Points points, Labels labels, NormKind norm, Acceleration acc = Acceleration::Auto);
  ~NnIndex();
  NnIndex(NnIndex&&) noexcept;
  NnIndex& operator=(NnIndex&&) noexcept;

  Eigen::Index size() const { return points_.rows(); }
  int dim() const { return static_cast<int>(points_.cols()); }
  NormKind norm() const { return norm_; }
  Acceleration acceleration() const { return acc_; }
  const Points& points() const { return points_; }
  const Labels& labels() const { return labels_; }

  Neighbor classify(const Vector& query) const;
  std::vector<Neighbor> k_nearest(const Vector& query, int k) const;
  std::vector<Neighbor> classify_batch(const Points& queries) const;
  Labels predict(const Points& queries) const;

 private:
  struct Tree;

  Neighbor brute_nearest(const double* q) const;

  Points points_;
  Labels labels_;
  NormKind norm_;
  Acceleration acc_;
  Eigen::VectorXd sq_norms_;
  std::unique_ptr<Tree> tree_;
};

enum class CertificateCondition {
  NnCover,        // delta <= 2 (rch - eps)
  BallLearner,    // delta <= rch - eps
  NoisyNnCover,   // delta <= 2 (rch - eps) - tau
};

const char* to_string(CertificateCondition c);

struct RobustnessCertificate {
  double eps = 0.0;
  double delta_measured = 0.0;
  double rch = 0.0;
  double tau = 0.0;
  double bound = 0.0;
  CertificateCondition condition = CertificateCondition::NnCover;
  bool holds = false;
  int cover_probes = 0;
  int tube_probes = 0;
  int probe_errors = 0;
};

struct CertifyOptions {
  double tau = 0.0;
  int cover_probes = 10'000;
  int tube_probes = 100'000;
  std::uint64_t seed = 0;
};

// Measures the cover radius of the index's samples on `spec`, checks the
// sampling condition, then classifies tube probes of radius eps and counts
// errors.
RobustnessCertificate certify(const NnIndex& index, const ManifoldSpec& spec, double eps,
                              const CertifyOptions& opts = {});

// The ball-learner condition for an already measured cover radius.
RobustnessCertificate certify_ball_learner(double delta_measured, double rch, double eps);

}  // namespace georob
