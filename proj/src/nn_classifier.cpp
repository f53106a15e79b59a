#include "georob/nn_classifier.hpp"

#include "georob/bounds.hpp"
#include "georob/rng.hpp"
#include "georob/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace georob {

namespace {

constexpr int kTreeMaxDim = 16;
constexpr int kLeafSize = 16;

// Squared L2 or plain L-infinity distance; every search path uses this so
// tree and brute-force results agree bit for bit.
inline double raw_distance(const double* a, const double* b, int d, NormKind norm) {
  double s = 0.0;
  if (norm == NormKind::L2) {
    for (int j = 0; j < d; ++j) {
      const double t = a[j] - b[j];
      s += t * t;
    }
  } else {
    for (int j = 0; j < d; ++j) s = std::max(s, std::abs(a[j] - b[j]));
  }
  return s;
}

inline bool better(double da, Eigen::Index ia, double db, Eigen::Index ib) {
  return da < db || (da == db && ia < ib);
}

struct Candidate {
  double d;
  Eigen::Index i;
  bool operator<(const Candidate& o) const { return better(d, i, o.d, o.i); }
};

}  // namespace

struct NnIndex::Tree {
  struct Node {
    int split_dim = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
    Eigen::Index begin = 0, end = 0;  // range into order
  };
  std::vector<Node> nodes;
  std::vector<Eigen::Index> order;

  int build(const Points& pts, Eigen::Index begin, Eigen::Index end) {
    Node node;
    node.begin = begin;
    node.end = end;
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (end - begin <= kLeafSize) return id;
    int best_dim = 0;
    double best_spread = -1.0;
    for (int j = 0; j < pts.cols(); ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (Eigen::Index r = begin; r < end; ++r) {
        lo = std::min(lo, pts(order[r], j));
        hi = std::max(hi, pts(order[r], j));
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = j;
      }
    }
    if (best_spread <= 0.0) return id;
    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) { return pts(a, best_dim) < pts(b, best_dim); });
    const double split = pts(order[mid], best_dim);
    // Left holds coordinates <= split's predecessors, right >= split.
    nodes[id].split_dim = best_dim;
    nodes[id].split = split;
    const int l = build(pts, begin, mid);
    const int r = build(pts, mid, end);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }

  // Bounded max-heap of the k best candidates.
  void search(const Points& pts, const double* q, int node_id, std::size_t k,
              std::priority_queue<Candidate>& heap) const {
    const Node& n = nodes[node_id];
    const int d = static_cast<int>(pts.cols());
    if (n.split_dim < 0) {
      for (Eigen::Index r = n.begin; r < n.end; ++r) {
        const Eigen::Index i = order[r];
        const Candidate c{raw_distance(q, pts.row(i).data(), d, NormKind::L2), i};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    const double diff = q[n.split_dim] - n.split;
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    search(pts, q, near, k, heap);
    // Equal plane distance is still visited: a tie may hide a lower index.
    if (heap.size() < k || !(diff * diff > heap.top().d)) search(pts, q, far, k, heap);
  }
};

NnIndex::NnIndex(Points points, Labels labels, NormKind norm, Acceleration acc)
    : points_(std::move(points)), labels_(std::move(labels)), norm_(norm), acc_(acc) {
  require(static_cast<std::size_t>(points_.rows()) == labels_.size(), ErrorKind::DimensionMismatch,
          "point and label counts differ");
  require_arg(points_.allFinite(), "training points must be finite");
  if (acc_ == Acceleration::Auto)
    acc_ = (norm_ == NormKind::L2 && dim() <= kTreeMaxDim) ? Acceleration::SpatialTree
                                                           : Acceleration::BruteForce;
  require(!(acc_ == Acceleration::SpatialTree && norm_ != NormKind::L2), ErrorKind::Unsupported,
          "the spatial tree only accelerates L2 queries");
  if (acc_ == Acceleration::SpatialTree && size() > 0) {
    tree_ = std::make_unique<Tree>();
    tree_->order.resize(static_cast<std::size_t>(size()));
    std::iota(tree_->order.begin(), tree_->order.end(), Eigen::Index{0});
    tree_->build(points_, 0, size());
  }
  if (norm_ == NormKind::L2) sq_norms_ = points_.rowwise().squaredNorm();
}

NnIndex::~NnIndex() = default;
NnIndex::NnIndex(NnIndex&&) noexcept = default;
NnIndex& NnIndex::operator=(NnIndex&&) noexcept = default;

Neighbor NnIndex::brute_nearest(const double* q) const {
  double best = std::numeric_limits<double>::infinity();
  Eigen::Index best_i = -1;
  const int d = dim();
  for (Eigen::Index i = 0; i < size(); ++i) {
    const double s = raw_distance(q, points_.row(i).data(), d, norm_);
    if (s < best) {
      best = s;
      best_i = i;
    }
  }
  return {best_i, norm_ == NormKind::L2 ? std::sqrt(best) : best, labels_[best_i]};
}

Neighbor NnIndex::classify(const Vector& query) const {
  require(size() > 0, ErrorKind::InvalidArgument, "nearest-neighbour index is empty");
  require(query.size() == dim(), ErrorKind::DimensionMismatch, "query dimension mismatch");
  if (tree_) return k_nearest(query, 1).front();
  return brute_nearest(query.data());
}

std::vector<Neighbor> NnIndex::k_nearest(const Vector& query, int k) const {
  require_arg(k >= 1, "k must be >= 1");
  require_arg(k <= size(), "k exceeds the number of training points");
  require(query.size() == dim(), ErrorKind::DimensionMismatch, "query dimension mismatch");
  std::vector<Candidate> cands;
  if (tree_) {
    std::priority_queue<Candidate> heap;
    tree_->search(points_, query.data(), 0, static_cast<std::size_t>(k), heap);
    while (!heap.empty()) {
      cands.push_back(heap.top());
      heap.pop();
    }
  } else {
    cands.reserve(static_cast<std::size_t>(size()));
    for (Eigen::Index i = 0; i < size(); ++i)
      cands.push_back({raw_distance(query.data(), points_.row(i).data(), dim(), norm_), i});
    std::partial_sort(cands.begin(), cands.begin() + k, cands.end());
    cands.resize(static_cast<std::size_t>(k));
  }
  std::sort(cands.begin(), cands.end());
  std::vector<Neighbor> out;
  out.reserve(cands.size());
  for (const auto& c : cands)
    out.push_back({c.i, norm_ == NormKind::L2 ? std::sqrt(c.d) : c.d, labels_[c.i]});
  return out;
}

std::vector<Neighbor> NnIndex::classify_batch(const Points& queries) const {
  require(size() > 0, ErrorKind::InvalidArgument, "nearest-neighbour index is empty");
  require(queries.cols() == dim(), ErrorKind::DimensionMismatch, "query dimension mismatch");
  std::vector<Neighbor> out(static_cast<std::size_t>(queries.rows()));
  if (tree_ || norm_ != NormKind::L2 || dim() < 32) {
    for (Eigen::Index r = 0; r < queries.rows(); ++r) {
      const Vector q = queries.row(r).transpose();
      out[static_cast<std::size_t>(r)] = classify(q);
    }
    return out;
  }
  // Expanded-form distances via GEMM pick candidates; the exact summation
  // then decides among everything within the rounding slack of the minimum.
  const double slack_scale = 8.0 * (dim() + 2) * std::numeric_limits<double>::epsilon();
  const double max_p = sq_norms_.maxCoeff();
  constexpr Eigen::Index kBlock = 256;
  for (Eigen::Index start = 0; start < queries.rows(); start += kBlock) {
    const Eigen::Index nb = std::min(kBlock, queries.rows() - start);
    const auto qblock = queries.middleRows(start, nb);
    const Eigen::MatrixXd dots = qblock * points_.transpose();
    for (Eigen::Index r = 0; r < nb; ++r) {
      const double qn = qblock.row(r).squaredNorm();
      Eigen::VectorXd approx = (sq_norms_.array() - 2.0 * dots.row(r).transpose().array()).matrix();
      const double m = approx.minCoeff();
      const double slack = slack_scale * (qn + max_p) * 4.0;
      double best = std::numeric_limits<double>::infinity();
      Eigen::Index best_i = -1;
      const double* q = qblock.row(r).data();
      for (Eigen::Index i = 0; i < size(); ++i) {
        if (approx[i] > m + slack) continue;
        const double s = raw_distance(q, points_.row(i).data(), dim(), norm_);
        if (s < best) {
          best = s;
          best_i = i;
        }
      }
      out[static_cast<std::size_t>(start + r)] = {best_i, std::sqrt(best), labels_[best_i]};
    }
  }
  return out;
}

Labels NnIndex::predict(const Points& queries) const {
  Labels out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (const auto& n : classify_batch(queries)) out.push_back(n.label);
  return out;
}

const char* to_string(CertificateCondition c) {
  switch (c) {
    case CertificateCondition::NnCover: return "nn-cover";
    case CertificateCondition::BallLearner: return "ball-learner";
    case CertificateCondition::NoisyNnCover: return "noisy-nn-cover";
  }
  return "unknown";
}

RobustnessCertificate certify(const NnIndex& index, const ManifoldSpec& spec, double eps,
                              const CertifyOptions& opts) {
  require(index.dim() == spec.ambient_dim(), ErrorKind::DimensionMismatch,
          "index dimension does not match the manifold spec");
  const NormKind norm = index.norm();
  RobustnessCertificate cert;
  cert.eps = eps;
  cert.tau = opts.tau;
  cert.rch = decision_axis_reach(spec, norm);
  require_arg(eps >= 0.0 && eps < cert.rch, "certification needs 0 <= eps < rch");
  if (opts.tau > 0.0) {
    cert.condition = CertificateCondition::NoisyNnCover;
    cert.bound = nn_noise_cover_bound(cert.rch, eps, opts.tau);
  } else {
    cert.condition = CertificateCondition::NnCover;
    cert.bound = nn_cover_bound(cert.rch, eps);
  }
  LabeledDataset samples{index.points(), index.labels(), spec, {}};
  const CoverCheck cover = verify_cover(samples, cert.bound, norm, opts.cover_probes, opts.seed);
  cert.delta_measured = cover.worst_gap;
  cert.cover_probes = cover.n_probe;
  cert.holds = cover.is_cover;

  cert.tube_probes = opts.tube_probes;
  if (opts.tube_probes > 0) {
    Points probes(opts.tube_probes, spec.ambient_dim());
    Labels truth(static_cast<std::size_t>(opts.tube_probes));
    for (int i = 0; i < opts.tube_probes; ++i) {
      Engine eng = make_engine(opts.seed, {stream::kProbe, 1, static_cast<std::uint64_t>(i)});
      truth[static_cast<std::size_t>(i)] = i % 2;
      probes.row(i) = sample_tube_point(spec, i % 2, eps, norm, eng).transpose();
    }
    const Labels pred = index.predict(probes);
    for (std::size_t i = 0; i < pred.size(); ++i) cert.probe_errors += pred[i] != truth[i] ? 1 : 0;
  }
  return cert;
}

RobustnessCertificate certify_ball_learner(double delta_measured, double rch, double eps) {
  RobustnessCertificate cert;
  cert.eps = eps;
  cert.rch = rch;
  cert.delta_measured = delta_measured;
  cert.condition = CertificateCondition::BallLearner;
  cert.bound = l_cover_bound(rch, eps);
  cert.holds = delta_measured <= cert.bound;
  return cert;
}

}  // namespace georob
