#include "georob/attacks.hpp"

#include "georob/nn_classifier.hpp"
#include "georob/rng.hpp"

#include <cmath>

namespace georob {

namespace {

void check_inputs(const Points& points, const Labels& labels, double eps) {
  require(static_cast<Eigen::Index>(labels.size()) == points.rows(), ErrorKind::DimensionMismatch,
          "label count does not match point count");
  require_arg(eps >= 0.0, "attack radius must be non-negative");
}

void apply_clip(Eigen::Ref<Eigen::RowVectorXd> x, const std::optional<InputBox>& clip) {
  if (clip) x = x.cwiseMax(clip->lo).cwiseMin(clip->hi);
}

// Ascent direction scaled to `step`; returns false when the gradient is zero.
bool ascent_step(const Eigen::RowVectorXd& grad, double step, NormKind norm, Eigen::RowVectorXd& out) {
  if (norm == NormKind::Linf) {
    out = step * grad.array().sign().matrix();
    return !grad.isZero(0.0);
  }
  const double n = grad.norm();
  if (n == 0.0) {
    out.setZero(grad.size());
    return false;
  }
  out = step * (grad / n);
  return true;
}

AttackOutcome finish(const MlpModel& model, const Points& x0, Points adv, const Labels& labels,
                     NormKind norm, std::vector<bool> zero_grad) {
  AttackOutcome out;
  const Labels pred = predict(model, adv);
  out.success.resize(labels.size());
  out.perturbation_norms.resize(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    out.success[r] = pred[r] != labels[r];
    out.perturbation_norms[r] = georob::norm(adv.row(i) - x0.row(i), norm);
  }
  out.adversarial = std::move(adv);
  out.zero_gradient = std::move(zero_grad);
  return out;
}

// Shared projected ascent loop. `delta` holds the starting perturbation.
AttackOutcome projected_ascent(const MlpModel& model, const Points& points, const Labels& labels,
                               double eps, NormKind norm, double step, int iters,
                               const std::optional<InputBox>& clip, Points delta) {
  check_inputs(points, labels, eps);
  require_arg(step > 0.0, "attack step must be positive");
  require_arg(iters >= 1, "attack needs at least one iteration");
  std::vector<bool> zero_grad(labels.size(), false);
  Points adv = points + delta;
  Eigen::RowVectorXd s;
  for (int it = 0; it < iters; ++it) {
    const Points grad = input_gradients(model, adv, labels);
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
      const bool moved = ascent_step(grad.row(r), step, norm, s);
      if (it == 0 && !moved) zero_grad[static_cast<std::size_t>(r)] = true;
      Eigen::RowVectorXd d = delta.row(r) + s;
      project_to_ball(d, eps, norm);
      Eigen::RowVectorXd x = points.row(r) + d;
      if (clip) {
        apply_clip(x, clip);
        d = x - points.row(r);
      }
      delta.row(r) = d;
      adv.row(r) = x;
    }
  }
  return finish(model, points, std::move(adv), labels, norm, std::move(zero_grad));
}

}  // namespace

const char* to_string(AttackMethod m) {
  switch (m) {
    case AttackMethod::Fgsm: return "fgsm";
    case AttackMethod::Bim: return "bim";
    case AttackMethod::Pgd: return "pgd";
    case AttackMethod::GradientFreeProjection: return "gradient-free";
    case AttackMethod::NnWalk: return "nn-walk";
  }
  return "unknown";
}

AttackMethod parse_attack_method(const std::string& s) {
  if (s == "fgsm") return AttackMethod::Fgsm;
  if (s == "bim") return AttackMethod::Bim;
  if (s == "pgd") return AttackMethod::Pgd;
  if (s == "gradient-free" || s == "projection") return AttackMethod::GradientFreeProjection;
  if (s == "nn-walk") return AttackMethod::NnWalk;
  throw Error(ErrorKind::InvalidArgument,
              "unknown attack '" + s + "' (expected fgsm|bim|pgd|gradient-free|nn-walk)");
}

std::size_t AttackOutcome::success_count() const {
  std::size_t n = 0;
  for (bool s : success) n += s ? 1 : 0;
  return n;
}

double AttackOutcome::robust_accuracy() const {
  if (success.empty()) return 0.0;
  return 1.0 - static_cast<double>(success_count()) / static_cast<double>(success.size());
}

AttackOutcome fgsm(const MlpModel& model, const Points& points, const Labels& labels, double eps,
                   NormKind norm, std::optional<InputBox> clip) {
  check_inputs(points, labels, eps);
  if (eps == 0.0) {
    const Points grad = input_gradients(model, points, labels);
    std::vector<bool> zero_grad(labels.size());
    for (Eigen::Index r = 0; r < points.rows(); ++r)
      zero_grad[static_cast<std::size_t>(r)] = grad.row(r).isZero(0.0);
    return finish(model, points, points, labels, norm, std::move(zero_grad));
  }
  return projected_ascent(model, points, labels, eps, norm, eps, 1, clip,
                          Points::Zero(points.rows(), points.cols()));
}

AttackOutcome bim(const MlpModel& model, const Points& points, const Labels& labels, double eps,
                  NormKind norm, double step, int iters, std::optional<InputBox> clip) {
  return projected_ascent(model, points, labels, eps, norm, step, iters, clip,
                          Points::Zero(points.rows(), points.cols()));
}

Vector sample_in_ball(int dim, double radius, NormKind norm, std::uint64_t seed) {
  Engine eng(seed);
  Vector v(dim);
  if (norm == NormKind::Linf) {
    std::uniform_real_distribution<double> u(-radius, radius);
    for (int i = 0; i < dim; ++i) v[i] = u(eng);
    return v;
  }
  std::normal_distribution<double> gauss;
  double n2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss(eng);
    n2 = v.squaredNorm();
  } while (n2 == 0.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  v *= radius * std::pow(u01(eng), 1.0 / dim) / std::sqrt(n2);
  project_to_ball(v, radius, norm);
  return v;
}

AttackOutcome pgd(const MlpModel& model, const Points& points, const Labels& labels,
                  const PgdConfig& cfg, std::uint64_t seed) {
  Points delta = Points::Zero(points.rows(), points.cols());
  if (cfg.random_start && cfg.eps > 0.0) {
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
      const std::uint64_t row_seed = derive_seed(seed, {stream::kAttack, static_cast<std::uint64_t>(r)});
      delta.row(r) = sample_in_ball(static_cast<int>(points.cols()), cfg.eps, cfg.norm, row_seed).transpose();
      if (cfg.clip) {
        Eigen::RowVectorXd x = points.row(r) + delta.row(r);
        apply_clip(x, cfg.clip);
        delta.row(r) = x - points.row(r);
      }
    }
  }
  return projected_ascent(model, points, labels, cfg.eps, cfg.norm, cfg.step, cfg.iters, cfg.clip,
                          std::move(delta));
}

AttackOutcome gradient_free_projection(const ClassOracle& oracle, const Points& test_points,
                                       const Labels& labels, double r, NormKind norm) {
  check_inputs(test_points, labels, r);
  require_arg(test_points.rows() > 0, "gradient-free attack needs a nonempty test set");
  const Eigen::Index n = test_points.rows();
  const Labels base = oracle(test_points);
  require(static_cast<Eigen::Index>(base.size()) == n, ErrorKind::DimensionMismatch,
          "oracle returned the wrong number of labels");
  AttackOutcome out;
  out.adversarial = test_points;
  out.success.assign(static_cast<std::size_t>(n), false);
  out.perturbation_norms.assign(static_cast<std::size_t>(n), 0.0);
  out.zero_gradient.assign(static_cast<std::size_t>(n), false);
  if (r == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) out.success[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(i)];
    return out;
  }
  constexpr Eigen::Index kChunk = 512;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd x = test_points.row(i);
    bool found = false;
    for (Eigen::Index start = 0; start < n && !found; start += kChunk) {
      const Eigen::Index end = std::min(n, start + kChunk);
      Points cand(end - start, test_points.cols());
      std::vector<Eigen::Index> src;
      for (Eigen::Index j = start; j < end; ++j) {
        if (j == i) continue;
        const Eigen::RowVectorXd u = test_points.row(j) - x;
        const double un = georob::norm(u, norm);
        if (un == 0.0) continue;  // duplicate of x
        cand.row(static_cast<Eigen::Index>(src.size())) = r * (u / un);
        src.push_back(j);
      }
      if (src.empty()) continue;
      const auto m = static_cast<Eigen::Index>(src.size());
      Points projected = cand.topRows(m);
      for (Eigen::Index t = 0; t < m; ++t) projected.row(t) += x;
      const Labels pred = oracle(projected);
      for (Eigen::Index t = 0; t < m; ++t) {
        if (pred[static_cast<std::size_t>(t)] != base[static_cast<std::size_t>(i)]) {
          out.adversarial.row(i) = projected.row(t);
          out.perturbation_norms[static_cast<std::size_t>(i)] = georob::norm(cand.row(t), norm);
          out.success[static_cast<std::size_t>(i)] = true;
          found = true;
          break;
        }
      }
    }
  }
  return out;
}

NnWalkResult nn_walk_attack(const NnIndex& index, const Vector& point, int label,
                            const NnWalkConfig& cfg) {
  require_arg(cfg.k >= 2, "nn-walk needs k >= 2");
  require_arg(cfg.k <= index.size(), "nn-walk k exceeds the training set size");
  require_arg(cfg.eps >= 0.0, "attack radius must be non-negative");
  require_arg(cfg.iters >= 1, "nn-walk needs at least one iteration");
  const double step = cfg.step > 0.0 ? cfg.step : cfg.eps / 10.0;
  NnWalkResult res;
  res.adversarial = point;
  Vector z = point;
  for (int it = 0; it < cfg.iters; ++it) {
    if (index.classify(z).label != label) {
      res.success = true;
      break;
    }
    res.iterations = it + 1;
    const auto nbrs = index.k_nearest(z, cfg.k);
    Vector mean_true = Vector::Zero(z.size()), mean_other = Vector::Zero(z.size());
    int n_true = 0, n_other = 0;
    for (const auto& nb : nbrs) {
      if (nb.label == label) {
        mean_true += index.points().row(nb.index).transpose();
        ++n_true;
      } else {
        mean_other += index.points().row(nb.index).transpose();
        ++n_other;
      }
    }
    Vector dir;
    if (n_true > 0 && n_other > 0) {
      dir = mean_other / double(n_other) - mean_true / double(n_true);
    } else if (n_other > 0) {
      dir = mean_other / double(n_other) - z;
    } else {
      dir = z - mean_true / double(n_true);
    }
    Eigen::RowVectorXd s;
    if (!ascent_step(dir.transpose(), step, cfg.norm, s)) break;
    Eigen::RowVectorXd d = (z - point).transpose() + s;
    project_to_ball(d, cfg.eps, cfg.norm);
    Eigen::RowVectorXd x = point.transpose() + d;
    apply_clip(x, cfg.clip);
    z = x.transpose();
  }
  if (!res.success) res.success = index.classify(z).label != label;
  res.adversarial = z;
  return res;
}

AttackOutcome nn_walk_attack(const NnIndex& index, const Points& points, const Labels& labels,
                             const NnWalkConfig& cfg) {
  check_inputs(points, labels, cfg.eps);
  AttackOutcome out;
  out.adversarial = points;
  out.success.resize(labels.size());
  out.perturbation_norms.resize(labels.size());
  out.zero_gradient.assign(labels.size(), false);
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const auto res = nn_walk_attack(index, points.row(r).transpose(), labels[static_cast<std::size_t>(r)], cfg);
    out.adversarial.row(r) = res.adversarial.transpose();
    out.success[static_cast<std::size_t>(r)] = res.success;
    out.perturbation_norms[static_cast<std::size_t>(r)] = georob::norm(res.adversarial - points.row(r).transpose(), cfg.norm);
  }
  return out;
}

}  // namespace georob
