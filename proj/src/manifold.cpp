#include "georob/manifold.hpp"

#include "georob/bounds.hpp"
#include "georob/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace georob {

namespace {

void check_class(int class_index) {
  require_arg(class_index == 0 || class_index == 1,
              "class index must be 0 or 1, got " + std::to_string(class_index));
}

void check_dim(const Vector& p, const ManifoldSpec& spec) {
  require(p.size() == spec.ambient_dim(), ErrorKind::DimensionMismatch,
          "point has " + std::to_string(p.size()) + " coordinates, manifold ambient dimension is " +
              std::to_string(spec.ambient_dim()));
}

// L-infinity distance from p (restricted to the sphere's subspace) to the
// origin-centred sphere of radius r. The cube of half-width t around p meets
// the sphere iff min_norm(t) <= r <= max_norm(t); both are monotone in t.
double linf_to_sphere_subspace(const Eigen::Ref<const Vector>& p, double r) {
  const Vector a = p.cwiseAbs();
  const double n2 = a.squaredNorm();
  if (n2 < r * r) {
    // max_norm(t)^2 = sum (a_i + t)^2 = r^2, positive root.
    const double n = static_cast<double>(a.size());
    const double s = a.sum();
    const double disc = s * s - n * (n2 - r * r);
    return (-s + std::sqrt(disc)) / n;
  }
  auto min_norm2 = [&](double t) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double e = std::max(0.0, a[i] - t);
      acc += e * e;
    }
    return acc;
  };
  double lo = 0.0;
  double hi = a.maxCoeff();
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (min_norm2(mid) <= r * r) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Vector flat_deviation(const Vector& c, const ParallelFlats& f, int class_index) {
  const Eigen::Index d = c.size();
  Vector e(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i < f.flat_dim) {
      e[i] = std::max({0.0, f.lo - c[i], c[i] - f.hi});
    } else if (i == d - 1) {
      e[i] = std::abs(c[i] - (class_index == 1 ? f.separation : 0.0));
    } else {
      e[i] = std::abs(c[i]);
    }
  }
  return e;
}

}  // namespace

ManifoldSpec ManifoldSpec::spheres(double r1, double r2, int sphere_dim, int ambient_dim) {
  return ManifoldSpec(ConcentricSpheres{r1, r2, sphere_dim}, ambient_dim);
}

ManifoldSpec ManifoldSpec::flats(double lo, double hi, int flat_dim, int ambient_dim,
                                 double separation) {
  return ManifoldSpec(ParallelFlats{lo, hi, flat_dim, separation}, ambient_dim);
}

ManifoldSpec::ManifoldSpec(ManifoldFamily family, int ambient_dim,
                           std::optional<std::uint64_t> rotation_seed)
    : family_(family), ambient_dim_(ambient_dim), rotation_seed_(rotation_seed) {
  validate();
  if (rotation_seed_) {
    rotation_ = std::make_shared<const Eigen::MatrixXd>(random_orthogonal(ambient_dim_, *rotation_seed_));
  }
}

void ManifoldSpec::validate() const {
  if (is_spheres()) {
    const auto& s = spheres();
    require_arg(s.r1 > 0.0 && s.r1 < s.r2, "concentric spheres need 0 < r1 < r2");
    require_arg(s.sphere_dim >= 1, "sphere dimension must be >= 1");
    require_arg(s.sphere_dim + 1 <= ambient_dim_,
                "sphere dimension + 1 must not exceed the ambient dimension");
  } else {
    const auto& f = flats();
    require_arg(f.lo <= f.hi, "flats need lo <= hi");
    require_arg(f.flat_dim >= 1, "flat dimension must be >= 1");
    require_arg(f.separation > 0.0, "flat separation must be positive");
    require_arg(f.flat_dim + 1 <= ambient_dim_,
                "flat dimension + 1 must not exceed the ambient dimension");
  }
}

int ManifoldSpec::intrinsic_dim() const {
  return is_spheres() ? spheres().sphere_dim : flats().flat_dim;
}

Vector ManifoldSpec::to_canonical(const Vector& ambient) const {
  if (!rotation_) return ambient;
  return rotation_->transpose() * ambient;
}

Vector ManifoldSpec::to_ambient(const Vector& canonical) const {
  if (!rotation_) return canonical;
  return (*rotation_) * canonical;
}

Points ManifoldSpec::to_ambient(const Points& canonical) const {
  if (!rotation_) return canonical;
  return canonical * rotation_->transpose();
}

ManifoldSpec ManifoldSpec::with_ambient_dim(int ambient_dim) const {
  return ManifoldSpec(family_, ambient_dim);
}

ManifoldSpec ManifoldSpec::with_rotation(std::uint64_t seed) const {
  return ManifoldSpec(family_, ambient_dim_, seed);
}

std::string ManifoldSpec::describe() const {
  std::ostringstream os;
  if (is_spheres()) {
    const auto& s = spheres();
    os << "ConcentricSpheres(r1=" << s.r1 << ", r2=" << s.r2 << ", k=" << s.sphere_dim << ")";
  } else {
    const auto& f = flats();
    os << "ParallelFlats([" << f.lo << "," << f.hi << "]^" << f.flat_dim
       << ", separation=" << f.separation << ")";
  }
  os << " in R^" << ambient_dim_;
  if (rotation_seed_) os << " rotated(seed=" << *rotation_seed_ << ")";
  return os.str();
}

Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed) {
  require_arg(dim >= 1, "rotation dimension must be >= 1");
  Engine eng = make_engine(seed, {stream::kRotation});
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = gauss(eng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

GeometrySummary summarize(const ManifoldSpec& spec) {
  GeometrySummary g;
  g.codimension = spec.codimension();
  if (spec.is_spheres()) {
    const auto& s = spec.spheres();
    g.reach_l2_decision_axis = 0.5 * (s.r2 - s.r1);
    g.reach_linf_decision_axis_l2 = linf_axis_offset(s.r1, s.r2, spec.ambient_dim());
  } else {
    g.reach_l2_decision_axis = 0.5 * spec.flats().separation;
  }
  return g;
}

double decision_axis_reach(const ManifoldSpec& spec, NormKind norm) {
  if (norm == NormKind::L2) return summarize(spec).reach_l2_decision_axis;
  require(spec.is_flats() && !spec.rotated(), ErrorKind::Unsupported,
          "L-infinity decision-axis reach is only available for unrotated flats");
  return 0.5 * spec.flats().separation;
}

double distance_to_class(const Vector& point, const ManifoldSpec& spec, int class_index,
                         NormKind norm) {
  check_dim(point, spec);
  check_class(class_index);
  require(norm == NormKind::L2 || !spec.rotated(), ErrorKind::Unsupported,
          "L-infinity distances are not rotation invariant; use an unrotated spec");
  const Vector c = spec.to_canonical(point);
  if (spec.is_spheres()) {
    const auto& s = spec.spheres();
    const double r = class_index == 0 ? s.r1 : s.r2;
    const int sub = s.sphere_dim + 1;
    const auto head = c.head(sub);
    const auto tail = c.tail(c.size() - sub);
    if (norm == NormKind::L2) {
      const double radial = head.norm() - r;
      return std::sqrt(radial * radial + tail.squaredNorm());
    }
    const double off = tail.size() > 0 ? tail.cwiseAbs().maxCoeff() : 0.0;
    return std::max(off, linf_to_sphere_subspace(head, r));
  }
  const Vector e = flat_deviation(c, spec.flats(), class_index);
  return norm == NormKind::L2 ? e.norm() : e.maxCoeff();
}

bool in_tube(const Vector& point, const ManifoldSpec& spec, int class_index, double eps,
             NormKind norm) {
  require_arg(eps >= 0.0, "tube radius must be non-negative");
  return distance_to_class(point, spec, class_index, norm) <= eps;
}

Vector nearest_point_l2(const Vector& point, const ManifoldSpec& spec, int class_index) {
  check_dim(point, spec);
  check_class(class_index);
  const Vector c = spec.to_canonical(point);
  Vector out = Vector::Zero(c.size());
  if (spec.is_spheres()) {
    const auto& s = spec.spheres();
    const double r = class_index == 0 ? s.r1 : s.r2;
    const int sub = s.sphere_dim + 1;
    const double n = c.head(sub).norm();
    if (n > 0.0) {
      out.head(sub) = c.head(sub) * (r / n);
    } else {
      out[0] = r;
    }
  } else {
    const auto& f = spec.flats();
    for (int i = 0; i < f.flat_dim; ++i) out[i] = std::clamp(c[i], f.lo, f.hi);
    out[c.size() - 1] = class_index == 1 ? f.separation : 0.0;
  }
  return spec.to_ambient(out);
}

bool on_manifold(const Vector& point, const ManifoldSpec& spec, int class_index, double tol) {
  return distance_to_class(point, spec, class_index, NormKind::L2) <= tol;
}

std::optional<int> manifold_class_of(const Vector& point, const ManifoldSpec& spec, double tol) {
  for (int c = 0; c < 2; ++c)
    if (on_manifold(point, spec, c, tol)) return c;
  return std::nullopt;
}

Eigen::MatrixXd normal_basis(const Vector& base_point, const ManifoldSpec& spec) {
  check_dim(base_point, spec);
  require(manifold_class_of(base_point, spec).has_value(), ErrorKind::OffManifold,
          "normal space requested at a point that is not on either class manifold");
  const int d = spec.ambient_dim();
  const int k = spec.intrinsic_dim();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(d, d - k);
  const Vector c = spec.to_canonical(base_point);
  int col = 0;
  int first_axis = k;
  if (spec.is_spheres()) {
    const int sub = k + 1;
    basis.col(col++).head(sub) = c.head(sub).normalized();
    first_axis = sub;
  }
  for (int axis = first_axis; axis < d; ++axis) basis(axis, col++) = 1.0;
  if (spec.rotation()) basis = (*spec.rotation()) * basis;
  return basis;
}

double normal_space_angle(const Vector& perturbation, const Vector& base_point,
                          const ManifoldSpec& spec) {
  check_dim(perturbation, spec);
  check_dim(base_point, spec);
  require_arg(perturbation.squaredNorm() > 0.0, "perturbation must be nonzero");
  require(manifold_class_of(base_point, spec).has_value(), ErrorKind::OffManifold,
          "base point is not on either class manifold");
  const Vector eta = spec.to_canonical(perturbation);
  const Vector c = spec.to_canonical(base_point);
  const int k = spec.intrinsic_dim();
  double tangent2 = 0.0;
  double normal2 = 0.0;
  if (spec.is_spheres()) {
    const int sub = k + 1;
    const Vector u = c.head(sub).normalized();
    const double radial = eta.head(sub).dot(u);
    tangent2 = (eta.head(sub) - radial * u).squaredNorm();
    normal2 = radial * radial + eta.tail(eta.size() - sub).squaredNorm();
  } else {
    tangent2 = eta.head(k).squaredNorm();
    normal2 = eta.tail(eta.size() - k).squaredNorm();
  }
  constexpr double kDeg = 180.0 / 3.14159265358979323846;
  return std::atan2(std::sqrt(tangent2), std::sqrt(normal2)) * kDeg;
}

std::optional<std::size_t> separation_sign_change(const ManifoldSpec& spec,
                                                  const std::vector<Vector>& path_samples,
                                                  NormKind norm) {
  require_arg(path_samples.size() >= 2, "a path needs at least two samples");
  require(on_manifold(path_samples.front(), spec, 0), ErrorKind::OffManifold,
          "path must start on the class-0 manifold");
  require(on_manifold(path_samples.back(), spec, 1), ErrorKind::OffManifold,
          "path must end on the class-1 manifold");
  for (std::size_t i = 0; i < path_samples.size(); ++i) {
    const Vector& p = path_samples[i];
    const double g = distance_to_class(p, spec, 0, norm) - distance_to_class(p, spec, 1, norm);
    if (i > 0 && g >= 0.0) return i;
  }
  return std::nullopt;
}

}  // namespace georob
