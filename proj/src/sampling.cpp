#include "georob/sampling.hpp"

#include "georob/nn_classifier.hpp"

#include <cmath>
#include <numbers>

namespace georob {

namespace {

const ParallelFlats& require_flats(const ManifoldSpec& spec) {
  require_arg(spec.is_flats(), "grid covers are only defined for the parallel-flats family");
  return spec.flats();
}

void check_cap(double total, double cap) {
  require(total <= cap, ErrorKind::CapExceeded,
          "grid would hold " + std::to_string(total) + " points, above the cap of " +
              std::to_string(cap));
}

// Fills rows [offset, offset + m^k) with the tensor grid of `axis` values.
void fill_grid(Points& canon, Eigen::Index offset, const std::vector<double>& axis, int k) {
  const auto m = static_cast<Eigen::Index>(axis.size());
  Eigen::Index count = 1;
  for (int i = 0; i < k; ++i) count *= m;
  for (Eigen::Index row = 0; row < count; ++row) {
    Eigen::Index rem = row;
    for (int j = k - 1; j >= 0; --j) {
      canon(offset + row, j) = axis[rem % m];
      rem /= m;
    }
  }
}

LabeledDataset grid_dataset(const ManifoldSpec& spec, const std::vector<double>& axis,
                            CoverConfig cfg, double cap) {
  const auto& f = spec.flats();
  const int k = f.flat_dim;
  const double per_class = std::pow(static_cast<double>(axis.size()), k);
  check_cap(2.0 * per_class, cap);
  const auto n = static_cast<Eigen::Index>(per_class);
  Points canon = Points::Zero(2 * n, spec.ambient_dim());
  fill_grid(canon, 0, axis, k);
  fill_grid(canon, n, axis, k);
  canon.col(spec.ambient_dim() - 1).tail(n).setConstant(f.separation);
  Labels labels(2 * n, 0);
  std::fill(labels.begin() + n, labels.end(), 1);
  return LabeledDataset{spec.to_ambient(canon), std::move(labels), spec, cfg};
}

Vector canonical_manifold_point(const ManifoldSpec& spec, int class_index, Engine& eng) {
  Vector c = Vector::Zero(spec.ambient_dim());
  if (spec.is_spheres()) {
    const auto& s = spec.spheres();
    const double r = class_index == 0 ? s.r1 : s.r2;
    if (s.sphere_dim == 1) {
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      const double t = angle(eng);
      c[0] = r * std::cos(t);
      c[1] = r * std::sin(t);
    } else {
      std::normal_distribution<double> gauss;
      double n2 = 0.0;
      do {
        for (int i = 0; i <= s.sphere_dim; ++i) c[i] = gauss(eng);
        n2 = c.head(s.sphere_dim + 1).squaredNorm();
      } while (n2 == 0.0);
      c.head(s.sphere_dim + 1) *= r / std::sqrt(n2);
    }
  } else {
    const auto& f = spec.flats();
    std::uniform_real_distribution<double> coord(f.lo, f.hi);
    for (int i = 0; i < f.flat_dim; ++i) c[i] = f.lo == f.hi ? f.lo : coord(eng);
    c[spec.ambient_dim() - 1] = class_index == 0 ? 0.0 : f.separation;
  }
  return c;
}

}  // namespace

const char* to_string(CoverScheme s) {
  switch (s) {
    case CoverScheme::GridVertices: return "grid";
    case CoverScheme::GridStrict: return "grid-strict";
    case CoverScheme::RandomUniform: return "random";
    case CoverScheme::CellCenters: return "cell-centers";
  }
  return "unknown";
}

CoverScheme parse_cover_scheme(const std::string& s) {
  if (s == "grid") return CoverScheme::GridVertices;
  if (s == "grid-strict") return CoverScheme::GridStrict;
  if (s == "random") return CoverScheme::RandomUniform;
  if (s == "cell-centers") return CoverScheme::CellCenters;
  throw Error(ErrorKind::InvalidArgument,
              "unknown cover scheme '" + s + "' (expected grid|grid-strict|random|cell-centers)");
}

Points LabeledDataset::class_points(int label) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
  Points out(static_cast<Eigen::Index>(rows.size()), points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = points.row(rows[i]);
  return out;
}

int grid_points_per_axis(const ParallelFlats& flats, double delta, bool strict) {
  require_arg(delta > 0.0, "cover radius delta must be positive");
  const double raw = std::ceil((flats.hi - flats.lo) * std::sqrt(double(flats.flat_dim)) / (2.0 * delta));
  require(raw < 1e9, ErrorKind::CapExceeded, "grid axis count overflows");
  const int m = std::max(1, static_cast<int>(raw));
  return strict ? m + 1 : m;
}

LabeledDataset grid_cover_flats(const ManifoldSpec& spec, double delta, bool strict, double cap) {
  const auto& f = require_flats(spec);
  const int m = grid_points_per_axis(f, delta, strict);
  check_cap(2.0 * std::pow(double(m), f.flat_dim), cap);
  std::vector<double> axis(m);
  for (int i = 0; i < m; ++i)
    axis[i] = m == 1 ? 0.5 * (f.lo + f.hi) : f.lo + (f.hi - f.lo) * i / double(m - 1);
  if (m > 1) axis.back() = f.hi;
  CoverConfig cfg{strict ? CoverScheme::GridStrict : CoverScheme::GridVertices, delta, 0, 0};
  return grid_dataset(spec, axis, cfg, cap);
}

LabeledDataset cell_centers_flats(const ManifoldSpec& spec, double delta, double cap) {
  const auto& f = require_flats(spec);
  const int m = grid_points_per_axis(f, delta, false);
  require_arg(m >= 2, "grid has no cells at this delta");
  check_cap(2.0 * std::pow(double(m - 1), f.flat_dim), cap);
  const double step = (f.hi - f.lo) / double(m - 1);
  std::vector<double> axis(m - 1);
  for (int i = 0; i < m - 1; ++i) axis[i] = f.lo + step * (i + 0.5);
  return grid_dataset(spec, axis, CoverConfig{CoverScheme::CellCenters, delta, 0, 0}, cap);
}

LabeledDataset random_sample(const ManifoldSpec& spec, int n_per_class, std::uint64_t seed) {
  require_arg(n_per_class >= 1, "n_per_class must be >= 1");
  const Eigen::Index n = n_per_class;
  Points canon(2 * n, spec.ambient_dim());
  Labels labels(2 * n);
  for (int cls = 0; cls < 2; ++cls) {
    Engine eng = make_engine(seed, {static_cast<std::uint64_t>(cls)});
    for (Eigen::Index i = 0; i < n; ++i) {
      canon.row(cls * n + i) = canonical_manifold_point(spec, cls, eng).transpose();
      labels[cls * n + i] = cls;
    }
  }
  return LabeledDataset{spec.to_ambient(canon), std::move(labels), spec,
                        CoverConfig{CoverScheme::RandomUniform, 0.0, n_per_class, seed}};
}

Vector sample_on_manifold(const ManifoldSpec& spec, int class_index, Engine& eng) {
  require_arg(class_index == 0 || class_index == 1, "class index must be 0 or 1");
  return spec.to_ambient(canonical_manifold_point(spec, class_index, eng));
}

Vector sample_tube_point(const ManifoldSpec& spec, int class_index, double radius, NormKind norm,
                         Engine& eng) {
  require_arg(radius >= 0.0, "tube radius must be non-negative");
  require_arg(class_index == 0 || class_index == 1, "class index must be 0 or 1");
  Vector c = canonical_manifold_point(spec, class_index, eng);
  const int d = spec.ambient_dim();
  const int k = spec.intrinsic_dim();
  if (norm == NormKind::Linf) {
    require(spec.is_flats() && !spec.rotated(), ErrorKind::Unsupported,
            "L-infinity tube sampling is only defined for unrotated flats");
    std::uniform_real_distribution<double> u(-radius, radius);
    for (int i = k; i < d; ++i) c[i] += u(eng);
    return c;
  }
  // Normal-space coordinates: for spheres the radial direction plus the axes
  // past the sphere's subspace, for flats the axes past the first k.
  const int m = d - k;
  std::normal_distribution<double> gauss;
  Vector dir(m);
  double n2 = 0.0;
  do {
    for (int i = 0; i < m; ++i) dir[i] = gauss(eng);
    n2 = dir.squaredNorm();
  } while (n2 == 0.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double len = radius * std::pow(u01(eng), 1.0 / m);
  dir *= len / std::sqrt(n2);
  if (spec.is_spheres()) {
    const int s = spec.spheres().sphere_dim + 1;
    const Vector radial = c.head(s).normalized();
    c.head(s) += dir[0] * radial;
    c.tail(d - s) += dir.tail(m - 1);
  } else {
    c.tail(m) += dir;
  }
  return spec.to_ambient(c);
}

CoverCheck verify_cover(const LabeledDataset& dataset, double delta, NormKind norm, int n_probe,
                        std::uint64_t seed) {
  require_arg(dataset.size() > 0, "cannot verify an empty cover");
  require_arg(n_probe >= 1, "need at least one probe");
  require(dataset.dim() == dataset.spec.ambient_dim(), ErrorKind::DimensionMismatch,
          "dataset width does not match its manifold spec");
  CoverCheck out;
  out.n_probe = n_probe;
  for (int cls = 0; cls < 2; ++cls) {
    const Points pts = dataset.class_points(cls);
    std::vector<int> probe_ids;
    for (int i = cls; i < n_probe; i += 2) probe_ids.push_back(i);
    if (probe_ids.empty()) continue;
    if (pts.rows() == 0) {
      out.worst_gap = std::numeric_limits<double>::infinity();
      continue;
    }
    Points probes(static_cast<Eigen::Index>(probe_ids.size()), dataset.dim());
    for (std::size_t j = 0; j < probe_ids.size(); ++j) {
      Engine eng = make_engine(seed, {stream::kProbe, static_cast<std::uint64_t>(probe_ids[j])});
      probes.row(static_cast<Eigen::Index>(j)) = sample_on_manifold(dataset.spec, cls, eng).transpose();
    }
    NnIndex index(pts, Labels(static_cast<std::size_t>(pts.rows()), cls), norm);
    for (const auto& hit : index.classify_batch(probes)) out.worst_gap = std::max(out.worst_gap, hit.distance);
  }
  out.is_cover = out.worst_gap <= delta;
  return out;
}

}  // namespace georob
