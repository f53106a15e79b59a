#include "georob/bounds.hpp"

#include "georob/manifold.hpp"
#include "georob/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace georob {

namespace {

constexpr double kPi = std::numbers::pi;

BoundResult make_result(FormulaId id, double log_value, std::map<std::string, double> inputs) {
  BoundResult r;
  r.formula = id;
  r.log_value = log_value;
  r.value = std::exp(log_value);
  r.inputs = std::move(inputs);
  return r;
}

void check_codim(int k, int d) {
  require_arg(k >= 1 && k < d, "need 1 <= k < d (got k=" + std::to_string(k) +
                                   ", d=" + std::to_string(d) + ")");
}

}  // namespace

const char* to_string(FormulaId id) {
  switch (id) {
    case FormulaId::LinfAxisOffset: return "linf_axis_offset";
    case FormulaId::NnCover: return "nn_cover";
    case FormulaId::BallLearnerCover: return "l_cover";
    case FormulaId::NnNoiseCover: return "nn_noise_cover";
    case FormulaId::SamplingGapRatio: return "sampling_gap_ratio";
    case FormulaId::CoverageRatio: return "coverage_ratio";
    case FormulaId::PlaneCoverage: return "plane_coverage";
    case FormulaId::TubeCoverLowerBound: return "tube_cover_lower_bound";
    case FormulaId::SphereCoverage: return "sphere_coverage";
    case FormulaId::SegmentCount: return "segment_count";
    case FormulaId::LinearRegion: return "linear_region";
    case FormulaId::MedialProximity: return "medial_proximity";
  }
  return "unknown";
}

double log_gamma_ratio(double a, double b) {
  const double diff = a - b;
  const double n = std::round(diff);
  if (std::abs(diff - n) == 0.0 && std::abs(n) <= 256.0 && std::min(a, b) > 0.0) {
    // Gamma(b + n) / Gamma(b) = prod_{i<n} (b + i)
    const double base = n >= 0 ? b : a;
    const int count = static_cast<int>(std::abs(n));
    double acc = 0.0;
    double prod = 1.0;
    for (int i = 0; i < count; ++i) {
      prod *= base + i;
      if (prod > 1e280) {
        acc += std::log(prod);
        prod = 1.0;
      }
    }
    acc += std::log(prod);
    return n >= 0 ? acc : -acc;
  }
  return std::lgamma(a) - std::lgamma(b);
}

double linf_axis_offset(double r1, double r2, int d) {
  require_arg(r1 > 0.0 && r1 < r2, "linf_axis_offset needs 0 < r1 < r2");
  require_arg(d >= 1, "linf_axis_offset needs d >= 1");
  const double dd = static_cast<double>(d);
  const double disc = r1 * r1 + 3.0 * r2 * r2 + dd * (r2 * r2 - r1 * r1);
  return (-2.0 * r1 + std::sqrt(disc)) / (dd + 3.0);
}

double nn_cover_bound(double rch, double eps) {
  require_arg(eps >= 0.0 && eps < rch,
              "eps must satisfy 0 <= eps < rch; no robust classifier is guaranteed otherwise");
  return 2.0 * (rch - eps);
}

double l_cover_bound(double rch, double eps) {
  require_arg(eps >= 0.0 && eps < rch,
              "eps must satisfy 0 <= eps < rch; no robust classifier is guaranteed otherwise");
  return rch - eps;
}

double nn_noise_cover_bound(double rch, double eps, double tau) {
  require_arg(tau >= 0.0 && tau < rch, "Hausdorff noise must satisfy 0 <= tau < rch");
  require_arg(eps >= 0.0 && eps < rch, "eps must satisfy 0 <= eps < rch");
  const double bound = 2.0 * (rch - eps) - tau;
  require_arg(bound > 0.0, "noisy cover bound 2(rch - eps) - tau = " + std::to_string(bound) +
                               " is not positive; noise swamps the margin");
  return bound;
}

double sampling_gap_ratio(int k, double eps) {
  require_arg(k >= 1, "sampling_gap_ratio needs k >= 1");
  require_arg(eps >= 0.0 && eps <= 1.0, "sampling_gap_ratio needs eps in [0, 1]");
  const double kk = static_cast<double>(k);
  const double ratio = std::pow(2.0, kk) * std::pow(1.0 + eps, -kk / 2.0);
  const double floor = std::pow(2.0, kk / 2.0);
  if (ratio < floor * (1.0 - 1e-14)) {
    throw std::logic_error("sampling_gap_ratio fell below 2^(k/2)");
  }
  return ratio;
}

BoundResult coverage_ratio_bound(int k, int d, double eps, double vol_k_manifold, double n_samples) {
  check_codim(k, d);
  require_arg(eps > 0.0, "coverage_ratio_bound needs eps > 0");
  require_arg(vol_k_manifold > 0.0, "manifold volume must be positive");
  require_arg(n_samples >= 1.0, "need at least one sample");
  const double kk = k;
  const double log_value = 0.5 * kk * std::log(kPi) +
                           log_gamma_ratio(0.5 * (d - k) + 1.0, 0.5 * d + 1.0) +
                           kk * std::log(eps) + std::log(n_samples) - std::log(vol_k_manifold);
  return make_result(FormulaId::CoverageRatio, log_value,
                     {{"k", kk}, {"d", double(d)}, {"eps", eps}, {"vol", vol_k_manifold},
                      {"n", n_samples}});
}

BoundResult plane_coverage_bound(int k, int d) {
  check_codim(k, d);
  const double kk = k;
  const double log_value = 0.5 * kk * std::log(kPi) +
                           log_gamma_ratio(0.5 * (d - k) + 1.0, 0.5 * d + 1.0) +
                           kk * std::log(std::sqrt(kk) / 2.0);
  return make_result(FormulaId::PlaneCoverage, log_value, {{"k", kk}, {"d", double(d)}});
}

BoundResult tube_cover_sample_lower_bound(int k, int d, double lo, double hi) {
  check_codim(k, d);
  require_arg(lo < hi, "tube_cover_sample_lower_bound needs lo < hi");
  const double kk = k;
  const double log_value = -0.5 * kk * std::log(kPi) +
                           log_gamma_ratio(0.5 * d + 1.0, 0.5 * (d - k) + 1.0) +
                           kk * std::log(hi - lo);
  return make_result(FormulaId::TubeCoverLowerBound, log_value,
                     {{"k", kk}, {"d", double(d)}, {"lo", lo}, {"hi", hi}});
}

BoundResult sphere_coverage_bound(double n, int d, double eps) {
  require_arg(eps > 0.0, "sphere_coverage_bound needs eps > 0");
  require_arg(eps <= 1.0, "sphere_coverage_bound needs eps <= 1 (the tube passes the centre beyond)");
  require_arg(d >= 1, "sphere_coverage_bound needs d >= 1");
  require_arg(n >= 1.0, "need at least one sample");
  const double dd = d;
  // (1+e)^d - (1-e)^d = (1+e)^d (1 - q^d),  q = (1-e)/(1+e)
  const double q = (1.0 - eps) / (1.0 + eps);
  const double log_denominator = dd * std::log1p(eps) + std::log1p(-std::pow(q, dd));
  const double log_value = std::log(n) + dd * std::log(eps) - log_denominator;
  return make_result(FormulaId::SphereCoverage, log_value,
                     {{"n", n}, {"d", dd}, {"eps", eps}});
}

BoundResult linear_region_lower_bound(double r1, double rch, double tau, int d) {
  require_arg(tau > 0.0, "linear_region_lower_bound diverges at tau = 0");
  require_arg(tau <= rch, "linear_region_lower_bound needs tau <= rch");
  require_arg(r1 > 0.0, "inner radius must be positive");
  require_arg(d >= 2, "linear_region_lower_bound needs d >= 2");
  const double dd = d;
  const double log_value = std::log(2.0) + 0.5 * std::log(kPi) +
                           log_gamma_ratio(0.5 * (dd + 1.0), 0.5 * dd) +
                           0.5 * (dd - 1.0) * std::log((r1 + rch) / (4.0 * tau));
  return make_result(FormulaId::LinearRegion, log_value,
                     {{"r1", r1}, {"rch", rch}, {"tau", tau}, {"d", dd}});
}

double segment_count_lower_bound(double r1, double r2, double eps) {
  require_arg(r1 > 0.0 && r1 < r2, "segment_count_lower_bound needs 0 < r1 < r2");
  require_arg(eps >= 0.0, "eps must be non-negative");
  require_arg(r1 + eps < r2 - eps, "gap closed (r1 + eps >= r2 - eps); bound diverges");
  constexpr double kGuard = 1e-12;
  double arg = (r1 + eps) / (r2 - eps);
  require_arg(arg <= 1.0 + kGuard && arg >= -1.0 - kGuard,
              "arccos argument outside [-1, 1] beyond the guard band");
  arg = std::clamp(arg, -1.0, 1.0);
  const double angle = std::acos(arg);
  require_arg(angle > 0.0, "gap closed; bound diverges");
  return kPi / angle;
}

MedialProximity medial_proximity_bound(double delta, double omega1, double omega2, double rch) {
  require_arg(delta >= 0.0 && delta < 1.0, "medial_proximity_bound needs 0 <= delta < 1");
  require_arg(omega1 >= 0.0 && omega1 <= omega2 && omega2 < 1.0,
              "medial_proximity_bound needs 0 <= omega1 <= omega2 < 1");
  require_arg(rch > 0.0, "reach must be positive");
  const double gap = omega2 * omega2 - omega1 * omega1;
  MedialProximity m;
  m.t_star = (delta * delta + gap + 2.0 * delta * omega2) / (1.0 + gap);
  m.dist_bound = m.t_star * omega2 * rch;
  return m;
}

AccuracyBoundEstimate accuracy_upper_bound_mc(const Vector& box_lo, const Vector& box_hi,
                                              const RegionTest& in_first,
                                              const RegionTest& in_second, std::uint64_t n_mc,
                                              std::uint64_t seed, std::uint64_t block) {
  require(box_lo.size() == box_hi.size(), ErrorKind::DimensionMismatch, "box corners differ in size");
  require_arg(n_mc >= 1 && block >= 1, "need at least one Monte Carlo sample");
  AccuracyBoundEstimate est;
  est.n_samples = n_mc;
  const Eigen::Index d = box_lo.size();
  Vector x(d);
  for (std::uint64_t start = 0, b = 0; start < n_mc; start += block, ++b) {
    Engine eng = make_engine(seed, {stream::kMonteCarlo, b});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::uint64_t end = std::min(n_mc, start + block);
    for (std::uint64_t i = start; i < end; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x[j] = box_lo[j] + (box_hi[j] - box_lo[j]) * unif(eng);
      const bool a = in_first(x);
      const bool c = in_second(x);
      est.n_union += (a || c) ? 1 : 0;
      est.n_intersection += (a && c) ? 1 : 0;
    }
  }
  require_arg(est.n_union > 0, "no Monte Carlo sample landed in the union of tubes; increase n_mc");
  const double p = static_cast<double>(est.n_intersection) / static_cast<double>(est.n_union);
  est.value = 1.0 - 0.5 * p;
  est.std_error = 0.5 * std::sqrt(p * (1.0 - p) / static_cast<double>(est.n_union));
  return est;
}

AccuracyBoundEstimate accuracy_upper_bound_mc(const ManifoldSpec& spec, double eps, NormKind norm,
                                              std::uint64_t n_mc, std::uint64_t seed,
                                              std::uint64_t block) {
  require_arg(eps > 0.0, "accuracy_upper_bound_mc needs eps > 0");
  require(norm == NormKind::L2 || !spec.rotated(), ErrorKind::Unsupported,
          "L-infinity tubes are only defined here for unrotated specs");
  // Sample in canonical coordinates; L2 tube volumes are rotation invariant.
  const ManifoldSpec canonical = spec.with_ambient_dim(spec.ambient_dim());
  const int d = spec.ambient_dim();
  Vector lo = Vector::Constant(d, -eps);
  Vector hi = Vector::Constant(d, eps);
  if (spec.is_spheres()) {
    const auto& s = spec.spheres();
    for (int i = 0; i <= s.sphere_dim; ++i) {
      lo[i] = -(s.r2 + eps);
      hi[i] = s.r2 + eps;
    }
  } else {
    const auto& f = spec.flats();
    for (int i = 0; i < f.flat_dim; ++i) {
      lo[i] = f.lo - eps;
      hi[i] = f.hi + eps;
    }
    hi[d - 1] = f.separation + eps;
  }
  auto tube = [&](int cls) {
    return [&canonical, eps, norm, cls](const Vector& x) {
      return distance_to_class(x, canonical, cls, norm) <= eps;
    };
  };
  return accuracy_upper_bound_mc(lo, hi, tube(0), tube(1), n_mc, seed, block);
}

}  // namespace georob
