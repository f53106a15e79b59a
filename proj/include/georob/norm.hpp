#pragma once

#include "georob/types.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace georob {

enum class NormKind { L2, Linf };

inline const char* to_string(NormKind n) { return n == NormKind::L2 ? "l2" : "linf"; }

inline NormKind parse_norm(std::string_view s) {
  if (s == "l2" || s == "L2" || s == "2") return NormKind::L2;
  if (s == "linf" || s == "Linf" || s == "inf" || s == "Linfty") return NormKind::Linf;
  throw Error(ErrorKind::InvalidArgument, "unknown norm '" + std::string(s) + "' (expected l2|linf)");
}

template <typename Derived>
double norm(const Eigen::MatrixBase<Derived>& v, NormKind kind) {
  if (v.size() == 0) return 0.0;
  return kind == NormKind::L2 ? v.norm() : v.cwiseAbs().maxCoeff();
}

template <typename A, typename B>
double distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, NormKind kind) {
  return norm(a - b, kind);
}

// Projects a perturbation onto the closed ball of radius `radius`. The L2
// branch only rescales when the excess is above rounding noise, so a step that
// already sits on the sphere passes through bit-for-bit.
template <typename Derived>
void project_to_ball(Eigen::MatrixBase<Derived>& delta, double radius, NormKind kind) {
  if (kind == NormKind::Linf) {
    delta = delta.cwiseMax(-radius).cwiseMin(radius);
    return;
  }
  const double n = delta.norm();
  if (n > radius * (1.0 + 1e-12) && n > 0.0) delta *= radius / n;
}

}  // namespace georob
