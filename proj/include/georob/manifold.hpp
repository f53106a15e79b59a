#pragma once

#include "georob/norm.hpp"
#include "georob/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace georob {

// Two concentric k-spheres living in the first k+1 coordinates.
// Class 0 is the inner sphere (radius r1), class 1 the outer one.
struct ConcentricSpheres {
  double r1 = 1.0;
  double r2 = 3.0;
  int sphere_dim = 1;
};

// Two bounded k-flats: [lo,hi]^k in the first k coordinates, zero in the
// middle coordinates, and last coordinate 0 (class 0) or `separation` (class 1).
struct ParallelFlats {
  double lo = -10.0;
  double hi = 10.0;
  int flat_dim = 2;
  double separation = 2.0;
};

using ManifoldFamily = std::variant<ConcentricSpheres, ParallelFlats>;

// Analytic two-class data manifold embedded in R^ambient_dim. Canonical
// coordinates are the zero-padded layout described above; when a rotation
// seed is set, ambient points are R * canonical for a seeded orthogonal R.
class ManifoldSpec {
 public:
  static ManifoldSpec spheres(double r1, double r2, int sphere_dim, int ambient_dim);
  static ManifoldSpec flats(double lo, double hi, int flat_dim, int ambient_dim,
                            double separation = 2.0);

  ManifoldSpec(ManifoldFamily family, int ambient_dim,
               std::optional<std::uint64_t> rotation_seed = std::nullopt);

  const ManifoldFamily& family() const { return family_; }
  int ambient_dim() const { return ambient_dim_; }
  int intrinsic_dim() const;
  int codimension() const { return ambient_dim_ - intrinsic_dim(); }
  static constexpr int class_count() { return 2; }

  bool is_spheres() const { return std::holds_alternative<ConcentricSpheres>(family_); }
  bool is_flats() const { return std::holds_alternative<ParallelFlats>(family_); }
  const ConcentricSpheres& spheres() const { return std::get<ConcentricSpheres>(family_); }
  const ParallelFlats& flats() const { return std::get<ParallelFlats>(family_); }

  std::optional<std::uint64_t> rotation_seed() const { return rotation_seed_; }
  bool rotated() const { return rotation_ != nullptr; }
  // Orthogonal d x d matrix, or nullptr for the identity.
  const Eigen::MatrixXd* rotation() const { return rotation_.get(); }

  Vector to_canonical(const Vector& ambient) const;
  Vector to_ambient(const Vector& canonical) const;
  Points to_ambient(const Points& canonical) const;

  // Same family at a different ambient dimension (zero padding), no rotation.
  ManifoldSpec with_ambient_dim(int ambient_dim) const;
  ManifoldSpec with_rotation(std::uint64_t seed) const;

  std::string describe() const;

 private:
  void validate() const;

  ManifoldFamily family_;
  int ambient_dim_ = 0;
  std::optional<std::uint64_t> rotation_seed_;
  std::shared_ptr<const Eigen::MatrixXd> rotation_;
};

// Haar-distributed orthogonal matrix from QR of a seeded Gaussian matrix.
Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed);

struct GeometrySummary {
  double reach_l2_decision_axis = 0.0;
  // Only for the sphere family: L2 distance from the inner sphere to the
  // L-infinity decision axis along a coordinate pole.
  std::optional<double> reach_linf_decision_axis_l2;
  int codimension = 0;
};

GeometrySummary summarize(const ManifoldSpec& spec);

// rch_p(Lambda_p): the reach of the decision axis under `norm`.
// L-infinity is only available for unrotated flats.
double decision_axis_reach(const ManifoldSpec& spec, NormKind norm);

double distance_to_class(const Vector& point, const ManifoldSpec& spec, int class_index,
                         NormKind norm);

bool in_tube(const Vector& point, const ManifoldSpec& spec, int class_index, double eps,
             NormKind norm);

// Closest point on the class manifold in the L2 sense.
Vector nearest_point_l2(const Vector& point, const ManifoldSpec& spec, int class_index);

inline constexpr double kOnManifoldTolerance = 1e-6;

bool on_manifold(const Vector& point, const ManifoldSpec& spec, int class_index,
                 double tol = kOnManifoldTolerance);

// Class whose manifold contains `point` within tolerance, if any.
std::optional<int> manifold_class_of(const Vector& point, const ManifoldSpec& spec,
                                     double tol = kOnManifoldTolerance);

// Orthonormal basis (as columns, ambient coordinates) of the normal space
// N_x M at an on-manifold base point.
Eigen::MatrixXd normal_basis(const Vector& base_point, const ManifoldSpec& spec);

// Angle in degrees between a perturbation and its projection onto N_x M.
double normal_space_angle(const Vector& perturbation, const Vector& base_point,
                          const ManifoldSpec& spec);

// First sample index at which g = d(., M1) - d(., M2) changes sign along a
// polyline from M1 to M2.
std::optional<std::size_t> separation_sign_change(const ManifoldSpec& spec,
                                                  const std::vector<Vector>& path_samples,
                                                  NormKind norm = NormKind::L2);

}  // namespace georob
