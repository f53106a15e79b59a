#pragma once

#include "georob/manifold.hpp"
#include "georob/norm.hpp"
#include "georob/rng.hpp"
#include "georob/types.hpp"

#include <cstdint>
#include <string>

namespace georob {

enum class CoverScheme {
  GridVertices,   // endpoint-inclusive grid with the published point counts
  GridStrict,     // one extra point per axis; worst gap <= delta
  RandomUniform,
  CellCenters,    // centres of the grid cells (Planes test set)
};

const char* to_string(CoverScheme s);
CoverScheme parse_cover_scheme(const std::string& s);

struct CoverConfig {
  CoverScheme scheme = CoverScheme::GridVertices;
  double delta = 0.0;
  int n_per_class = 0;
  std::uint64_t seed = 0;
};

struct LabeledDataset {
  Points points;
  Labels labels;
  ManifoldSpec spec;
  CoverConfig provenance;

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
  // Rows with the given label, in original order.
  Points class_points(int label) const;
};

inline constexpr double kDefaultGridCap = 1e7;

// Points per axis for the grid cover of [lo, hi]^k at radius delta.
int grid_points_per_axis(const ParallelFlats& flats, double delta, bool strict = false);

// Grid cover of both flats; class 0 rows first, lexicographic order within
// a class (first axis slowest).
LabeledDataset grid_cover_flats(const ManifoldSpec& spec, double delta, bool strict = false,
                                double cap = kDefaultGridCap);

// Centres of the cells of the same grid, 2 (m-1)^k points.
LabeledDataset cell_centers_flats(const ManifoldSpec& spec, double delta,
                                  double cap = kDefaultGridCap);

// Uniform random samples on both class manifolds (any family).
LabeledDataset random_sample(const ManifoldSpec& spec, int n_per_class, std::uint64_t seed);

// Uniform point on a class manifold, ambient coordinates.
Vector sample_on_manifold(const ManifoldSpec& spec, int class_index, Engine& eng);

// Manifold point plus a uniform normal-space offset of norm <= radius.
// L-infinity offsets are only defined for unrotated flats.
Vector sample_tube_point(const ManifoldSpec& spec, int class_index, double radius, NormKind norm,
                         Engine& eng);

struct CoverCheck {
  bool is_cover = false;
  double worst_gap = 0.0;
  int n_probe = 0;
};

// Monte Carlo cover check. Probe i is drawn from its own counter stream on
// class i % 2 and measured against the samples of that class.
CoverCheck verify_cover(const LabeledDataset& dataset, double delta, NormKind norm, int n_probe,
                        std::uint64_t seed);

}  // namespace georob
