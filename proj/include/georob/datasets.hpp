#pragma once

#include "georob/manifold.hpp"
#include "georob/sampling.hpp"
#include "georob/types.hpp"

#include <cstdint>
#include <string>

namespace georob {

struct CodimEmbedding {
  int target_ambient_dim = 2;
  bool rotate = false;
  std::uint64_t seed = 0;
};

ManifoldSpec embed(const ManifoldSpec& base, const CodimEmbedding& emb);

struct SplitDataset {
  LabeledDataset train;
  LabeledDataset test;
  double rch = 0.0;
};

inline constexpr int kCirclesPerClass = 1000;

// Circles r1 = 1, r2 = 3 in the x1-x2 plane, zero padded to ambient_dim.
// Train and test draw from distinct streams of `seed`.
SplitDataset make_circles(int n_per_class, int ambient_dim, std::uint64_t seed, bool rotate = false,
                          int test_per_class = 0);

// Planes x_d = 0 and x_d = 2 over [-10, 10]^2; train = grid vertices,
// test = cell centres.
SplitDataset make_planes(double delta, int ambient_dim, bool rotate = false, std::uint64_t seed = 0,
                         bool strict = false);

struct MnistSet {
  Points images;  // n x (rows * cols), values byte / 255
  Labels labels;
  std::string split;
  int rows = 28;
  int cols = 28;
};

struct Mnist {
  MnistSet train;
  MnistSet test;
};

// Reads the four standard IDX files (train-/t10k- images-idx3 / labels-idx1
// -ubyte) from `dir`.
Mnist load_mnist(const std::string& dir);
bool mnist_available(const std::string& dir);

MnistSet read_idx_pair(const std::string& images_path, const std::string& labels_path,
                       const std::string& split);

// First `n` rows (or all when n <= 0 or n exceeds the set).
MnistSet take_first(const MnistSet& set, int n);

void write_pgm(const std::string& path, const Eigen::RowVectorXd& pixels, int rows, int cols);

}  // namespace georob
