#include "georob/datasets.hpp"

#include "georob/rng.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

namespace georob {

ManifoldSpec embed(const ManifoldSpec& base, const CodimEmbedding& emb) {
  require_arg(emb.target_ambient_dim >= base.intrinsic_dim() + 1,
              "target ambient dimension must exceed the intrinsic dimension");
  ManifoldSpec out = base.with_ambient_dim(emb.target_ambient_dim);
  if (emb.rotate) out = out.with_rotation(derive_seed(emb.seed, {stream::kRotation}));
  return out;
}

SplitDataset make_circles(int n_per_class, int ambient_dim, std::uint64_t seed, bool rotate,
                          int test_per_class) {
  const ManifoldSpec spec = embed(ManifoldSpec::spheres(1.0, 3.0, 1, 2),
                                  CodimEmbedding{ambient_dim, rotate, seed});
  const int n_test = test_per_class > 0 ? test_per_class : n_per_class;
  SplitDataset out{random_sample(spec, n_per_class, derive_seed(seed, {stream::kTrainData})),
                   random_sample(spec, n_test, derive_seed(seed, {stream::kTestData})),
                   summarize(spec).reach_l2_decision_axis};
  return out;
}

SplitDataset make_planes(double delta, int ambient_dim, bool rotate, std::uint64_t seed, bool strict) {
  require_arg(ambient_dim >= 3, "Planes need ambient dimension >= 3");
  const ManifoldSpec spec = embed(ManifoldSpec::flats(-10.0, 10.0, 2, 3, 2.0),
                                  CodimEmbedding{ambient_dim, rotate, seed});
  SplitDataset out{grid_cover_flats(spec, delta, strict), cell_centers_flats(spec, delta),
                   summarize(spec).reach_l2_decision_axis};
  return out;
}

namespace {

std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_size(const std::string& path, std::size_t expected, std::size_t actual) {
  require(actual >= expected, ErrorKind::Format,
          path + " is truncated: expected " + std::to_string(expected) + " bytes, found " +
              std::to_string(actual));
  require(actual == expected, ErrorKind::Format,
          path + " has trailing data: expected " + std::to_string(expected) + " bytes, found " +
              std::to_string(actual));
}

}  // namespace

MnistSet read_idx_pair(const std::string& images_path, const std::string& labels_path,
                       const std::string& split) {
  const auto img = slurp(images_path);
  require(img.size() >= 16, ErrorKind::Format,
          images_path + " is truncated: expected at least 16 header bytes, found " +
              std::to_string(img.size()));
  const std::uint32_t img_magic = read_be32(img.data());
  require(img_magic == 2051, ErrorKind::Format,
          images_path + ": bad magic " + std::to_string(img_magic) + " (expected 2051)");
  const std::uint32_t n = read_be32(img.data() + 4);
  const std::uint32_t rows = read_be32(img.data() + 8);
  const std::uint32_t cols = read_be32(img.data() + 12);
  check_size(images_path, 16 + std::size_t(n) * rows * cols, img.size());

  const auto lab = slurp(labels_path);
  require(lab.size() >= 8, ErrorKind::Format,
          labels_path + " is truncated: expected at least 8 header bytes, found " +
              std::to_string(lab.size()));
  const std::uint32_t lab_magic = read_be32(lab.data());
  require(lab_magic == 2049, ErrorKind::Format,
          labels_path + ": bad magic " + std::to_string(lab_magic) + " (expected 2049)");
  const std::uint32_t n_labels = read_be32(lab.data() + 4);
  check_size(labels_path, 8 + std::size_t(n_labels), lab.size());
  require(n == n_labels, ErrorKind::Format,
          "image count " + std::to_string(n) + " != label count " + std::to_string(n_labels));

  MnistSet set;
  set.split = split;
  set.rows = static_cast<int>(rows);
  set.cols = static_cast<int>(cols);
  const std::size_t px = std::size_t(rows) * cols;
  set.images.resize(n, static_cast<Eigen::Index>(px));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < px; ++j)
      set.images(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = img[16 + i * px + j] / 255.0;
  set.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    set.labels[i] = lab[8 + i];
    require(set.labels[i] <= 9, ErrorKind::Format, labels_path + ": label out of range 0-9");
  }
  return set;
}

namespace {
constexpr std::array<const char*, 4> kMnistFiles = {
    "train-images-idx3-ubyte", "train-labels-idx1-ubyte", "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte"};
}

bool mnist_available(const std::string& dir) {
  if (dir.empty()) return false;
  for (const char* f : kMnistFiles)
    if (!std::filesystem::exists(std::filesystem::path(dir) / f)) return false;
  return true;
}

Mnist load_mnist(const std::string& dir) {
  require(mnist_available(dir), ErrorKind::Io, "MNIST IDX files not found in '" + dir + "'");
  const auto p = [&](int i) { return (std::filesystem::path(dir) / kMnistFiles[i]).string(); };
  return {read_idx_pair(p(0), p(1), "train"), read_idx_pair(p(2), p(3), "test")};
}

MnistSet take_first(const MnistSet& set, int n) {
  if (n <= 0 || n >= set.images.rows()) return set;
  MnistSet out = set;
  out.images = set.images.topRows(n);
  out.labels.assign(set.labels.begin(), set.labels.begin() + n);
  return out;
}

void write_pgm(const std::string& path, const Eigen::RowVectorXd& pixels, int rows, int cols) {
  require(pixels.size() == rows * cols, ErrorKind::DimensionMismatch, "pixel count mismatch");
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path);
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  for (Eigen::Index i = 0; i < pixels.size(); ++i) {
    const double v = std::clamp(pixels[i], 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
}

}  // namespace georob
