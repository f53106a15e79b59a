#include "georob/dataset_io.hpp"
#include "georob/datasets.hpp"
#include "georob/report.hpp"
#include "georob/serialize.hpp"
#include "georob/svg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace georob;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void put_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_idx(const std::string& images, const std::string& labels, int n, int rows, int cols,
               int label_count = -1) {
  std::ofstream im(images, std::ios::binary);
  put_be32(im, 2051);
  put_be32(im, std::uint32_t(n));
  put_be32(im, std::uint32_t(rows));
  put_be32(im, std::uint32_t(cols));
  for (int i = 0; i < n * rows * cols; ++i) im.put(static_cast<char>(i % 256));
  std::ofstream lb(labels, std::ios::binary);
  put_be32(lb, 2049);
  const int nl = label_count < 0 ? n : label_count;
  put_be32(lb, std::uint32_t(nl));
  for (int i = 0; i < nl; ++i) lb.put(static_cast<char>(i % 10));
}

}  // namespace

TEST(Datasets, CirclesLieOnTheirCircles) {
  const auto s = make_circles(300, 11, 5, false, 100);
  EXPECT_EQ(s.train.size(), 600);
  EXPECT_EQ(s.test.size(), 200);
  EXPECT_DOUBLE_EQ(s.rch, 1.0);
  for (Eigen::Index i = 0; i < s.train.size(); ++i) {
    const double r = s.train.points.row(i).head(2).norm();
    EXPECT_NEAR(r, s.train.labels[std::size_t(i)] == 0 ? 1.0 : 3.0, 1e-12);
    EXPECT_EQ(s.train.points.row(i).tail(9).norm(), 0.0);
  }
  EXPECT_NE(s.train.points.topRows(10), s.test.points.topRows(10));
}

TEST(Datasets, RotatedCirclesKeepDistances) {
  const auto s = make_circles(50, 6, 5, true);
  ASSERT_TRUE(s.train.spec.rotated());
  for (Eigen::Index i = 0; i < s.train.size(); ++i)
    EXPECT_TRUE(on_manifold(s.train.points.row(i).transpose(), s.train.spec, s.train.labels[std::size_t(i)]));
}

TEST(Datasets, PlanesTrainIsGridTestIsCellCentres) {
  const auto p = make_planes(1.0, 12);
  EXPECT_EQ(p.train.size(), 450);
  EXPECT_EQ(p.test.size(), 2 * 14 * 14);
  EXPECT_EQ(p.train.dim(), 12);
  EXPECT_THROW(make_planes(1.0, 2), Error);
}

TEST(Datasets, EmbedPadsAndRotates) {
  const auto base = ManifoldSpec::spheres(1, 3, 1, 2);
  const auto e = embed(base, {10, true, 3});
  EXPECT_EQ(e.ambient_dim(), 10);
  EXPECT_TRUE(e.rotated());
  EXPECT_FALSE(embed(base, {10, false, 3}).rotated());
}

TEST(Idx, ParsesSyntheticFiles) {
  TempDir t("georob_idx_ok");
  write_idx(t.file("img"), t.file("lbl"), 3, 2, 2);
  const auto s = read_idx_pair(t.file("img"), t.file("lbl"), "train");
  ASSERT_EQ(s.images.rows(), 3);
  ASSERT_EQ(s.images.cols(), 4);
  EXPECT_DOUBLE_EQ(s.images(1, 2), 6.0 / 255.0);
  EXPECT_EQ(s.labels, (Labels{0, 1, 2}));
  EXPECT_EQ(take_first(s, 2).images.rows(), 2);
  EXPECT_EQ(take_first(s, 0).images.rows(), 3);
}

TEST(Idx, RejectsCorruptFiles) {
  TempDir t("georob_idx_bad");
  write_idx(t.file("img"), t.file("lbl"), 3, 2, 2, 2);
  EXPECT_THROW(read_idx_pair(t.file("img"), t.file("lbl"), "train"), Error);
  write_idx(t.file("img"), t.file("lbl"), 3, 2, 2);
  fs::resize_file(t.file("img"), fs::file_size(t.file("img")) - 1);
  EXPECT_THROW(read_idx_pair(t.file("img"), t.file("lbl"), "train"), Error);
  write_idx(t.file("img"), t.file("lbl"), 3, 2, 2);
  EXPECT_THROW(read_idx_pair(t.file("lbl"), t.file("img"), "train"), Error);
  EXPECT_THROW(read_idx_pair(t.file("nope"), t.file("lbl"), "train"), Error);
  EXPECT_FALSE(mnist_available(t.path.string()));
}

TEST(Idx, LoadsStandardLayout) {
  TempDir t("georob_idx_dir");
  write_idx(t.file("train-images-idx3-ubyte"), t.file("train-labels-idx1-ubyte"), 5, 28, 28);
  write_idx(t.file("t10k-images-idx3-ubyte"), t.file("t10k-labels-idx1-ubyte"), 2, 28, 28);
  ASSERT_TRUE(mnist_available(t.path.string()));
  const auto m = load_mnist(t.path.string());
  EXPECT_EQ(m.train.images.rows(), 5);
  EXPECT_EQ(m.test.images.cols(), 784);
  write_pgm(t.file("x.pgm"), m.test.images.row(0), 28, 28);
  EXPECT_EQ(fs::file_size(t.file("x.pgm")), std::string("P5\n28 28\n255\n").size() + 784);
}

TEST(PointsCsv, RoundTripIsBitExact) {
  TempDir t("georob_csv");
  Points p(3, 2);
  p << 0.1, 1.0 / 3.0, -1e-300, 123456789.123456789, std::nextafter(1.0, 2.0), -0.0;
  write_points_csv(t.file("p.csv"), p, {0, 1, 0});
  const auto back = read_points_csv(t.file("p.csv"));
  EXPECT_EQ(back.points, p);
  EXPECT_EQ(back.labels, (Labels{0, 1, 0}));
  std::ofstream(t.file("bad.csv")) << "x1,label\n1.0,0\nfoo,1\n";
  EXPECT_THROW(read_points_csv(t.file("bad.csv")), Error);
  std::ofstream(t.file("ragged.csv")) << "x1,x2,label\n1.0,0\n";
  EXPECT_THROW(read_points_csv(t.file("ragged.csv")), Error);
}

TEST(DatasetFiles, SidecarRestoresSpec) {
  TempDir t("georob_ds");
  const auto s = make_circles(20, 5, 1, true);
  write_dataset(t.file("d.csv"), s.train);
  const auto back = read_dataset(t.file("d.csv"));
  EXPECT_EQ(back.points, s.train.points);
  EXPECT_EQ(back.spec.ambient_dim(), 5);
  EXPECT_EQ(back.spec.rotation_seed(), s.train.spec.rotation_seed());
  EXPECT_EQ(*back.spec.rotation(), *s.train.spec.rotation());
}

TEST(Serialize, ConfigsRoundTrip) {
  TrainConfig tc;
  tc.optimizer = SgdConfig{0.2, 5, 50};
  tc.epochs = 12;
  tc.adversary = PgdConfig{0.3, 0.01, 7, NormKind::Linf, false, InputBox{0, 1}};
  const Json j = tc;
  const TrainConfig back = j.get<TrainConfig>();
  EXPECT_EQ(Json(back), j);
  const auto spec = ManifoldSpec::flats(-5, 5, 3, 9, 4.0).with_rotation(8);
  EXPECT_EQ(spec_to_json(spec_from_json(spec_to_json(spec))), spec_to_json(spec));
  EXPECT_THROW(spec_from_json(Json{{"family", "torus"}}), Error);
}

TEST(Serialize, HashAndDoubles) {
  const Json a = {{"x", 1}, {"y", "z"}};
  EXPECT_EQ(config_hash(a), config_hash(Json::parse(a.dump())));
  EXPECT_NE(config_hash(a), config_hash(Json{{"x", 2}, {"y", "z"}}));
  EXPECT_EQ(config_hash(a).size(), 16u);
  for (double v : {0.1, 1.0 / 3.0, 1e-310, 6.02214076e23})
    EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_THROW(parse_double("1.0x"), Error);
}

TEST(Report, TableCsvAndSummary) {
  TempDir t("georob_table");
  Table tab({"name", "n", "value"});
  tab.add_row({std::string("a"), std::int64_t{3}, 0.25});
  tab.add_row({std::string("b,c"), std::int64_t{4}, 1.0 / 3.0});
  EXPECT_THROW(tab.add_row({1.0}), Error);
  tab.write_csv(t.file("t.csv"));
  const Table back = Table::read_csv(t.file("t.csv"));
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.text(1, "name"), "b,c");
  EXPECT_EQ(back.number(1, "value"), 1.0 / 3.0);
  EXPECT_THROW(back.column_index("missing"), Error);
  const Summary s = summarize_values({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stdev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(summarize_values({7}).stdev, 0.0);
}

TEST(Report, WritesJsonAndCsvFiles) {
  TempDir t("georob_report");
  ExperimentReport r;
  r.experiment_id = "demo";
  r.config = {{"a", 1}};
  r.results = Table({"x"});
  r.results.add_row({1.5});
  r.aggregates = Table({"y"});
  r.version = library_version();
  r.timestamp = utc_timestamp();
  r.write(t.path.string());
  EXPECT_TRUE(fs::exists(t.file("demo_results.csv")));
  EXPECT_TRUE(fs::exists(t.file("demo_aggregates.csv")));
  std::ifstream in(t.file("demo.json"));
  const Json j = Json::parse(in);
  EXPECT_EQ(j.at("config").at("a"), 1);
  EXPECT_EQ(j.at("environment").at("version"), library_version());
}

TEST(Svg, WritesWellFormedDocuments) {
  TempDir t("georob_svg");
  Table tab({"x", "y", "g"});
  for (int i = 0; i < 5; ++i) tab.add_row({double(i), double(i * i), std::int64_t{i % 2}});
  svg::line_plot(tab, "x", "y", "g", "a < b & c", t.file("l.svg"));
  svg::heatmap(tab, "x", "g", "y", "heat", t.file("h.svg"));
  for (const char* f : {"l.svg", "h.svg"}) {
    std::ifstream in(t.file(f));
    const std::string s((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(s.rfind("<svg", 0) == 0 || s.rfind("<?xml", 0) == 0, true);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
    EXPECT_EQ(s.find("a < b"), std::string::npos);
  }
}
