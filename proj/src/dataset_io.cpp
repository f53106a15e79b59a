#include "georob/dataset_io.hpp"

#include "georob/serialize.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace georob {

void write_points_csv(const std::string& path, const Points& points, const Labels& labels) {
  require(static_cast<Eigen::Index>(labels.size()) == points.rows(), ErrorKind::DimensionMismatch,
          "label count does not match point count");
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path);
  for (Eigen::Index j = 0; j < points.cols(); ++j) out << 'x' << (j + 1) << ',';
  out << "label\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) out << format_double(points(i, j)) << ',';
    out << labels[static_cast<std::size_t>(i)] << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path);
}

PointTable read_points_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Format, path + ": missing header");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
  require(cols >= 1 && line.rfind("label") == line.size() - 5, ErrorKind::Format,
          path + ": header must be x1..xd,label");
  std::vector<double> values;
  Labels labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string_view rest(line);
    for (Eigen::Index j = 0; j <= cols; ++j) {
      const auto comma = rest.find(',');
      const bool last = j == cols;
      require(last == (comma == std::string_view::npos), ErrorKind::Format,
              path + ":" + std::to_string(line_no) + ": wrong field count");
      const std::string_view field = last ? rest : rest.substr(0, comma);
      if (last) {
        labels.push_back(static_cast<int>(parse_double(field)));
      } else {
        values.push_back(parse_double(field));
        rest.remove_prefix(comma + 1);
      }
    }
  }
  PointTable t;
  t.points = Eigen::Map<Points>(values.data(), static_cast<Eigen::Index>(labels.size()), cols);
  t.labels = std::move(labels);
  return t;
}

void write_dataset(const std::string& path, const LabeledDataset& dataset) {
  write_points_csv(path, dataset.points, dataset.labels);
  Json side = {{"spec", spec_to_json(dataset.spec)}, {"provenance", dataset.provenance},
               {"rows", dataset.size()}};
  std::ofstream out(path + ".json");
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path + ".json");
  out << side.dump(2) << '\n';
}

LabeledDataset read_dataset(const std::string& path) {
  PointTable t = read_points_csv(path);
  std::ifstream in(path + ".json");
  require(static_cast<bool>(in), ErrorKind::Io, "missing sidecar " + path + ".json");
  Json side;
  try {
    side = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Format, path + ".json: " + e.what());
  }
  ManifoldSpec spec = spec_from_json(side.at("spec"));
  require(spec.ambient_dim() == t.points.cols(), ErrorKind::Format,
          path + ": column count does not match the sidecar spec");
  CoverConfig cfg = side.value("provenance", CoverConfig{});
  return LabeledDataset{std::move(t.points), std::move(t.labels), std::move(spec), cfg};
}

}  // namespace georob
