#include "georob/report.hpp"

#include "georob/serialize.hpp"
#include "georob/types.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace georob {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  require(row.size() == columns_.size(), ErrorKind::DimensionMismatch,
          "row has " + std::to_string(row.size()) + " cells, table has " +
              std::to_string(columns_.size()) + " columns");
  rows_.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw Error(ErrorKind::InvalidArgument, "no column named '" + name + "'");
}

double Table::number(std::size_t row, const std::string& column) const {
  const Cell& c = rows_.at(row).at(column_index(column));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw Error(ErrorKind::Format, "column '" + column + "' is not numeric");
}

std::string Table::text(std::size_t row, const std::string& column) const {
  return cell_text(rows_.at(row).at(column_index(column)));
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

namespace {
std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}
}  // namespace

void Table::write_csv(const std::string& path) const {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path);
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << csv_quote(columns_[i]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_quote(cell_text(row[i]));
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path);
}

nlohmann::json Table::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rows_) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit([&](const auto& v) { r[columns_[i]] = v; }, row[i]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') out.back() += c;
      else if (i + 1 < line.size() && line[i + 1] == '"') out.back() += line[++i];
      else quoted = false;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  require(!quoted, ErrorKind::Format, "unterminated quote in CSV line");
  return out;
}
}  // namespace

Table Table::read_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Format, path + ": empty file");
  Table t(split_csv_line(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (auto& field : split_csv_line(line)) {
      try {
        row.emplace_back(parse_double(field));
      } catch (const Error&) {
        row.emplace_back(field);
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

Summary summarize_values(const std::vector<double>& values) {
  Summary s;
  s.n = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

nlohmann::json ExperimentReport::to_json() const {
  return {{"experiment_id", experiment_id},
          {"config", config},
          {"results", results.to_json()},
          {"aggregates", aggregates.to_json()},
          {"summary", summary},
          {"environment", {{"version", version}, {"timestamp", timestamp}}},
          {"runtime_seconds", runtime_seconds}};
}

void ExperimentReport::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream out(base / (experiment_id + ".json"));
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write report into " + dir);
    out << to_json().dump(2) << '\n';
  }
  results.write_csv((base / (experiment_id + "_results.csv")).string());
  if (!aggregates.columns().empty())
    aggregates.write_csv((base / (experiment_id + "_aggregates.csv")).string());
}

const char* library_version() { return "georob 0.1.0"; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace georob
