#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace georob {

using Cell = std::variant<double, std::int64_t, std::string>;

// Column-named rows; numbers are written in shortest round-trip form.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  std::size_t column_index(const std::string& name) const;

  double number(std::size_t row, const std::string& column) const;
  std::string text(std::size_t row, const std::string& column) const;

  void write_csv(const std::string& path) const;
  nlohmann::json to_json() const;
  // Reads a CSV written by write_csv; numeric-looking fields become doubles.
  static Table read_csv(const std::string& path);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string cell_text(const Cell& c);

struct Summary {
  std::int64_t n = 0;
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation, 0 for n < 2
};

Summary summarize_values(const std::vector<double>& values);

struct ExperimentReport {
  std::string experiment_id;
  nlohmann::json config;
  Table results;
  Table aggregates;
  nlohmann::json summary = nlohmann::json::object();
  std::string version;
  std::string timestamp;
  double runtime_seconds = 0.0;

  nlohmann::json to_json() const;
  // <dir>/<id>.json, <dir>/<id>_results.csv, <dir>/<id>_aggregates.csv
  void write(const std::string& dir) const;
};

const char* library_version();
std::string utc_timestamp();

}  // namespace georob
