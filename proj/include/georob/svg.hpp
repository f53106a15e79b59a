#pragma once

#include "georob/report.hpp"

#include <string>

namespace georob::svg {

// One polyline per distinct value of `group_column` (or a single line when
// it is empty).
void line_plot(const Table& data, const std::string& x_column, const std::string& y_column,
               const std::string& group_column, const std::string& title, const std::string& path);

// Cells coloured by `value_column` on the (x, y) lattice found in the data.
void heatmap(const Table& data, const std::string& x_column, const std::string& y_column,
             const std::string& value_column, const std::string& title, const std::string& path);

}  // namespace georob::svg
