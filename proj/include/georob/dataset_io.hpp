#pragma once

#include "georob/sampling.hpp"
#include "georob/types.hpp"

#include <string>

namespace georob {

// CSV with header x1..xd,label; doubles in shortest round-trip form.
void write_points_csv(const std::string& path, const Points& points, const Labels& labels);

struct PointTable {
  Points points;
  Labels labels;
};

PointTable read_points_csv(const std::string& path);

// CSV plus `<path>.json` holding the manifold spec and cover config.
void write_dataset(const std::string& path, const LabeledDataset& dataset);
LabeledDataset read_dataset(const std::string& path);

}  // namespace georob
