#pragma once

#include "georob/attacks.hpp"
#include "georob/manifold.hpp"
#include "georob/mlp.hpp"
#include "georob/norm.hpp"
#include "georob/sampling.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace georob {

using Json = nlohmann::json;

void to_json(Json& j, NormKind n);
void from_json(const Json& j, NormKind& n);

Json spec_to_json(const ManifoldSpec& spec);
ManifoldSpec spec_from_json(const Json& j);

void to_json(Json& j, const CoverConfig& c);
void from_json(const Json& j, CoverConfig& c);

void to_json(Json& j, const InputBox& b);
void from_json(const Json& j, InputBox& b);

void to_json(Json& j, const PgdConfig& c);
void from_json(const Json& j, PgdConfig& c);

void to_json(Json& j, const TrainConfig& c);
void from_json(const Json& j, TrainConfig& c);

void to_json(Json& j, const NnWalkConfig& c);
void from_json(const Json& j, NnWalkConfig& c);

// FNV-1a over the compact dump, as 16 hex digits.
std::string config_hash(const Json& j);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace georob
