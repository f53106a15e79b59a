#include "georob/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace georob {

void to_json(Json& j, NormKind n) { j = to_string(n); }
void from_json(const Json& j, NormKind& n) { n = parse_norm(j.get<std::string>()); }

Json spec_to_json(const ManifoldSpec& spec) {
  Json j;
  if (spec.is_spheres()) {
    const auto& s = spec.spheres();
    j = {{"family", "spheres"}, {"r1", s.r1}, {"r2", s.r2}, {"sphere_dim", s.sphere_dim}};
  } else {
    const auto& f = spec.flats();
    j = {{"family", "flats"}, {"lo", f.lo}, {"hi", f.hi}, {"flat_dim", f.flat_dim},
         {"separation", f.separation}};
  }
  j["ambient_dim"] = spec.ambient_dim();
  j["codimension"] = spec.codimension();
  if (spec.rotation_seed()) {
    j["rotation_seed"] = *spec.rotation_seed();
  } else {
    j["rotation_seed"] = nullptr;
  }
  return j;
}

ManifoldSpec spec_from_json(const Json& j) {
  try {
    const std::string family = j.at("family").get<std::string>();
    const int d = j.at("ambient_dim").get<int>();
    std::optional<std::uint64_t> rot;
    if (j.contains("rotation_seed") && !j.at("rotation_seed").is_null())
      rot = j.at("rotation_seed").get<std::uint64_t>();
    if (family == "spheres") {
      return ManifoldSpec(ConcentricSpheres{j.value("r1", 1.0), j.value("r2", 3.0), j.value("sphere_dim", 1)},
                          d, rot);
    }
    if (family == "flats") {
      return ManifoldSpec(ParallelFlats{j.value("lo", -10.0), j.value("hi", 10.0), j.value("flat_dim", 2),
                                        j.value("separation", 2.0)},
                          d, rot);
    }
    throw Error(ErrorKind::Format, "unknown manifold family '" + family + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Format, std::string("bad manifold spec JSON: ") + e.what());
  }
}

void to_json(Json& j, const CoverConfig& c) {
  j = {{"scheme", to_string(c.scheme)}, {"delta", c.delta}, {"n_per_class", c.n_per_class},
       {"seed", c.seed}};
}

void from_json(const Json& j, CoverConfig& c) {
  c.scheme = parse_cover_scheme(j.value("scheme", std::string("grid")));
  c.delta = j.value("delta", 0.0);
  c.n_per_class = j.value("n_per_class", 0);
  c.seed = j.value("seed", std::uint64_t{0});
}

void to_json(Json& j, const InputBox& b) { j = {{"lo", b.lo}, {"hi", b.hi}}; }
void from_json(const Json& j, InputBox& b) {
  b.lo = j.value("lo", 0.0);
  b.hi = j.value("hi", 1.0);
}

void to_json(Json& j, const PgdConfig& c) {
  j = {{"eps", c.eps}, {"step", c.step}, {"iters", c.iters}, {"norm", c.norm},
       {"random_start", c.random_start}};
  j["clip"] = c.clip ? Json(*c.clip) : Json(nullptr);
}

void from_json(const Json& j, PgdConfig& c) {
  c.eps = j.value("eps", c.eps);
  c.step = j.value("step", c.step);
  c.iters = j.value("iters", c.iters);
  if (j.contains("norm")) c.norm = j.at("norm").get<NormKind>();
  c.random_start = j.value("random_start", c.random_start);
  if (j.contains("clip") && !j.at("clip").is_null()) c.clip = j.at("clip").get<InputBox>();
}

void to_json(Json& j, const TrainConfig& c) {
  Json opt;
  if (const auto* s = std::get_if<SgdConfig>(&c.optimizer)) {
    opt = {{"type", "sgd"}, {"lr", s->lr}, {"decay_factor", s->decay_factor},
           {"decay_every", s->decay_every}};
  } else {
    const auto& a = std::get<AdamConfig>(c.optimizer);
    opt = {{"type", "adam"}, {"lr", a.lr}, {"beta1", a.beta1}, {"beta2", a.beta2},
           {"eps_hat", a.eps_hat}};
  }
  j = {{"optimizer", opt}, {"epochs", c.epochs}, {"batch_size", c.batch_size}, {"seed", c.seed}};
  j["adversary"] = c.adversary ? Json(*c.adversary) : Json(nullptr);
}

void from_json(const Json& j, TrainConfig& c) {
  if (j.contains("optimizer")) {
    const Json& o = j.at("optimizer");
    const std::string type = o.value("type", std::string("adam"));
    if (type == "sgd") {
      SgdConfig s;
      s.lr = o.value("lr", s.lr);
      s.decay_factor = o.value("decay_factor", s.decay_factor);
      s.decay_every = o.value("decay_every", s.decay_every);
      c.optimizer = s;
    } else if (type == "adam") {
      AdamConfig a;
      a.lr = o.value("lr", a.lr);
      a.beta1 = o.value("beta1", a.beta1);
      a.beta2 = o.value("beta2", a.beta2);
      a.eps_hat = o.value("eps_hat", a.eps_hat);
      c.optimizer = a;
    } else {
      throw Error(ErrorKind::Format, "unknown optimizer '" + type + "'");
    }
  }
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  if (j.contains("adversary") && !j.at("adversary").is_null()) c.adversary = j.at("adversary").get<PgdConfig>();
}

void to_json(Json& j, const NnWalkConfig& c) {
  j = {{"eps", c.eps}, {"step", c.step}, {"iters", c.iters}, {"k", c.k}, {"norm", c.norm}};
  j["clip"] = c.clip ? Json(*c.clip) : Json(nullptr);
}

void from_json(const Json& j, NnWalkConfig& c) {
  c.eps = j.value("eps", c.eps);
  c.step = j.value("step", c.step);
  c.iters = j.value("iters", c.iters);
  c.k = j.value("k", c.k);
  if (j.contains("norm")) c.norm = j.at("norm").get<NormKind>();
  if (j.contains("clip") && !j.at("clip").is_null()) c.clip = j.at("clip").get<InputBox>();
}

std::string config_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorKind::Format,
          "not a number: '" + std::string(s) + "'");
  return v;
}

}  // namespace georob
