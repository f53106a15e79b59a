// georob: command-line harness for the geometric robustness experiments.

#include "georob/attacks.hpp"
#include "georob/bounds.hpp"
#include "georob/dataset_io.hpp"
#include "georob/datasets.hpp"
#include "georob/experiments.hpp"
#include "georob/manifold.hpp"
#include "georob/mlp.hpp"
#include "georob/nn_classifier.hpp"
#include "georob/report.hpp"
#include "georob/sampling.hpp"
#include "georob/serialize.hpp"
#include "georob/svg.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace georob;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAssert = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config_path;
  bool assert_mode = false;
  Json config = Json::object();
};

struct AssertFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw AssertFailure(what);
  std::cout << "assert ok: " << what << '\n';
}

// The config file may be a bare config object or a whole report.
Json load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Format, path + ": " + e.what());
  }
  if (j.contains("config") && j.at("config").is_object()) return j.at("config");
  return j;
}

// Pre-scan argv so the JSON config can seed defaults before flags apply.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

std::string out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

void echo_config(const std::string& id, const Json& cfg) {
  std::cout << Json{{"experiment", id}, {"config", cfg}}.dump() << '\n';
}

void write_report(const Globals& g, const ExperimentReport& r) {
  r.write(g.out);
  std::cout << "wrote " << (fs::path(g.out) / (r.experiment_id + ".json")).string() << " ("
            << r.results.size() << " rows, " << r.runtime_seconds << " s)\n";
}

std::uint64_t effective_seed(const Globals& g, const CLI::App& app, std::uint64_t from_config) {
  return app.get_option("--seed")->count() > 0 ? g.seed : from_config;
}

void add_optimizer_flags(CLI::App* sub, std::string& optimizer, double& lr, int& epochs, int& batch) {
  sub->add_option("--optimizer", optimizer, "adam|sgd")->check(CLI::IsMember({"adam", "sgd"}));
  sub->add_option("--lr", lr, "learning rate (0: optimizer default)");
  sub->add_option("--epochs", epochs, "training epochs");
  sub->add_option("--batch-size", batch, "batch size (0: auto)");
}

void apply_optimizer(TrainConfig& tc, const std::string& optimizer, double lr, int epochs, int batch) {
  if (optimizer == "sgd" && !std::holds_alternative<SgdConfig>(tc.optimizer)) tc.optimizer = SgdConfig{};
  if (optimizer == "adam" && !std::holds_alternative<AdamConfig>(tc.optimizer)) tc.optimizer = AdamConfig{};
  if (lr > 0.0) std::visit([&](auto& o) { o.lr = lr; }, tc.optimizer);
  if (epochs >= 0) tc.epochs = epochs;
  if (batch >= 0) tc.batch_size = batch;
}

std::string optimizer_name(const TrainConfig& tc) {
  return std::holds_alternative<SgdConfig>(tc.optimizer) ? "sgd" : "adam";
}

// --- gen-data ---------------------------------------------------------------

struct GenData {
  std::string family = "circles";
  int codim = 1;
  int n_per_class = kCirclesPerClass;
  int test_per_class = 0;
  double delta = 1.0;
  bool rotate = false;
};

void run_gen_data(const Globals& g, const GenData& o) {
  const SplitDataset data = parse_family(o.family) == DatasetFamily::Circles
                                ? make_circles(o.n_per_class, o.codim + 1, g.seed, o.rotate, o.test_per_class)
                                : make_planes(o.delta, o.codim + 2, o.rotate, g.seed);
  write_dataset(out_path(g, "train.csv"), data.train);
  write_dataset(out_path(g, "test.csv"), data.test);
  std::cout << Json{{"train_rows", data.train.size()}, {"test_rows", data.test.size()}, {"rch", data.rch},
                    {"spec", spec_to_json(data.train.spec)}}
                   .dump()
            << '\n';
}

// --- cover ------------------------------------------------------------------

struct CoverOpts {
  double delta = 1.0;
  int codim = 1;
  bool strict = false;
  int probes = 10000;
  std::string norm = "l2";
  double cap = kDefaultGridCap;
};

void run_cover(const Globals& g, const CoverOpts& o) {
  const ManifoldSpec spec = ManifoldSpec::flats(-10.0, 10.0, 2, o.codim + 2);
  const LabeledDataset cover = grid_cover_flats(spec, o.delta, o.strict, o.cap);
  write_dataset(out_path(g, "cover.csv"), cover);
  const CoverCheck check_result = verify_cover(cover, o.delta, parse_norm(o.norm), o.probes, g.seed);
  const Json j = {{"points", cover.size()},
                  {"per_axis", grid_points_per_axis(spec.flats(), o.delta, o.strict)},
                  {"delta", o.delta},
                  {"worst_gap", check_result.worst_gap},
                  {"is_cover", check_result.is_cover},
                  {"probes", check_result.n_probe}};
  std::cout << j.dump() << '\n';
  if (g.assert_mode) check(check_result.worst_gap <= 1.02 * o.delta, "worst gap within 2% of delta");
}

// --- bounds -----------------------------------------------------------------

struct BoundsOpts {
  std::string formula = "all";
  int d_min = 3, d_max = 100, d_step = 1;
  int k = 2;
  double eps = 1.0, vol = 400.0, n = 450.0, lo = -10.0, hi = 10.0;
  double r1 = 1.0, r2 = 3.0, rch = 1.0, tau = 0.25;
};

void run_bounds(const Globals& g, const BoundsOpts& o) {
  const std::vector<std::string> cols = {"formula_id", "k", "d", "eps", "n", "vol", "lo", "hi",
                                         "r1", "r2", "rch", "tau", "value", "log_value"};
  Table t(cols);
  const auto want = [&](const char* id) { return o.formula == "all" || o.formula == id; };
  const auto row = [&](const BoundResult& b) {
    std::vector<Cell> r{std::string(to_string(b.formula))};
    for (std::size_t c = 1; c + 2 < cols.size(); ++c) {
      const auto it = b.inputs.find(cols[c]);
      if (it == b.inputs.end()) {
        r.emplace_back(std::string());
      } else {
        r.emplace_back(it->second);
      }
    }
    r.emplace_back(b.value);
    r.emplace_back(b.log_value);
    t.add_row(std::move(r));
  };
  const auto scalar = [&](FormulaId id, std::map<std::string, double> inputs, double v) {
    BoundResult b;
    b.formula = id;
    b.value = v;
    b.log_value = v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    b.inputs = std::move(inputs);
    row(b);
  };
  for (int d = o.d_min; d <= o.d_max; d += std::max(1, o.d_step)) {
    if (d > o.k) {
      if (want("coverage_ratio")) row(coverage_ratio_bound(o.k, d, o.eps, o.vol, o.n));
      if (want("plane_coverage")) row(plane_coverage_bound(o.k, d));
      if (want("tube_cover_lower_bound")) row(tube_cover_sample_lower_bound(o.k, d, o.lo, o.hi));
    }
    if (want("sphere_coverage")) row(sphere_coverage_bound(o.n, d, std::min(o.eps, 1.0)));
    if (want("linear_region") && d >= 2) row(linear_region_lower_bound(o.r1, o.rch, o.tau, d));
    if (want("linf_axis_offset"))
      scalar(FormulaId::LinfAxisOffset, {{"d", d}, {"r1", o.r1}, {"r2", o.r2}}, linf_axis_offset(o.r1, o.r2, d));
  }
  if (want("segment_count") && o.r1 + o.eps < o.r2 - o.eps)
    scalar(FormulaId::SegmentCount, {{"r1", o.r1}, {"r2", o.r2}, {"eps", o.eps}},
           segment_count_lower_bound(o.r1, o.r2, o.eps));
  if (want("nn_cover") && o.eps < o.rch)
    scalar(FormulaId::NnCover, {{"rch", o.rch}, {"eps", o.eps}}, nn_cover_bound(o.rch, o.eps));
  if (want("l_cover") && o.eps < o.rch)
    scalar(FormulaId::BallLearnerCover, {{"rch", o.rch}, {"eps", o.eps}}, l_cover_bound(o.rch, o.eps));
  if (want("sampling_gap_ratio") && o.eps <= 1.0)
    scalar(FormulaId::SamplingGapRatio, {{"k", o.k}, {"eps", o.eps}}, sampling_gap_ratio(o.k, o.eps));
  const std::string path = out_path(g, "bounds.csv");
  t.write_csv(path);
  std::cout << "wrote " << path << " (" << t.size() << " rows)\n";
  if (o.formula == "plane_coverage" || o.formula == "coverage_ratio") {
    svg::line_plot(Table::read_csv(path), "d", "value", "formula_id", o.formula + " vs d",
                   out_path(g, "bounds.svg"));
  }
}

// --- train ------------------------------------------------------------------

struct TrainOpts {
  std::string data;
  std::string family = "circles";
  int codim = 1;
  std::string optimizer = "adam";
  double lr = 0.0;
  int epochs = -1;
  int batch = -1;
  bool adversarial = false;
  double adv_eps = 1.0;
  std::string adv_norm = "l2";
  int hidden = 100;
};

void run_train(const Globals& g, const CLI::App& app, TrainOpts o) {
  TrainConfig tc;
  if (!g.config.empty()) from_json(g.config.contains("train") ? g.config.at("train") : g.config, tc);
  apply_optimizer(tc, o.optimizer, o.lr, o.epochs, o.batch);
  tc.seed = effective_seed(g, app, tc.seed);
  if (o.adversarial) tc.adversary = PgdConfig{o.adv_eps, 0.05, 30, parse_norm(o.adv_norm), true, std::nullopt};
  LabeledDataset train_set =
      !o.data.empty() ? read_dataset(o.data)
      : parse_family(o.family) == DatasetFamily::Circles ? make_circles(kCirclesPerClass, o.codim + 1, tc.seed).train
                                                         : make_planes(1.0, o.codim + 2).train;
  Json cfg_json = {{"train", tc}, {"hidden", o.hidden}};
  if (o.data.empty()) {
    cfg_json["family"] = o.family;
    cfg_json["codim"] = o.codim;
  } else {
    cfg_json["data"] = o.data;
  }
  echo_config("train", cfg_json);
  const auto res = train(MlpModel::random({train_set.dim(), o.hidden, 2}, tc.seed), train_set.points,
                         train_set.labels, tc);
  save_checkpoint(res.model, out_path(g, "model.ckpt"), tc.seed, config_hash(cfg_json));
  Table trace({"epoch", "loss"});
  for (std::size_t e = 0; e < res.loss_trace.size(); ++e)
    trace.add_row({static_cast<std::int64_t>(e), res.loss_trace[e]});
  trace.write_csv(out_path(g, "loss_trace.csv"));
  const double acc = accuracy(predict(res.model, train_set.points), train_set.labels);
  std::cout << Json{{"train_accuracy", acc}, {"final_loss", res.loss_trace.empty() ? 0.0 : res.loss_trace.back()}}
                   .dump()
            << '\n';
}

// --- attack -----------------------------------------------------------------

struct AttackOpts {
  std::string model;
  std::string data;
  std::string train_data;
  std::string method = "fgsm";
  std::vector<double> eps = {1.0};
  std::string norm = "l2";
  double step = 0.05;
  int iters = 30;
  int k = 10;
  std::string oracle = "mlp";
};

void run_attack(const Globals& g, const AttackOpts& o) {
  const AttackMethod method = parse_attack_method(o.method);
  const NormKind norm = parse_norm(o.norm);
  const PointTable data = read_points_csv(o.data);
  echo_config("attack", {{"method", o.method}, {"eps", o.eps}, {"norm", o.norm}, {"step", o.step},
                         {"iters", o.iters}, {"k", o.k}, {"seed", g.seed}, {"model", o.model},
                         {"data", o.data}, {"train_data", o.train_data}, {"oracle", o.oracle}});
  std::optional<MlpModel> model;
  if (!o.model.empty()) model = load_checkpoint(o.model).model;
  std::optional<NnIndex> nn;
  if (!o.train_data.empty()) {
    PointTable tr = read_points_csv(o.train_data);
    nn.emplace(std::move(tr.points), std::move(tr.labels), norm == NormKind::L2 ? NormKind::L2 : NormKind::Linf);
  }
  Table rows({"row", "eps", "success", "perturbation_norm"});
  Json summary = Json::array();
  for (double eps : o.eps) {
    AttackOutcome out;
    if (method == AttackMethod::NnWalk) {
      require(nn.has_value(), ErrorKind::InvalidArgument, "nn-walk needs --train-data");
      out = nn_walk_attack(*nn, data.points, data.labels, NnWalkConfig{eps, 0.0, 50, o.k, norm, std::nullopt});
    } else if (method == AttackMethod::GradientFreeProjection) {
      ClassOracle oracle;
      if (o.oracle == "nn") {
        require(nn.has_value(), ErrorKind::InvalidArgument, "--oracle nn needs --train-data");
        oracle = [&](const Points& p) { return nn->predict(p); };
      } else {
        require(model.has_value(), ErrorKind::InvalidArgument, "gradient-free attack needs --model");
        oracle = [&](const Points& p) { return predict(*model, p); };
      }
      out = gradient_free_projection(oracle, data.points, data.labels, eps, norm);
    } else {
      require(model.has_value(), ErrorKind::InvalidArgument, "gradient attacks need --model");
      switch (method) {
        case AttackMethod::Fgsm: out = fgsm(*model, data.points, data.labels, eps, norm); break;
        case AttackMethod::Bim: out = bim(*model, data.points, data.labels, eps, norm, o.step, o.iters); break;
        default:
          out = pgd(*model, data.points, data.labels, PgdConfig{eps, o.step, o.iters, norm, true, std::nullopt}, g.seed);
      }
    }
    for (std::size_t r = 0; r < out.success.size(); ++r)
      rows.add_row({static_cast<std::int64_t>(r), eps, std::int64_t{out.success[r] ? 1 : 0},
                    out.perturbation_norms[r]});
    Json s = {{"eps", eps}, {"success_rate", 1.0 - out.robust_accuracy()}, {"robust_accuracy", out.robust_accuracy()}};
    if (nn && method != AttackMethod::NnWalk) s["nn_accuracy"] = accuracy(nn->predict(out.adversarial), data.labels);
    summary.push_back(s);
  }
  rows.write_csv(out_path(g, "attack.csv"));
  std::ofstream(out_path(g, "attack_summary.json")) << summary.dump(2) << '\n';
  std::cout << summary.dump() << '\n';
}

// --- certify ----------------------------------------------------------------

struct CertifyOpts {
  std::string data;
  double delta = 0.5;
  int codim = 1;
  double eps = 0.4;
  double tau = 0.0;
  std::string norm = "l2";
  int cover_probes = 10000;
  int tube_probes = 100000;
};

void run_certify(const Globals& g, const CertifyOpts& o) {
  const NormKind norm = parse_norm(o.norm);
  LabeledDataset set = !o.data.empty() ? read_dataset(o.data)
                                       : grid_cover_flats(ManifoldSpec::flats(-10, 10, 2, o.codim + 2), o.delta);
  if (o.tau > 0.0) {
    for (Eigen::Index r = 0; r < set.points.rows(); ++r) {
      Engine eng = make_engine(g.seed, {stream::kNoise, static_cast<std::uint64_t>(r)});
      const Vector base = set.points.row(r).transpose();
      // Noise = tube sample minus its own manifold anchor, reused at this point.
      const Vector noisy = sample_tube_point(set.spec, set.labels[static_cast<std::size_t>(r)], o.tau, norm, eng);
      const Vector anchor = nearest_point_l2(noisy, set.spec, set.labels[static_cast<std::size_t>(r)]);
      set.points.row(r) = (base + (noisy - anchor)).transpose();
    }
  }
  const NnIndex index(set.points, set.labels, norm);
  echo_config("certify", {{"data", o.data}, {"delta", o.delta}, {"codim", o.codim}, {"eps", o.eps},
                          {"tau", o.tau}, {"norm", o.norm}, {"seed", g.seed}});
  const auto cert = certify(index, set.spec, o.eps, CertifyOptions{o.tau, o.cover_probes, o.tube_probes, g.seed});
  const Json j = {{"condition", to_string(cert.condition)}, {"eps", cert.eps},
                  {"delta_measured", cert.delta_measured}, {"rch", cert.rch},
                  {"tau", cert.tau}, {"bound", cert.bound},
                  {"holds", cert.holds}, {"cover_probes", cert.cover_probes},
                  {"tube_probes", cert.tube_probes}, {"probe_errors", cert.probe_errors}};
  std::ofstream(out_path(g, "certificate.json")) << j.dump(2) << '\n';
  std::cout << j.dump() << '\n';
  if (g.assert_mode && cert.holds) check(cert.probe_errors == 0, "certified configuration has zero probe errors");
}

// --- experiments ------------------------------------------------------------

std::vector<std::string> attack_list_default(const std::vector<AttackMethod>& a) {
  std::vector<std::string> out;
  for (auto m : a) out.push_back(to_string(m));
  return out;
}

void plot_aggregates(const Globals& g, const std::string& id, const std::string& x, const std::string& y,
                     const std::string& group, const std::string& title) {
  const std::string csv = out_path(g, id + "_aggregates.csv");
  if (fs::exists(csv)) svg::line_plot(Table::read_csv(csv), x, y, group, title, out_path(g, id + "_" + y + ".svg"));
}

void sweep_asserts(const CodimSweepConfig& cfg, const ExperimentReport& r) {
  const Table& a = r.aggregates;
  const double eps_max = *std::max_element(cfg.eps_grid.begin(), cfg.eps_grid.end());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.number(i, "eps") <= 0.99)
      check(a.number(i, "nn_mean") >= 0.99, "NN accuracy >= 0.99 at codim " + a.text(i, "codim") + ", eps " +
                                                a.text(i, "eps"));
  if (cfg.adversarial_training) {
    for (int codim : cfg.codims) {
      if (codim < 100) continue;
      bool found = false;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a.number(i, "codim") == codim && a.number(i, "eps") < 1.0 && a.number(i, "mlp_mean") < 1.0) found = true;
      check(found, "adversarial examples exist below eps = 1 at codim " + std::to_string(codim));
    }
    return;
  }
  double prev = std::numeric_limits<double>::infinity();
  for (int codim : cfg.codims) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.number(i, "codim") != codim || a.number(i, "eps") != eps_max || a.text(i, "attack") != "fgsm") continue;
      const double m = a.number(i, "mlp_mean");
      check(m <= prev + 0.02, "robust accuracy non-increasing in codim (codim " + std::to_string(codim) + ")");
      prev = m;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  CLI::App app{"georob: geometric adversarial robustness laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "run seed")->default_val(0);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--config", g.config_path, "JSON config (a bare config or an emitted report)");
  app.add_flag("--assert", g.assert_mode, "check the qualitative orderings; exit 3 on failure");

  try {
    const std::string cfg_path = find_config_arg(argc, argv);
    if (!cfg_path.empty()) g.config = load_config(cfg_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  GenData gen;
  auto* s_gen = app.add_subcommand("gen-data", "generate Circles/Planes train and test sets");
  s_gen->add_option("--family", gen.family)->check(CLI::IsMember({"circles", "planes"}));
  s_gen->add_option("--codim", gen.codim);
  s_gen->add_option("--n-per-class", gen.n_per_class);
  s_gen->add_option("--test-per-class", gen.test_per_class);
  s_gen->add_option("--delta", gen.delta, "Planes grid cover radius");
  s_gen->add_flag("--rotate", gen.rotate);

  CoverOpts cover;
  auto* s_cover = app.add_subcommand("cover", "grid cover of the Planes spec and a Monte Carlo check");
  s_cover->add_option("--delta", cover.delta);
  s_cover->add_option("--codim", cover.codim);
  s_cover->add_flag("--strict", cover.strict);
  s_cover->add_option("--probes", cover.probes);
  s_cover->add_option("--norm", cover.norm, "l2|linf");
  s_cover->add_option("--cap", cover.cap);

  BoundsOpts bo;
  auto* s_bounds = app.add_subcommand("bounds", "evaluate closed-form bounds over a range of d");
  s_bounds->add_option("--formula", bo.formula);
  s_bounds->add_option("--d-min", bo.d_min);
  s_bounds->add_option("--d-max", bo.d_max);
  s_bounds->add_option("--d-step", bo.d_step);
  s_bounds->add_option("--k", bo.k, "intrinsic dimension");
  s_bounds->add_option("--eps", bo.eps, "perturbation radius");
  s_bounds->add_option("--vol", bo.vol);
  s_bounds->add_option("--n", bo.n);
  s_bounds->add_option("--lo", bo.lo);
  s_bounds->add_option("--hi", bo.hi);
  s_bounds->add_option("--r1", bo.r1);
  s_bounds->add_option("--r2", bo.r2);
  s_bounds->add_option("--rch", bo.rch);
  s_bounds->add_option("--tau", bo.tau);

  TrainOpts to;
  auto* s_train = app.add_subcommand("train", "train an MLP and write a checkpoint");
  s_train->add_option("--data", to.data, "training CSV with JSON sidecar");
  s_train->add_option("--family", to.family)->check(CLI::IsMember({"circles", "planes"}));
  s_train->add_option("--codim", to.codim);
  add_optimizer_flags(s_train, to.optimizer, to.lr, to.epochs, to.batch);
  s_train->add_flag("--adversarial", to.adversarial, "PGD adversarial training");
  s_train->add_option("--adv-eps", to.adv_eps);
  s_train->add_option("--adv-norm", to.adv_norm);
  s_train->add_option("--hidden", to.hidden);

  AttackOpts ao;
  auto* s_attack = app.add_subcommand("attack", "attack a dataset and report per-row outcomes");
  s_attack->add_option("--model", ao.model, "checkpoint path");
  s_attack->add_option("--data", ao.data, "points CSV")->required();
  s_attack->add_option("--train-data", ao.train_data, "training CSV for NN evaluation / nn-walk");
  s_attack->add_option("--method", ao.method, "fgsm|bim|pgd|gradient-free|nn-walk");
  s_attack->add_option("--eps", ao.eps, "comma-separated radii")->delimiter(',');
  s_attack->add_option("--norm", ao.norm, "l2|linf");
  s_attack->add_option("--step", ao.step, "BIM/PGD step size");
  s_attack->add_option("--iters", ao.iters, "BIM/PGD iterations");
  s_attack->add_option("--k", ao.k, "neighbours for nn-walk");
  s_attack->add_option("--oracle", ao.oracle, "mlp|nn for the gradient-free attack");

  CertifyOpts co;
  auto* s_cert = app.add_subcommand("certify", "nearest-neighbour robustness certificate");
  s_cert->add_option("--data", co.data);
  s_cert->add_option("--delta", co.delta);
  s_cert->add_option("--codim", co.codim);
  s_cert->add_option("--eps", co.eps, "certified radius");
  s_cert->add_option("--tau", co.tau);
  s_cert->add_option("--norm", co.norm, "l2|linf");
  s_cert->add_option("--cover-probes", co.cover_probes);
  s_cert->add_option("--tube-probes", co.tube_probes);

  CodimSweepConfig sweep;
  std::string sweep_family = "circles", sweep_norm = "l2", sweep_opt = "adam";
  std::vector<std::string> sweep_attacks;
  double sweep_lr = 0.0;
  int sweep_epochs = -1, sweep_batch = -1;
  auto* s_sweep = app.add_subcommand("sweep-codim", "robust accuracy vs codimension");
  if (!g.config.empty()) from_json(g.config, sweep);
  sweep_family = to_string(sweep.family);
  sweep_norm = to_string(sweep.attack_norm);
  sweep_attacks = attack_list_default(sweep.attacks);
  sweep_opt = optimizer_name(sweep.train);
  s_sweep->add_option("--family", sweep_family)->check(CLI::IsMember({"circles", "planes"}));
  s_sweep->add_option("--codims", sweep.codims)->delimiter(',');
  s_sweep->add_option("--eps", sweep.eps_grid, "comma-separated radii")->delimiter(',');
  s_sweep->add_option("--attacks", sweep_attacks)->delimiter(',');
  s_sweep->add_option("--norm", sweep_norm, "l2|linf");
  s_sweep->add_option("--retrain", sweep.n_retrain);
  s_sweep->add_option("--train-per-class", sweep.train_per_class);
  s_sweep->add_option("--test-per-class", sweep.test_per_class);
  s_sweep->add_option("--delta", sweep.planes_delta);
  s_sweep->add_flag("--adversarial", sweep.adversarial_training);
  s_sweep->add_option("--adv-eps", sweep.adversary.eps);
  s_sweep->add_flag("--rotate", sweep.rotate);
  s_sweep->add_option("--workers", sweep.workers);
  add_optimizer_flags(s_sweep, sweep_opt, sweep_lr, sweep_epochs, sweep_batch);

  TradeoffConfig trade;
  std::string trade_opt = "adam";
  double trade_lr = 0.0;
  int trade_epochs = -1, trade_batch = -1;
  auto* s_trade = app.add_subcommand("tradeoff", "L-inf robust training vs L2 attacks across d");
  if (!g.config.empty()) from_json(g.config, trade);
  trade_opt = optimizer_name(trade.train);
  s_trade->add_option("--d", trade.d_grid)->delimiter(',');
  s_trade->add_option("--eps", trade.eps_grid, "comma-separated radii")->delimiter(',');
  s_trade->add_option("--retrain", trade.n_retrain);
  s_trade->add_option("--train-per-class", trade.train_per_class);
  s_trade->add_option("--test-per-class", trade.test_per_class);
  s_trade->add_option("--workers", trade.workers);
  add_optimizer_flags(s_trade, trade_opt, trade_lr, trade_epochs, trade_batch);

  AngleConfig angle;
  std::string angle_opt = "sgd";
  double angle_lr = 0.0;
  int angle_epochs = -1, angle_batch = -1;
  auto* s_angle = app.add_subcommand("angles", "angle of FGSM perturbations to the normal space");
  if (!g.config.empty()) from_json(g.config, angle);
  angle_opt = optimizer_name(angle.train);
  s_angle->add_option("--codims", angle.codims)->delimiter(',');
  s_angle->add_option("--retrain", angle.n_retrain);
  s_angle->add_option("--eps", angle.eps, "FGSM radius");
  s_angle->add_option("--train-per-class", angle.train_per_class);
  s_angle->add_option("--test-per-class", angle.test_per_class);
  s_angle->add_option("--workers", angle.workers);
  add_optimizer_flags(s_angle, angle_opt, angle_lr, angle_epochs, angle_batch);

  GradFieldConfig gf;
  std::string gf_model;
  bool gf_natural = false;
  int gf_epochs = 250;
  auto* s_gf = app.add_subcommand("gradfield", "loss-gradient field of a 2-D Planes model");
  if (!g.config.empty()) from_json(g.config, gf);
  s_gf->add_option("--model", gf_model, "checkpoint (default: train one)");
  s_gf->add_option("--grid-res", gf.grid_res);
  s_gf->add_flag("--natural", gf_natural, "train without an adversary");
  s_gf->add_option("--epochs", gf_epochs);

  SliceConfig sl;
  std::string sl_classifier = "nn";
  int sl_models = 20, sl_epochs = 250;
  auto* s_sl = app.add_subcommand("slices", "decision-boundary cross sections for Circles in R^3");
  if (!g.config.empty()) from_json(g.config, sl);
  s_sl->add_option("--z", sl.z_values)->delimiter(',');
  s_sl->add_option("--grid-res", sl.grid_res);
  s_sl->add_option("--classifier", sl_classifier)->check(CLI::IsMember({"nn", "mlp"}));
  s_sl->add_option("--models", sl_models);
  s_sl->add_option("--epochs", sl_epochs);

  MnistConfig mn;
  std::vector<std::string> mn_attacks;
  auto* s_mn = app.add_subcommand("mnist-nn", "nearest neighbours vs MLPs on MNIST");
  if (!g.config.empty()) from_json(g.config, mn);
  mn_attacks = attack_list_default(mn.attacks);
  s_mn->add_option("--mnist-dir", mn.mnist_dir);
  s_mn->add_option("--train-subsample", mn.train_subsample);
  s_mn->add_option("--test-subsample", mn.test_subsample);
  s_mn->add_option("--eps", mn.eps_grid, "comma-separated radii")->delimiter(',');
  s_mn->add_option("--attacks", mn_attacks)->delimiter(',');
  s_mn->add_option("--epochs", mn.train.epochs);
  s_mn->add_option("--pgm-dir", mn.pgm_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s_gen->parsed()) {
      run_gen_data(g, gen);
    } else if (s_cover->parsed()) {
      run_cover(g, cover);
    } else if (s_bounds->parsed()) {
      run_bounds(g, bo);
    } else if (s_train->parsed()) {
      run_train(g, app, to);
    } else if (s_attack->parsed()) {
      run_attack(g, ao);
    } else if (s_cert->parsed()) {
      run_certify(g, co);
    } else if (s_sweep->parsed()) {
      sweep.family = parse_family(sweep_family);
      sweep.attack_norm = parse_norm(sweep_norm);
      sweep.attacks.clear();
      for (const auto& a : sweep_attacks) sweep.attacks.push_back(parse_attack_method(a));
      apply_optimizer(sweep.train, sweep_opt, sweep_lr, sweep_epochs, sweep_batch);
      sweep.seed = effective_seed(g, app, sweep.seed);
      if (sweep.family == DatasetFamily::Planes && sweep.adversarial_training) sweep.adversary.norm = NormKind::L2;
      echo_config("sweep-codim", to_json(sweep));
      const auto r = run_codim_sweep(sweep);
      write_report(g, r);
      plot_aggregates(g, r.experiment_id, "eps", "mlp_mean", "codim", "MLP robust accuracy");
      plot_aggregates(g, r.experiment_id, "eps", "nn_mean", "codim", "NN accuracy on MLP adversarial examples");
      if (g.assert_mode) sweep_asserts(sweep, r);
    } else if (s_trade->parsed()) {
      apply_optimizer(trade.train, trade_opt, trade_lr, trade_epochs, trade_batch);
      trade.seed = effective_seed(g, app, trade.seed);
      echo_config("tradeoff", to_json(trade));
      const auto r = run_tradeoff(trade);
      write_report(g, r);
      plot_aggregates(g, r.experiment_id, "eps", "l2_acc_mean", "d", "L2 BIM robust accuracy, L-inf trained");
      std::cout << r.summary.dump() << '\n';
      if (g.assert_mode) {
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& row : r.summary.at("per_dimension")) {
          if (row.at("eps2_star").is_null()) continue;
          const double e = row.at("eps2_star").get<double>();
          check(e <= prev + 1e-12, "eps2* non-increasing in d (d = " + row.at("d").dump() + ")");
          prev = e;
        }
      }
    } else if (s_angle->parsed()) {
      apply_optimizer(angle.train, angle_opt, angle_lr, angle_epochs, angle_batch);
      angle.seed = effective_seed(g, app, angle.seed);
      echo_config("angles", to_json(angle));
      const auto r = run_angle_histogram(angle);
      write_report(g, r);
      const std::string csv = out_path(g, "angles_results.csv");
      svg::line_plot(Table::read_csv(csv), "bin_lo", "fraction", "codim", "angle to normal space (per seed rows)",
                     out_path(g, "angles.svg"));
      if (g.assert_mode)
        for (std::size_t i = 0; i < r.aggregates.size(); ++i)
          if (r.aggregates.number(i, "codim") == 10)
            check(r.aggregates.number(i, "frac_lt20_mean") >= 0.8, "codim 10: >= 80% of angles under 20 degrees");
    } else if (s_gf->parsed()) {
      MlpModel model;
      if (!gf_model.empty()) {
        model = load_checkpoint(gf_model).model;
      } else {
        const ManifoldSpec spec = gradfield_spec();
        const LabeledDataset tr = grid_cover_flats(spec, 0.25);
        TrainConfig tc;
        tc.epochs = gf_epochs;
        tc.seed = g.seed;
        if (!gf_natural) tc.adversary = PgdConfig{1.0, 0.05, 30, NormKind::L2, true, std::nullopt};
        model = train(MlpModel::random({2, 100, 2}, g.seed), tr.points, tr.labels, tc).model;
      }
      echo_config("gradfield", to_json(gf));
      const auto r = run_gradfield(model, gf);
      write_report(g, r);
      svg::heatmap(Table::read_csv(out_path(g, "gradfield_results.csv")), "x", "y", "magnitude",
                   "loss gradient magnitude", out_path(g, "gradfield.svg"));
      std::cout << r.summary.dump() << '\n';
      if (g.assert_mode) check(r.summary.at("ratio").get<double>() < 0.1, "gradient magnitude ratio below 10%");
    } else if (s_sl->parsed()) {
      const SplitDataset data = make_circles(kCirclesPerClass, 3, g.seed);
      std::vector<ClassOracle> oracles;
      std::vector<MlpModel> models;
      auto nn = std::make_shared<NnIndex>(data.train.points, data.train.labels, NormKind::L2);
      if (sl_classifier == "nn") {
        oracles.push_back([nn](const Points& p) { return nn->predict(p); });
      } else {
        for (int m = 0; m < sl_models; ++m) {
          TrainConfig tc;
          tc.epochs = sl_epochs;
          tc.seed = derive_seed(g.seed, {static_cast<std::uint64_t>(m)});
          models.push_back(train(MlpModel::random({3, 100, 2}, tc.seed), data.train.points, data.train.labels, tc).model);
        }
        for (const auto& m : models) oracles.push_back([&m](const Points& p) { return predict(m, p); });
      }
      echo_config("slices", to_json(sl));
      auto r = run_boundary_slices(oracles, sl);
      r.config["classifier"] = sl_classifier;
      write_report(g, r);
      const Table t = Table::read_csv(out_path(g, "slices_results.csv"));
      for (double z : sl.z_values) {
        Table slice(t.columns());
        for (std::size_t i = 0; i < t.size(); ++i)
          if (t.number(i, "z") == z) slice.add_row(t.rows()[i]);
        svg::heatmap(slice, "x", "y", "freq_class1", "slice z=" + format_double(z),
                     out_path(g, "slice_z" + format_double(z) + ".svg"));
      }
    } else if (s_mn->parsed()) {
      mn.attacks.clear();
      for (const auto& a : mn_attacks) mn.attacks.push_back(parse_attack_method(a));
      mn.seed = effective_seed(g, app, mn.seed);
      echo_config("mnist-nn", to_json(mn));
      const auto r = run_mnist_nn(mn);
      write_report(g, r);
      std::cout << r.summary.dump() << '\n';
      if (g.assert_mode) {
        check(r.summary.at("nn_clean_acc").get<double>() >= 0.94, "clean 1-NN accuracy >= 0.94");
        for (std::size_t i = 0; i < r.results.size(); ++i)
          if (r.results.text(i, "model") == "natural" && r.results.text(i, "attack") == "bim" &&
              r.results.number(i, "eps") > 0.0 && r.results.number(i, "eps") <= 0.5)
            check(r.results.number(i, "nn_acc") > r.results.number(i, "model_acc"),
                  "NN beats the natural model under BIM at eps " + r.results.text(i, "eps"));
      }
    }
  } catch (const AssertFailure& e) {
    std::cerr << "assertion failed: " << e.what() << '\n';
    return kExitAssert;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
