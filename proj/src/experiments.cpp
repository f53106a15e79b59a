#include "georob/experiments.hpp"

#include "georob/bounds.hpp"
#include "georob/datasets.hpp"
#include "georob/parallel.hpp"
#include "georob/rng.hpp"
#include "georob/serialize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>

namespace georob {

namespace {

using Clock = std::chrono::steady_clock;

unsigned worker_count(unsigned requested) { return requested ? requested : default_workers(); }

std::uint64_t job_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive_seed(seed, {a, b});
}

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ExperimentReport begin_report(const std::string& id, nlohmann::json config) {
  ExperimentReport r;
  r.experiment_id = id;
  r.config = std::move(config);
  r.version = library_version();
  r.timestamp = utc_timestamp();
  return r;
}

AttackOutcome run_gradient_attack(const MlpModel& model, const Points& x, const Labels& y,
                                  AttackMethod method, double eps, NormKind norm, double step,
                                  int iters, std::uint64_t seed,
                                  const std::optional<InputBox>& clip = std::nullopt) {
  switch (method) {
    case AttackMethod::Fgsm: return fgsm(model, x, y, eps, norm, clip);
    case AttackMethod::Bim: return bim(model, x, y, eps, norm, step, iters, clip);
    case AttackMethod::Pgd: return pgd(model, x, y, PgdConfig{eps, step, iters, norm, true, clip}, seed);
    default:
      throw Error(ErrorKind::InvalidArgument,
                  std::string("attack '") + to_string(method) + "' is not gradient based");
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

std::vector<std::string> attack_names(const std::vector<AttackMethod>& attacks) {
  std::vector<std::string> out;
  for (auto a : attacks) out.push_back(to_string(a));
  return out;
}

std::vector<AttackMethod> parse_attacks(const std::vector<std::string>& names) {
  std::vector<AttackMethod> out;
  for (const auto& n : names) out.push_back(parse_attack_method(n));
  return out;
}

}  // namespace

const char* to_string(DatasetFamily f) { return f == DatasetFamily::Circles ? "circles" : "planes"; }

DatasetFamily parse_family(const std::string& s) {
  if (s == "circles") return DatasetFamily::Circles;
  if (s == "planes") return DatasetFamily::Planes;
  throw Error(ErrorKind::InvalidArgument, "unknown dataset family '" + s + "' (expected circles|planes)");
}

std::vector<double> linspace_grid(double lo, double hi, int count) {
  require_arg(count >= 1, "grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double v = count == 1 ? lo : lo + (hi - lo) * i / double(count - 1);
    // Snap to 12 decimals so grids like 0.1..1.0 hit 0.3 and 1.0 exactly.
    out[static_cast<std::size_t>(i)] = std::round(v * 1e12) / 1e12;
  }
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------
// codimension sweep

ExperimentReport run_codim_sweep(const CodimSweepConfig& cfg) {
  require_arg(!cfg.codims.empty() && !cfg.eps_grid.empty() && !cfg.attacks.empty(),
              "sweep needs codims, eps values and attacks");
  require_arg(cfg.n_retrain >= 1, "n_retrain must be >= 1");
  const auto start = Clock::now();
  ExperimentReport report = begin_report("sweep-codim", to_json(cfg));
  report.results = Table({"codim", "seed", "attack", "eps", "mlp_acc", "nn_acc", "clean_mlp_acc",
                          "clean_nn_acc", "status"});

  const std::size_t n_jobs = cfg.codims.size() * static_cast<std::size_t>(cfg.n_retrain);
  std::vector<std::vector<std::vector<Cell>>> job_rows(n_jobs);
  parallel_for(
      n_jobs,
      [&](std::size_t job) {
        const int codim = cfg.codims[job / static_cast<std::size_t>(cfg.n_retrain)];
        const int s = static_cast<int>(job % static_cast<std::size_t>(cfg.n_retrain));
        require_arg(codim >= 1, "codimension must be >= 1");
        const std::uint64_t js = job_seed(cfg.seed, static_cast<std::uint64_t>(codim), static_cast<std::uint64_t>(s));
        SplitDataset data =
            cfg.family == DatasetFamily::Circles
                ? make_circles(cfg.train_per_class, codim + 1, js, cfg.rotate, cfg.test_per_class)
                : make_planes(cfg.planes_delta, codim + 2, cfg.rotate, js);
        const int d = data.train.dim();
        TrainConfig tc = cfg.train;
        tc.seed = js;
        if (cfg.adversarial_training) tc.adversary = cfg.adversary;
        auto& rows = job_rows[job];
        MlpModel model;
        try {
          model = train(MlpModel::random({d, 100, 2}, js), data.train.points, data.train.labels, tc).model;
        } catch (const DivergenceError& e) {
          for (auto a : cfg.attacks)
            for (double eps : cfg.eps_grid)
              rows.push_back({std::int64_t{codim}, std::int64_t{s}, std::string(to_string(a)), eps,
                              std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(), std::string("diverged")});
          return;
        }
        const NnIndex nn(data.train.points, data.train.labels, NormKind::L2);
        const Points& xt = data.test.points;
        const Labels& yt = data.test.labels;
        const double clean_mlp = accuracy(predict(model, xt), yt);
        const double clean_nn = accuracy(nn.predict(xt), yt);
        for (auto a : cfg.attacks) {
          for (double eps : cfg.eps_grid) {
            const auto out = run_gradient_attack(model, xt, yt, a, eps, cfg.attack_norm, cfg.bim_step,
                                                 cfg.bim_iters, derive_seed(js, {stream::kAttack}));
            rows.push_back({std::int64_t{codim}, std::int64_t{s}, std::string(to_string(a)), eps,
                            out.robust_accuracy(), accuracy(nn.predict(out.adversarial), yt), clean_mlp,
                            clean_nn, std::string("ok")});
          }
        }
      },
      worker_count(cfg.workers));

  // codim -> attack -> eps -> values, in config order
  report.aggregates = Table({"codim", "attack", "eps", "n", "mlp_mean", "mlp_stdev", "nn_mean",
                             "nn_stdev", "nn_min", "diverged"});
  for (const auto& rows : job_rows)
    for (const auto& row : rows) report.results.add_row(row);
  for (int codim : cfg.codims) {
    for (auto a : cfg.attacks) {
      for (double eps : cfg.eps_grid) {
        std::vector<double> mlp, nn;
        std::int64_t diverged = 0;
        for (std::size_t r = 0; r < report.results.size(); ++r) {
          if (report.results.number(r, "codim") != codim || report.results.text(r, "attack") != to_string(a) ||
              report.results.number(r, "eps") != eps)
            continue;
          if (report.results.text(r, "status") != "ok") {
            ++diverged;
            continue;
          }
          mlp.push_back(report.results.number(r, "mlp_acc"));
          nn.push_back(report.results.number(r, "nn_acc"));
        }
        const Summary sm = summarize_values(mlp), sn = summarize_values(nn);
        const double nn_min = nn.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : *std::min_element(nn.begin(), nn.end());
        report.aggregates.add_row({std::int64_t{codim}, std::string(to_string(a)), eps, sm.n, sm.mean,
                                   sm.stdev, sn.mean, sn.stdev, nn_min, diverged});
      }
    }
  }
  report.runtime_seconds = elapsed(start);
  return report;
}

// ---------------------------------------------------------------------------
// L-inf / L2 tradeoff

ExperimentReport run_tradeoff(const TradeoffConfig& cfg) {
  require_arg(!cfg.d_grid.empty(), "tradeoff needs at least one dimension");
  const auto start = Clock::now();
  ExperimentReport report = begin_report("tradeoff", to_json(cfg));
  report.results = Table({"d", "codim", "seed", "eps", "l2_robust_acc", "delta_linf", "train_eps"});
  const std::size_t n_jobs = cfg.d_grid.size() * static_cast<std::size_t>(cfg.n_retrain);
  std::vector<std::vector<std::vector<Cell>>> job_rows(n_jobs);
  parallel_for(
      n_jobs,
      [&](std::size_t job) {
        const int d = cfg.d_grid[job / static_cast<std::size_t>(cfg.n_retrain)];
        const int s = static_cast<int>(job % static_cast<std::size_t>(cfg.n_retrain));
        require_arg(d >= 2, "tradeoff dimensions must be >= 2");
        const std::uint64_t js = job_seed(cfg.seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(s));
        const ManifoldSpec spec = ManifoldSpec::spheres(cfg.r1, cfg.r2, d - 1, d);
        const auto tr = random_sample(spec, cfg.train_per_class, derive_seed(js, {stream::kTrainData}));
        const auto te = random_sample(spec, cfg.test_per_class, derive_seed(js, {stream::kTestData}));
        const double delta = linf_axis_offset(cfg.r1, cfg.r2, d);
        TrainConfig tc = cfg.train;
        tc.seed = js;
        PgdConfig adv = cfg.adversary;
        adv.eps = cfg.train_eps_fraction * delta;
        adv.norm = NormKind::Linf;
        tc.adversary = adv;
        const MlpModel model = train(MlpModel::random({d, 100, 2}, js), tr.points, tr.labels, tc).model;
        for (double eps : cfg.eps_grid) {
          const auto out = bim(model, te.points, te.labels, eps, NormKind::L2, cfg.bim_step, cfg.bim_iters);
          job_rows[job].push_back({std::int64_t{d}, std::int64_t{1}, std::int64_t{s}, eps,
                                   out.robust_accuracy(), delta, adv.eps});
        }
      },
      worker_count(cfg.workers));
  for (const auto& rows : job_rows)
    for (const auto& row : rows) report.results.add_row(row);

  report.aggregates = Table({"d", "eps", "n", "l2_acc_mean", "l2_acc_stdev", "delta_linf"});
  nlohmann::json per_d = nlohmann::json::array();
  for (int d : cfg.d_grid) {
    std::optional<double> eps_star;
    for (double eps : cfg.eps_grid) {
      std::vector<double> acc;
      for (std::size_t r = 0; r < report.results.size(); ++r)
        if (report.results.number(r, "d") == d && report.results.number(r, "eps") == eps)
          acc.push_back(report.results.number(r, "l2_robust_acc"));
      const Summary s = summarize_values(acc);
      report.aggregates.add_row({std::int64_t{d}, eps, s.n, s.mean, s.stdev, linf_axis_offset(cfg.r1, cfg.r2, d)});
      if (!eps_star && 1.0 - s.mean > 0.5) eps_star = eps;
    }
    const double delta = linf_axis_offset(cfg.r1, cfg.r2, d);
    per_d.push_back({{"d", d},
                     {"delta_linf", delta},
                     {"inv_sqrt_d", 1.0 / std::sqrt(double(d))},
                     {"eps2_star", eps_star ? nlohmann::json(*eps_star) : nlohmann::json(nullptr)},
                     {"eps2_star_above_half_delta", eps_star ? nlohmann::json(*eps_star >= 0.5 * delta)
                                                             : nlohmann::json(nullptr)}});
  }
  report.summary["per_dimension"] = per_d;
  report.runtime_seconds = elapsed(start);
  return report;
}

// ---------------------------------------------------------------------------
// angle histograms

ExperimentReport run_angle_histogram(const AngleConfig& cfg) {
  require_arg(!cfg.codims.empty() && cfg.n_retrain >= 1, "angle histogram needs codims and seeds");
  const auto start = Clock::now();
  ExperimentReport report = begin_report("angles", to_json(cfg));
  report.results = Table({"codim", "seed", "eps", "bin_lo", "bin_hi", "count", "fraction"});
  const std::size_t n_jobs = cfg.codims.size() * static_cast<std::size_t>(cfg.n_retrain);
  struct JobOut {
    std::vector<std::int64_t> counts = std::vector<std::int64_t>(kAngleBins, 0);
    std::int64_t total = 0;
    std::int64_t zero = 0;
  };
  std::vector<JobOut> jobs(n_jobs);
  parallel_for(
      n_jobs,
      [&](std::size_t job) {
        const int codim = cfg.codims[job / static_cast<std::size_t>(cfg.n_retrain)];
        const int s = static_cast<int>(job % static_cast<std::size_t>(cfg.n_retrain));
        const std::uint64_t js = job_seed(cfg.seed, static_cast<std::uint64_t>(codim), static_cast<std::uint64_t>(s));
        const SplitDataset data = make_circles(cfg.train_per_class, codim + 1, js, false, cfg.test_per_class);
        TrainConfig tc = cfg.train;
        tc.seed = js;
        const MlpModel model =
            train(MlpModel::random({codim + 1, 100, 2}, js), data.train.points, data.train.labels, tc).model;
        const auto out = fgsm(model, data.test.points, data.test.labels, cfg.eps, NormKind::L2);
        JobOut& jo = jobs[job];
        for (Eigen::Index r = 0; r < data.test.points.rows(); ++r) {
          const Vector x = data.test.points.row(r).transpose();
          const Vector eta = out.adversarial.row(r).transpose() - x;
          if (eta.isZero(0.0)) {
            ++jo.zero;
            continue;
          }
          const double angle = normal_space_angle(eta, x, data.test.spec);
          const int bin = std::min(kAngleBins - 1, static_cast<int>(angle / 5.0));
          ++jo.counts[static_cast<std::size_t>(bin)];
          ++jo.total;
        }
      },
      worker_count(cfg.workers));

  report.aggregates = Table({"codim", "n", "frac_lt10_mean", "frac_lt10_stdev", "frac_lt20_mean",
                             "frac_lt20_stdev", "zero_gradient_rows"});
  for (std::size_t ci = 0; ci < cfg.codims.size(); ++ci) {
    std::vector<double> lt10, lt20;
    std::int64_t zero = 0;
    for (int s = 0; s < cfg.n_retrain; ++s) {
      const JobOut& jo = jobs[ci * static_cast<std::size_t>(cfg.n_retrain) + static_cast<std::size_t>(s)];
      zero += jo.zero;
      for (int b = 0; b < kAngleBins; ++b) {
        const double frac = jo.total ? double(jo.counts[static_cast<std::size_t>(b)]) / double(jo.total) : 0.0;
        report.results.add_row({std::int64_t{cfg.codims[ci]}, std::int64_t{s}, cfg.eps, 5.0 * b, 5.0 * (b + 1),
                                jo.counts[static_cast<std::size_t>(b)], frac});
      }
      if (jo.total) {
        lt10.push_back(double(jo.counts[0] + jo.counts[1]) / double(jo.total));
        lt20.push_back(double(jo.counts[0] + jo.counts[1] + jo.counts[2] + jo.counts[3]) / double(jo.total));
      }
    }
    const Summary a = summarize_values(lt10), b = summarize_values(lt20);
    report.aggregates.add_row({std::int64_t{cfg.codims[ci]}, a.n, a.mean, a.stdev, b.mean, b.stdev, zero});
  }
  report.runtime_seconds = elapsed(start);
  return report;
}

// ---------------------------------------------------------------------------
// gradient field

ManifoldSpec gradfield_spec() { return ManifoldSpec::flats(-10.0, 10.0, 1, 2, 2.0); }

ExperimentReport run_gradfield(const MlpModel& model, const GradFieldConfig& cfg) {
  require(model.input_dim() == 2, ErrorKind::DimensionMismatch, "gradient fields need a 2-input model");
  require_arg(cfg.grid_res >= 2, "grid resolution must be >= 2");
  const auto start = Clock::now();
  ExperimentReport report = begin_report("gradfield", to_json(cfg));
  report.results = Table({"x", "y", "gx", "gy", "magnitude"});
  const auto xs = linspace_grid(cfg.x_lo, cfg.x_hi, cfg.grid_res);
  const auto ys = linspace_grid(cfg.y_lo, cfg.y_hi, cfg.grid_res);
  Points pts(cfg.grid_res * cfg.grid_res, 2);
  Labels labels;
  for (int i = 0; i < cfg.grid_res; ++i)
    for (int j = 0; j < cfg.grid_res; ++j) {
      pts.row(i * cfg.grid_res + j) << xs[static_cast<std::size_t>(j)], ys[static_cast<std::size_t>(i)];
      labels.push_back(ys[static_cast<std::size_t>(i)] < 1.0 ? 0 : 1);
    }
  const Points g = input_gradients(model, pts, labels);
  std::vector<double> on_lines, near_axis;
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    const double mag = g.row(r).norm();
    const double y = pts(r, 1);
    report.results.add_row({pts(r, 0), y, g(r, 0), g(r, 1), mag});
    if (std::abs(y) < 1e-9 || std::abs(y - 2.0) < 1e-9) on_lines.push_back(mag);
    if (std::abs(y - 1.0) <= cfg.near_axis_band) near_axis.push_back(mag);
  }
  const double m_lines = median(on_lines), m_axis = median(near_axis);
  report.summary = {{"median_on_manifolds", m_lines},
                    {"median_near_axis", m_axis},
                    {"ratio", m_axis > 0.0 ? m_lines / m_axis : std::numeric_limits<double>::quiet_NaN()},
                    {"on_manifold_rows", on_lines.size()},
                    {"near_axis_rows", near_axis.size()}};
  report.runtime_seconds = elapsed(start);
  return report;
}

// ---------------------------------------------------------------------------
// boundary slices

ExperimentReport run_boundary_slices(const std::vector<ClassOracle>& models, const SliceConfig& cfg) {
  require_arg(!models.empty(), "need at least one classifier");
  require_arg(cfg.grid_res >= 2, "grid resolution must be >= 2");
  const auto start = Clock::now();
  ExperimentReport report = begin_report("slices", to_json(cfg));
  report.config["n_models"] = models.size();
  report.results = Table({"z", "x", "y", "freq_class1"});
  const auto axis = linspace_grid(cfg.lo, cfg.hi, cfg.grid_res);
  for (double z : cfg.z_values) {
    Points pts(cfg.grid_res * cfg.grid_res, 3);
    for (int i = 0; i < cfg.grid_res; ++i)
      for (int j = 0; j < cfg.grid_res; ++j)
        pts.row(i * cfg.grid_res + j) << axis[static_cast<std::size_t>(j)], axis[static_cast<std::size_t>(i)], z;
    Eigen::VectorXd freq = Eigen::VectorXd::Zero(pts.rows());
    for (const auto& m : models) {
      const Labels l = m(pts);
      for (Eigen::Index r = 0; r < pts.rows(); ++r) freq[r] += l[static_cast<std::size_t>(r)] == 1 ? 1.0 : 0.0;
    }
    freq /= static_cast<double>(models.size());
    for (Eigen::Index r = 0; r < pts.rows(); ++r) report.results.add_row({z, pts(r, 0), pts(r, 1), freq[r]});
  }
  report.runtime_seconds = elapsed(start);
  return report;
}

// ---------------------------------------------------------------------------
// MNIST

ExperimentReport run_mnist_nn(const MnistConfig& cfg) {
  const auto start = Clock::now();
  const Mnist full = load_mnist(cfg.mnist_dir);
  const MnistSet tr = take_first(full.train, cfg.train_subsample);
  const MnistSet te = take_first(full.test, cfg.test_subsample);
  ExperimentReport report = begin_report("mnist-nn", to_json(cfg));
  report.results = Table({"model", "attack", "eps", "model_acc", "nn_acc"});

  const NnIndex nn(tr.images, tr.labels, NormKind::L2, Acceleration::BruteForce);
  const double nn_clean = accuracy(nn.predict(te.images), te.labels);
  const int d = static_cast<int>(tr.images.cols());

  TrainConfig natural_cfg = cfg.train;
  natural_cfg.seed = derive_seed(cfg.seed, {1});
  natural_cfg.adversary.reset();
  const MlpModel natural =
      train(MlpModel::random({d, 100, 10}, natural_cfg.seed), tr.images, tr.labels, natural_cfg).model;
  TrainConfig robust_cfg = cfg.train;
  robust_cfg.seed = derive_seed(cfg.seed, {2});
  robust_cfg.adversary = cfg.adversary;
  const MlpModel robust =
      train(MlpModel::random({d, 100, 10}, robust_cfg.seed), tr.images, tr.labels, robust_cfg).model;

  const InputBox box{0.0, 1.0};
  std::filesystem::path pgm_root;
  if (!cfg.pgm_dir.empty()) {
    pgm_root = cfg.pgm_dir;
    std::filesystem::create_directories(pgm_root);
  }
  const std::pair<const char*, const MlpModel*> models[] = {{"natural", &natural}, {"robust", &robust}};
  for (const auto& [name, model] : models) {
    report.results.add_row({std::string(name), std::string("none"), 0.0, accuracy(predict(*model, te.images), te.labels),
                            nn_clean});
    for (auto a : cfg.attacks) {
      for (double eps : cfg.eps_grid) {
        const auto out = run_gradient_attack(*model, te.images, te.labels, a, eps, NormKind::Linf, cfg.bim_step,
                                             cfg.bim_iters, derive_seed(cfg.seed, {stream::kAttack}), box);
        report.results.add_row({std::string(name), std::string(to_string(a)), eps, out.robust_accuracy(),
                                accuracy(nn.predict(out.adversarial), te.labels)});
        if (!pgm_root.empty()) {
          for (int i = 0; i < std::min<int>(cfg.pgm_examples, static_cast<int>(te.images.rows())); ++i)
            write_pgm((pgm_root / (std::string(name) + "_" + to_string(a) + "_eps" + format_double(eps) + "_" +
                                   std::to_string(i) + ".pgm"))
                          .string(),
                      out.adversarial.row(i), te.rows, te.cols);
        }
      }
    }
  }
  // Attack the NN directly and check whether the robust model is fooled too.
  const MnistSet walk_set = take_first(te, cfg.walk_queries);
  const auto walk = nn_walk_attack(nn, walk_set.images, walk_set.labels, cfg.walk);
  report.results.add_row({std::string("robust"), std::string("nn-walk"), cfg.walk.eps,
                          accuracy(predict(robust, walk.adversarial), walk_set.labels), walk.robust_accuracy()});
  if (!pgm_root.empty()) {
    for (int i = 0; i < std::min<int>(cfg.pgm_examples, static_cast<int>(walk_set.images.rows())); ++i) {
      write_pgm((pgm_root / ("original_" + std::to_string(i) + ".pgm")).string(), walk_set.images.row(i), te.rows,
                te.cols);
      write_pgm((pgm_root / ("nn_walk_" + std::to_string(i) + ".pgm")).string(), walk.adversarial.row(i), te.rows,
                te.cols);
    }
  }
  report.summary = {{"nn_clean_acc", nn_clean},
                    {"train_points", tr.images.rows()},
                    {"test_points", te.images.rows()}};
  report.runtime_seconds = elapsed(start);
  return report;
}

// ---------------------------------------------------------------------------
// config JSON

nlohmann::json to_json(const CodimSweepConfig& c) {
  return {{"family", to_string(c.family)},
          {"codims", c.codims},
          {"eps_grid", c.eps_grid},
          {"attacks", attack_names(c.attacks)},
          {"attack_norm", c.attack_norm},
          {"bim_step", c.bim_step},
          {"bim_iters", c.bim_iters},
          {"adversarial_training", c.adversarial_training},
          {"adversary", c.adversary},
          {"train", c.train},
          {"n_retrain", c.n_retrain},
          {"seed", c.seed},
          {"train_per_class", c.train_per_class},
          {"test_per_class", c.test_per_class},
          {"planes_delta", c.planes_delta},
          {"rotate", c.rotate},
          {"init", "uniform(+-1/sqrt(fan_in))"},
          {"hidden", 100}};
}

void from_json(const nlohmann::json& j, CodimSweepConfig& c) {
  if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
  c.codims = j.value("codims", c.codims);
  c.eps_grid = j.value("eps_grid", c.eps_grid);
  if (j.contains("attacks")) c.attacks = parse_attacks(j.at("attacks").get<std::vector<std::string>>());
  if (j.contains("attack_norm")) c.attack_norm = j.at("attack_norm").get<NormKind>();
  c.bim_step = j.value("bim_step", c.bim_step);
  c.bim_iters = j.value("bim_iters", c.bim_iters);
  c.adversarial_training = j.value("adversarial_training", c.adversarial_training);
  if (j.contains("adversary")) from_json(j.at("adversary"), c.adversary);
  if (j.contains("train")) from_json(j.at("train"), c.train);
  c.n_retrain = j.value("n_retrain", c.n_retrain);
  c.seed = j.value("seed", c.seed);
  c.train_per_class = j.value("train_per_class", c.train_per_class);
  c.test_per_class = j.value("test_per_class", c.test_per_class);
  c.planes_delta = j.value("planes_delta", c.planes_delta);
  c.rotate = j.value("rotate", c.rotate);
}

nlohmann::json to_json(const TradeoffConfig& c) {
  return {{"d_grid", c.d_grid},         {"r1", c.r1},
          {"r2", c.r2},                 {"train_per_class", c.train_per_class},
          {"test_per_class", c.test_per_class}, {"train_eps_fraction", c.train_eps_fraction},
          {"eps_grid", c.eps_grid},     {"bim_step", c.bim_step},
          {"bim_iters", c.bim_iters},   {"train", c.train},
          {"adversary", c.adversary},   {"n_retrain", c.n_retrain},
          {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TradeoffConfig& c) {
  c.d_grid = j.value("d_grid", c.d_grid);
  c.r1 = j.value("r1", c.r1);
  c.r2 = j.value("r2", c.r2);
  c.train_per_class = j.value("train_per_class", c.train_per_class);
  c.test_per_class = j.value("test_per_class", c.test_per_class);
  c.train_eps_fraction = j.value("train_eps_fraction", c.train_eps_fraction);
  c.eps_grid = j.value("eps_grid", c.eps_grid);
  c.bim_step = j.value("bim_step", c.bim_step);
  c.bim_iters = j.value("bim_iters", c.bim_iters);
  if (j.contains("train")) from_json(j.at("train"), c.train);
  if (j.contains("adversary")) from_json(j.at("adversary"), c.adversary);
  c.n_retrain = j.value("n_retrain", c.n_retrain);
  c.seed = j.value("seed", c.seed);
}

nlohmann::json to_json(const AngleConfig& c) {
  return {{"codims", c.codims}, {"n_retrain", c.n_retrain}, {"eps", c.eps}, {"train", c.train},
          {"train_per_class", c.train_per_class}, {"test_per_class", c.test_per_class}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, AngleConfig& c) {
  c.codims = j.value("codims", c.codims);
  c.n_retrain = j.value("n_retrain", c.n_retrain);
  c.eps = j.value("eps", c.eps);
  if (j.contains("train")) from_json(j.at("train"), c.train);
  c.train_per_class = j.value("train_per_class", c.train_per_class);
  c.test_per_class = j.value("test_per_class", c.test_per_class);
  c.seed = j.value("seed", c.seed);
}

nlohmann::json to_json(const GradFieldConfig& c) {
  return {{"grid_res", c.grid_res}, {"x_lo", c.x_lo}, {"x_hi", c.x_hi}, {"y_lo", c.y_lo},
          {"y_hi", c.y_hi}, {"near_axis_band", c.near_axis_band}};
}

void from_json(const nlohmann::json& j, GradFieldConfig& c) {
  c.grid_res = j.value("grid_res", c.grid_res);
  c.x_lo = j.value("x_lo", c.x_lo);
  c.x_hi = j.value("x_hi", c.x_hi);
  c.y_lo = j.value("y_lo", c.y_lo);
  c.y_hi = j.value("y_hi", c.y_hi);
  c.near_axis_band = j.value("near_axis_band", c.near_axis_band);
}

nlohmann::json to_json(const SliceConfig& c) {
  return {{"z_values", c.z_values}, {"grid_res", c.grid_res}, {"lo", c.lo}, {"hi", c.hi}};
}

void from_json(const nlohmann::json& j, SliceConfig& c) {
  c.z_values = j.value("z_values", c.z_values);
  c.grid_res = j.value("grid_res", c.grid_res);
  c.lo = j.value("lo", c.lo);
  c.hi = j.value("hi", c.hi);
}

nlohmann::json to_json(const MnistConfig& c) {
  return {{"mnist_dir", c.mnist_dir},   {"train_subsample", c.train_subsample},
          {"test_subsample", c.test_subsample}, {"eps_grid", c.eps_grid},
          {"attacks", attack_names(c.attacks)}, {"bim_step", c.bim_step},
          {"bim_iters", c.bim_iters},   {"train", c.train},
          {"adversary", c.adversary},   {"walk", c.walk},
          {"walk_queries", c.walk_queries}, {"pgm_examples", c.pgm_examples},
          {"pgm_dir", c.pgm_dir},       {"seed", c.seed},
          {"model", "mlp 784-100-10"}};
}

void from_json(const nlohmann::json& j, MnistConfig& c) {
  c.mnist_dir = j.value("mnist_dir", c.mnist_dir);
  c.train_subsample = j.value("train_subsample", c.train_subsample);
  c.test_subsample = j.value("test_subsample", c.test_subsample);
  c.eps_grid = j.value("eps_grid", c.eps_grid);
  if (j.contains("attacks")) c.attacks = parse_attacks(j.at("attacks").get<std::vector<std::string>>());
  c.bim_step = j.value("bim_step", c.bim_step);
  c.bim_iters = j.value("bim_iters", c.bim_iters);
  if (j.contains("train")) from_json(j.at("train"), c.train);
  if (j.contains("adversary")) from_json(j.at("adversary"), c.adversary);
  if (j.contains("walk")) from_json(j.at("walk"), c.walk);
  c.walk_queries = j.value("walk_queries", c.walk_queries);
  c.pgm_examples = j.value("pgm_examples", c.pgm_examples);
  c.pgm_dir = j.value("pgm_dir", c.pgm_dir);
  c.seed = j.value("seed", c.seed);
}

}  // namespace georob
