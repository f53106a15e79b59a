#pragma once

#include "georob/attacks.hpp"
#include "georob/mlp.hpp"
#include "georob/nn_classifier.hpp"
#include "georob/norm.hpp"
#include "georob/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace georob {

enum class DatasetFamily { Circles, Planes };
const char* to_string(DatasetFamily f);
DatasetFamily parse_family(const std::string& s);

std::vector<double> linspace_grid(double lo, double hi, int count);

struct CodimSweepConfig {
  DatasetFamily family = DatasetFamily::Circles;
  std::vector<int> codims = {1, 10, 100, 500};
  std::vector<double> eps_grid = linspace_grid(0.1, 1.0, 10);
  std::vector<AttackMethod> attacks = {AttackMethod::Fgsm};
  NormKind attack_norm = NormKind::L2;
  double bim_step = 0.05;
  int bim_iters = 30;
  bool adversarial_training = false;
  PgdConfig adversary{};   // used when adversarial_training
  TrainConfig train{};     // seed field is overridden per job
  int n_retrain = 20;
  std::uint64_t seed = 0;
  int train_per_class = 1000;  // Circles
  int test_per_class = 500;    // Circles
  double planes_delta = 1.0;   // Planes
  bool rotate = false;
  unsigned workers = 0;        // 0: hardware concurrency
};

// One (codim, seed) job: generate data, train, attack on the eps grid and
// score both the MLP and a 1-NN classifier on the adversarial points.
// Rows: codim, seed, attack, eps, mlp_acc, nn_acc, clean_mlp_acc,
// clean_nn_acc, status. Aggregates over seeds exclude diverged runs.
ExperimentReport run_codim_sweep(const CodimSweepConfig& cfg);

struct TradeoffConfig {
  std::vector<int> d_grid = {2, 3, 5, 9, 17};
  double r1 = 1.0;
  double r2 = 3.0;
  int train_per_class = 500;
  int test_per_class = 250;
  double train_eps_fraction = 0.9;  // of the analytic L-inf offset
  std::vector<double> eps_grid = linspace_grid(0.1, 2.0, 20);
  double bim_step = 0.05;
  int bim_iters = 30;
  TrainConfig train{};
  PgdConfig adversary{0.0, 0.05, 30, NormKind::Linf, true, std::nullopt};
  int n_retrain = 3;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

// L-inf adversarial training on concentric (d-1)-spheres in R^d, then L2 BIM.
// Rows: d, codim, seed, eps, l2_robust_acc, delta_linf; summary carries the
// smallest eps with success rate > 0.5 per d.
ExperimentReport run_tradeoff(const TradeoffConfig& cfg);

struct AngleConfig {
  std::vector<int> codims = {1, 10, 100, 500};
  int n_retrain = 20;
  double eps = 1.0;
  TrainConfig train{SgdConfig{}, 250, 0, 0, std::nullopt};
  int train_per_class = 1000;
  int test_per_class = 500;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

inline constexpr int kAngleBins = 18;

// Histogram (5 degree bins) of angles between FGSM perturbations and the
// normal space at the test points. Rows: codim, seed, eps, bin_lo, bin_hi,
// count, fraction. Aggregates per codim: mean fraction under 10 and 20 deg.
ExperimentReport run_angle_histogram(const AngleConfig& cfg);

struct GradFieldConfig {
  int grid_res = 41;
  double x_lo = -10.0, x_hi = 10.0, y_lo = -1.0, y_hi = 3.0;
  double near_axis_band = 0.15;
};

// Loss-gradient field of a 2-input model over the grid. Labels come from the
// nearer line (y < 1 -> class 0). Rows: x, y, gx, gy, magnitude; summary
// reports median magnitudes on the lines and near y = 1 and their ratio.
ExperimentReport run_gradfield(const MlpModel& model, const GradFieldConfig& cfg);

// The 2-D Planes spec used for gradient fields: lines y = 0 and y = 2.
ManifoldSpec gradfield_spec();

struct SliceConfig {
  std::vector<double> z_values = {0.0};
  int grid_res = 81;
  double lo = -4.0, hi = 4.0;
};

// Label frequency (class 1) over an x-y grid at each z, averaged over the
// given classifiers (3-D inputs). Rows: z, x, y, freq_class1.
ExperimentReport run_boundary_slices(const std::vector<ClassOracle>& models, const SliceConfig& cfg);

struct MnistConfig {
  std::string mnist_dir;
  int train_subsample = 10000;  // 0: all 60k
  int test_subsample = 1000;    // 0: all 10k
  std::vector<double> eps_grid = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<AttackMethod> attacks = {AttackMethod::Fgsm, AttackMethod::Bim};
  double bim_step = 0.01;
  int bim_iters = 30;
  TrainConfig train{AdamConfig{1e-3, 0.9, 0.999, 1e-8}, 10, 128, 0, std::nullopt};
  PgdConfig adversary{0.3, 0.05, 10, NormKind::Linf, true, InputBox{0.0, 1.0}};
  NnWalkConfig walk{0.3, 0.0, 50, 10, NormKind::Linf, InputBox{0.0, 1.0}};
  int walk_queries = 200;
  int pgm_examples = 5;
  std::string pgm_dir;  // empty: no images
  std::uint64_t seed = 0;
};

// Rows: model, attack, eps, model_acc, nn_acc; nn-walk rows carry the
// adversarially trained model's accuracy in model_acc.
ExperimentReport run_mnist_nn(const MnistConfig& cfg);

nlohmann::json to_json(const CodimSweepConfig& c);
void from_json(const nlohmann::json& j, CodimSweepConfig& c);
nlohmann::json to_json(const TradeoffConfig& c);
void from_json(const nlohmann::json& j, TradeoffConfig& c);
nlohmann::json to_json(const AngleConfig& c);
void from_json(const nlohmann::json& j, AngleConfig& c);
nlohmann::json to_json(const GradFieldConfig& c);
void from_json(const nlohmann::json& j, GradFieldConfig& c);
nlohmann::json to_json(const SliceConfig& c);
void from_json(const nlohmann::json& j, SliceConfig& c);
nlohmann::json to_json(const MnistConfig& c);
void from_json(const nlohmann::json& j, MnistConfig& c);

}  // namespace georob
