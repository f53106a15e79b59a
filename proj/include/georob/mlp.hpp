#pragma once

#include "georob/norm.hpp"
#include "georob/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace georob {

// Fully connected network, ReLU on hidden layers, raw logits out.
// weights[l] is (layer_dims[l+1] x layer_dims[l]).
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return layer_dims.front(); }
  int class_count() const { return layer_dims.back(); }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t parameter_count() const;

  static MlpModel zeros(const std::vector<int>& layer_dims);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  static MlpModel random(const std::vector<int>& layer_dims, std::uint64_t seed);
};

bool operator==(const MlpModel& a, const MlpModel& b);

using Matrix = Eigen::MatrixXd;

Matrix forward(const MlpModel& model, const Points& batch);
Labels predict(const MlpModel& model, const Points& batch);
Matrix softmax(const Matrix& logits);
double accuracy(const Labels& predicted, const Labels& truth);

struct Gradients {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Points input;  // d(mean loss)/d(input), one row per sample
};

Gradients loss_and_grads(const MlpModel& model, const Points& batch, const Labels& labels,
                         bool want_input_grad = true);

// Per-row gradient of each row's own cross-entropy with respect to its input.
Points input_gradients(const MlpModel& model, const Points& batch, const Labels& labels);

struct SgdConfig {
  double lr = 0.1;
  double decay_factor = 10.0;
  int decay_every = 100;
};

struct AdamConfig {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

using OptimizerConfig = std::variant<SgdConfig, AdamConfig>;

struct InputBox {
  double lo = 0.0;
  double hi = 1.0;
};

struct PgdConfig {
  double eps = 1.0;
  double step = 0.05;
  int iters = 30;
  NormKind norm = NormKind::L2;
  bool random_start = true;
  std::optional<InputBox> clip;
};

struct TrainConfig {
  OptimizerConfig optimizer = AdamConfig{};
  int epochs = 250;
  int batch_size = 0;  // 0: full batch up to 4096 points, else 128
  std::uint64_t seed = 0;
  std::optional<PgdConfig> adversary;
};

inline constexpr int kFullBatchLimit = 4096;
inline constexpr int kDefaultMiniBatch = 128;

int effective_batch_size(const TrainConfig& cfg, Eigen::Index n);

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

TrainResult train(MlpModel model, const Points& x, const Labels& y, const TrainConfig& cfg);

// Checkpoint: one JSON header line, then a little-endian float64 blob of all
// weights and biases in layer order (weights row-major).
void save_checkpoint(const MlpModel& model, const std::string& path, std::uint64_t seed,
                     const std::string& config_hash);

struct Checkpoint {
  MlpModel model;
  std::uint64_t seed = 0;
  std::string config_hash;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace georob
