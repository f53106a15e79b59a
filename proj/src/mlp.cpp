#include "georob/mlp.hpp"

#include "georob/attacks.hpp"
#include "georob/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace georob {

namespace {

void check_dims(const std::vector<int>& dims) {
  require_arg(dims.size() >= 2, "a network needs at least input and output layers");
  for (int d : dims) require_arg(d >= 1, "layer widths must be positive");
}

void check_batch(const MlpModel& model, const Points& batch) {
  require(batch.cols() == model.input_dim(), ErrorKind::DimensionMismatch,
          "batch width " + std::to_string(batch.cols()) + " != input dim " +
              std::to_string(model.input_dim()));
}

void check_labels(const MlpModel& model, const Points& batch, const Labels& labels) {
  require(static_cast<Eigen::Index>(labels.size()) == batch.rows(), ErrorKind::DimensionMismatch,
          "label count does not match batch size");
  for (int l : labels) require_arg(l >= 0 && l < model.class_count(), "label out of range");
}

// Pre-activations of every layer; activations are relu(z) for hidden layers.
std::vector<Matrix> forward_all(const MlpModel& model, const Points& batch) {
  std::vector<Matrix> z;
  z.reserve(model.layer_count());
  Matrix h = batch;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    Matrix zl = h * model.weights[l].transpose();
    zl.rowwise() += model.biases[l].transpose();
    if (l + 1 < model.layer_count()) h = zl.cwiseMax(0.0);
    z.push_back(std::move(zl));
  }
  return z;
}

// Backward pass from dLoss/dlogits. Returns gradients, optionally with the
// input gradient.
Gradients backward(const MlpModel& model, const Points& batch, const std::vector<Matrix>& z,
                   Matrix dz, bool want_input_grad, bool want_params) {
  Gradients g;
  const std::size_t L = model.layer_count();
  if (want_params) {
    g.weights.resize(L);
    g.biases.resize(L);
  }
  for (std::size_t l = L; l-- > 0;) {
    if (want_params) {
      if (l == 0) {
        g.weights[l] = dz.transpose() * batch;
      } else {
        g.weights[l] = dz.transpose() * z[l - 1].cwiseMax(0.0);
      }
      g.biases[l] = dz.colwise().sum().transpose();
    }
    if (l == 0) {
      if (want_input_grad) g.input = dz * model.weights[0];
      break;
    }
    Matrix dh = dz * model.weights[l];
    dz = dh.cwiseProduct((z[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return g;
}

// dLoss/dlogits per row (softmax minus one-hot) and the per-row
// cross-entropy. The true-class entry is formed as minus the sum of the other
// probabilities, so confident rows keep a tiny but nonzero gradient instead
// of cancelling to exactly zero.
Matrix logit_grad_and_loss(const Matrix& logits, const Labels& labels, Eigen::VectorXd& row_loss) {
  Matrix p(logits.rows(), logits.cols());
  row_loss.resize(logits.rows());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(r).array() - m).exp();
    const double s = e.sum();
    p.row(r) = e / s;
    const int y = labels[static_cast<std::size_t>(r)];
    row_loss[r] = std::log(s) - (logits(r, y) - m);
    p(r, y) = 0.0;
    p(r, y) = -p.row(r).sum();
  }
  return p;
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

MlpModel MlpModel::zeros(const std::vector<int>& layer_dims) {
  check_dims(layer_dims);
  MlpModel m;
  m.layer_dims = layer_dims;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    m.weights.push_back(Eigen::MatrixXd::Zero(layer_dims[l + 1], layer_dims[l]));
    m.biases.push_back(Eigen::VectorXd::Zero(layer_dims[l + 1]));
  }
  return m;
}

MlpModel MlpModel::random(const std::vector<int>& layer_dims, std::uint64_t seed) {
  MlpModel m = zeros(layer_dims);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Engine eng = make_engine(seed, {stream::kInit, l});
    const double a = 1.0 / std::sqrt(static_cast<double>(layer_dims[l]));
    std::uniform_real_distribution<double> u(-a, a);
    for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i)
      for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j) m.weights[l](i, j) = u(eng);
    for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) m.biases[l][i] = u(eng);
  }
  return m;
}

bool operator==(const MlpModel& a, const MlpModel& b) {
  if (a.layer_dims != b.layer_dims) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l)
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  return true;
}

Matrix forward(const MlpModel& model, const Points& batch) {
  check_batch(model, batch);
  require_arg(batch.allFinite(), "forward pass input contains non-finite values");
  return forward_all(model, batch).back();
}

Labels predict(const MlpModel& model, const Points& batch) {
  const Matrix logits = forward(model, batch);
  Labels out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index arg = 0;
    logits.row(r).maxCoeff(&arg);
    out[static_cast<std::size_t>(r)] = static_cast<int>(arg);
  }
  return out;
}

Matrix softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Eigen::RowVectorXd e = (logits.row(r).array() - logits.row(r).maxCoeff()).exp();
    p.row(r) = e / e.sum();
  }
  return p;
}

double accuracy(const Labels& predicted, const Labels& truth) {
  require(predicted.size() == truth.size(), ErrorKind::DimensionMismatch, "label counts differ");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Gradients loss_and_grads(const MlpModel& model, const Points& batch, const Labels& labels,
                         bool want_input_grad) {
  check_batch(model, batch);
  check_labels(model, batch, labels);
  require_arg(batch.rows() > 0, "empty batch");
  const auto z = forward_all(model, batch);
  Eigen::VectorXd row_loss;
  Matrix dz = logit_grad_and_loss(z.back(), labels, row_loss);
  const double n = static_cast<double>(batch.rows());
  dz /= n;
  Gradients g = backward(model, batch, z, std::move(dz), want_input_grad, true);
  g.loss = row_loss.sum() / n;
  return g;
}

Points input_gradients(const MlpModel& model, const Points& batch, const Labels& labels) {
  check_batch(model, batch);
  check_labels(model, batch, labels);
  const auto z = forward_all(model, batch);
  Eigen::VectorXd row_loss;
  Matrix dz = logit_grad_and_loss(z.back(), labels, row_loss);
  return backward(model, batch, z, std::move(dz), true, false).input;
}

int effective_batch_size(const TrainConfig& cfg, Eigen::Index n) {
  if (cfg.batch_size > 0) return cfg.batch_size;
  return n <= kFullBatchLimit ? static_cast<int>(std::max<Eigen::Index>(n, 1)) : kDefaultMiniBatch;
}

TrainResult train(MlpModel model, const Points& x, const Labels& y, const TrainConfig& cfg) {
  check_batch(model, x);
  check_labels(model, x, y);
  require_arg(cfg.epochs >= 0, "epochs must be non-negative");
  TrainResult result;
  const Eigen::Index n = x.rows();
  if (cfg.epochs == 0 || n == 0) {
    result.model = std::move(model);
    return result;
  }
  const int bs = effective_batch_size(cfg, n);
  const std::size_t L = model.layer_count();

  std::vector<Eigen::MatrixXd> mw(L), vw(L);
  std::vector<Eigen::VectorXd> mb(L), vb(L);
  for (std::size_t l = 0; l < L; ++l) {
    mw[l] = vw[l] = Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols());
    mb[l] = vb[l] = Eigen::VectorXd::Zero(model.biases[l].size());
  }
  long step_count = 0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (bs < n) {
      Engine eng = make_engine(cfg.seed, {stream::kShuffle, static_cast<std::uint64_t>(epoch)});
      std::shuffle(order.begin(), order.end(), eng);
    }
    double epoch_loss = 0.0;
    Eigen::Index seen = 0;
    int batch_index = 0;
    for (Eigen::Index start = 0; start < n; start += bs, ++batch_index) {
      const Eigen::Index nb = std::min<Eigen::Index>(bs, n - start);
      Points xb(nb, x.cols());
      Labels yb(static_cast<std::size_t>(nb));
      for (Eigen::Index i = 0; i < nb; ++i) {
        xb.row(i) = x.row(order[static_cast<std::size_t>(start + i)]);
        yb[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(order[static_cast<std::size_t>(start + i)])];
      }
      if (cfg.adversary) {
        const std::uint64_t attack_seed =
            derive_seed(cfg.seed, {stream::kAdversary, static_cast<std::uint64_t>(epoch),
                                   static_cast<std::uint64_t>(batch_index)});
        xb = pgd(model, xb, yb, *cfg.adversary, attack_seed).adversarial;
      }
      Gradients g = loss_and_grads(model, xb, yb, false);
      if (!std::isfinite(g.loss)) {
        throw DivergenceError(epoch, "training diverged (non-finite loss) at epoch " +
                                         std::to_string(epoch));
      }
      epoch_loss += g.loss * static_cast<double>(nb);
      seen += nb;
      ++step_count;
      if (const auto* sgd = std::get_if<SgdConfig>(&cfg.optimizer)) {
        const double lr =
            sgd->lr / std::pow(sgd->decay_factor, sgd->decay_every > 0 ? epoch / sgd->decay_every : 0);
        for (std::size_t l = 0; l < L; ++l) {
          model.weights[l] -= lr * g.weights[l];
          model.biases[l] -= lr * g.biases[l];
        }
      } else {
        const auto& adam = std::get<AdamConfig>(cfg.optimizer);
        const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step_count));
        const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step_count));
        auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
          m = adam.beta1 * m + (1.0 - adam.beta1) * grad;
          v = adam.beta2 * v + (1.0 - adam.beta2) * grad.cwiseProduct(grad);
          param.array() -= adam.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + adam.eps_hat);
        };
        for (std::size_t l = 0; l < L; ++l) {
          update(model.weights[l], mw[l], vw[l], g.weights[l]);
          update(model.biases[l], mb[l], vb[l], g.biases[l]);
        }
      }
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(seen));
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (!model.weights[l].allFinite() || !model.biases[l].allFinite())
      throw DivergenceError(cfg.epochs - 1, "training produced non-finite weights");
  }
  result.model = std::move(model);
  return result;
}

void save_checkpoint(const MlpModel& model, const std::string& path, std::uint64_t seed,
                     const std::string& config_hash) {
  static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes little-endian");
  nlohmann::json header;
  header["format"] = "georob-mlp";
  header["layer_dims"] = model.layer_dims;
  header["seed"] = seed;
  header["config_hash"] = config_hash;
  header["blob_values"] = model.parameter_count();
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open checkpoint for writing: " + path);
  out << header.dump() << '\n';
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = model.weights[l];
    out.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(model.biases[l].data()),
              static_cast<std::streamsize>(model.biases[l].size() * sizeof(double)));
  }
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open checkpoint: " + path);
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, "checkpoint header is not valid JSON: " + std::string(e.what()));
  }
  require(header.value("format", "") == "georob-mlp", ErrorKind::Format, "not a georob checkpoint");
  Checkpoint ck;
  ck.model = MlpModel::zeros(header.at("layer_dims").get<std::vector<int>>());
  ck.seed = header.at("seed").get<std::uint64_t>();
  ck.config_hash = header.at("config_hash").get<std::string>();
  const auto expected = header.at("blob_values").get<std::size_t>();
  require(expected == ck.model.parameter_count(), ErrorKind::Format,
          "checkpoint blob size " + std::to_string(expected) + " does not match layer dims (" +
              std::to_string(ck.model.parameter_count()) + ")");
  auto read = [&](double* dst, Eigen::Index count) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count * sizeof(double)));
    require(in.gcount() == static_cast<std::streamsize>(count * sizeof(double)), ErrorKind::Format,
            "checkpoint blob truncated");
  };
  for (std::size_t l = 0; l < ck.model.layer_count(); ++l) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(
        ck.model.weights[l].rows(), ck.model.weights[l].cols());
    read(w.data(), w.size());
    ck.model.weights[l] = w;
    read(ck.model.biases[l].data(), ck.model.biases[l].size());
  }
  in.peek();
  require(in.eof(), ErrorKind::Format, "checkpoint has trailing bytes");
  return ck;
}

}  // namespace georob
