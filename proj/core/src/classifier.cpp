#include "gtpm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gtpm/error.hpp"
#include "gtpm/rng.hpp"

namespace gtpm {
namespace {

constexpr uint64_t kSplitTag = 0x76616c73706c6974ull;  // "valsplit"
constexpr uint64_t kInitTag = 0x696e697477626173ull;
constexpr uint64_t kEpochTag = 0x65706f6368726e67ull;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

struct BatchWork {
  std::vector<Matrix> acts;   // acts[0] = input; acts[l+1] feeds layer l+1
  std::vector<Matrix> relu;   // post-rectifier, pre-dropout, per hidden layer
  std::vector<Matrix> masks;  // dropout scale factors per hidden layer
  Matrix probs;               // per-sample output probabilities
};

Matrix affine(const Matrix& input, const Matrix& weight,
              const std::vector<double>& bias) {
  Matrix z = matmul_nt(input, weight);
  for (size_t i = 0; i < z.rows; ++i) {
    double* zi = z.row(i);
    for (size_t j = 0; j < z.cols; ++j) zi[j] += bias[j];
  }
  return z;
}

// Runs the batch through the net. With `rng` set, hidden activations
// get inverted dropout. Returns the mean cross-entropy when labels
// are provided, otherwise 0.
double forward_batch(const MLPModel& model, Matrix input,
                     const std::vector<int>& labels, double dropout,
                     Rng* rng, BatchWork& work) {
  size_t layer_total = model.layer_count();
  work.acts.clear();
  work.relu.clear();
  work.masks.clear();
  work.acts.push_back(std::move(input));

  for (size_t l = 0; l + 1 < layer_total; ++l) {
    Matrix z = affine(work.acts.back(), model.weights[l], model.biases[l]);
    for (double& v : z.data) v = v > 0.0 ? v : 0.0;
    work.relu.push_back(z);
    if (rng != nullptr && dropout > 0.0) {
      Matrix mask(z.rows, z.cols);
      double keep_scale = 1.0 / (1.0 - dropout);
      for (size_t i = 0; i < mask.data.size(); ++i) {
        mask.data[i] = rng->next_double() < dropout ? 0.0 : keep_scale;
        z.data[i] *= mask.data[i];
      }
      work.masks.push_back(std::move(mask));
    } else {
      work.masks.emplace_back();
    }
    work.acts.push_back(std::move(z));
  }

  Matrix logits = affine(work.acts.back(), model.weights[layer_total - 1],
                         model.biases[layer_total - 1]);
  size_t batch = logits.rows;
  double loss = 0.0;
  if (model.logistic_output()) {
    work.probs = Matrix(batch, 1);
    for (size_t i = 0; i < batch; ++i) {
      double z = logits.at(i, 0);
      work.probs.at(i, 0) = sigmoid(z);
      if (!labels.empty()) {
        double y = static_cast<double>(labels[i]);
        loss += softplus(z) - z * y;
      }
    }
  } else {
    work.probs = Matrix(batch, logits.cols);
    for (size_t i = 0; i < batch; ++i) {
      const double* zi = logits.row(i);
      double zmax = zi[0];
      for (size_t c = 1; c < logits.cols; ++c) zmax = std::max(zmax, zi[c]);
      double sum = 0.0;
      for (size_t c = 0; c < logits.cols; ++c)
        sum += std::exp(zi[c] - zmax);
      double log_sum = std::log(sum) + zmax;
      for (size_t c = 0; c < logits.cols; ++c)
        work.probs.at(i, c) = std::exp(zi[c] - log_sum);
      if (!labels.empty())
        loss += log_sum - zi[labels[i]];
    }
  }
  return labels.empty() ? 0.0 : loss / static_cast<double>(batch);
}

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  explicit Gradients(const MLPModel& model) {
    weights.reserve(model.weights.size());
    biases.reserve(model.biases.size());
    for (const auto& w : model.weights) weights.emplace_back(w.rows, w.cols);
    for (const auto& b : model.biases)
      biases.emplace_back(b.size(), 0.0);
  }
};

void backward_batch(const MLPModel& model, const BatchWork& work,
                    const std::vector<int>& labels, Gradients& grads) {
  size_t batch = work.probs.rows;
  double inv_batch = 1.0 / static_cast<double>(batch);

  Matrix delta;
  if (model.logistic_output()) {
    delta = Matrix(batch, 1);
    for (size_t i = 0; i < batch; ++i)
      delta.at(i, 0) =
          (work.probs.at(i, 0) - static_cast<double>(labels[i])) * inv_batch;
  } else {
    delta = work.probs;
    for (size_t i = 0; i < batch; ++i) {
      double* di = delta.row(i);
      di[labels[i]] -= 1.0;
      for (size_t c = 0; c < delta.cols; ++c) di[c] *= inv_batch;
    }
  }

  for (size_t l = model.layer_count(); l-- > 0;) {
    grads.weights[l] = matmul_tn(delta, work.acts[l]);
    auto& db = grads.biases[l];
    std::fill(db.begin(), db.end(), 0.0);
    for (size_t i = 0; i < delta.rows; ++i) {
      const double* di = delta.row(i);
      for (size_t c = 0; c < delta.cols; ++c) db[c] += di[c];
    }
    if (l == 0) break;
    Matrix upstream = matmul(delta, model.weights[l]);
    const Matrix& mask = work.masks[l - 1];
    const Matrix& rectified = work.relu[l - 1];
    if (!mask.data.empty())
      for (size_t i = 0; i < upstream.data.size(); ++i)
        upstream.data[i] *= mask.data[i];
    for (size_t i = 0; i < upstream.data.size(); ++i)
      if (rectified.data[i] <= 0.0) upstream.data[i] = 0.0;
    delta = std::move(upstream);
  }
}

MLPModel build_model(size_t input_dim, const std::vector<size_t>& hidden,
                     int classes, Rng& rng) {
  MLPModel model;
  model.classes = classes;
  model.layer_sizes.push_back(input_dim);
  for (size_t h : hidden) model.layer_sizes.push_back(h);
  model.layer_sizes.push_back(classes == 2 ? 1
                                           : static_cast<size_t>(classes));
  for (size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    size_t fan_in = model.layer_sizes[l];
    size_t fan_out = model.layer_sizes[l + 1];
    Matrix w(fan_out, fan_in);
    double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (double& v : w.data) v = rng.next_gaussian() * scale;
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }
  return model;
}

Matrix gather_rows(const std::vector<std::vector<double>>& inputs,
                   const std::vector<size_t>& indices, size_t begin,
                   size_t end) {
  size_t dim = inputs.front().size();
  Matrix batch(end - begin, dim);
  for (size_t i = begin; i < end; ++i) {
    const auto& src = inputs[indices[i]];
    std::copy(src.begin(), src.end(), batch.row(i - begin));
  }
  return batch;
}

std::vector<int> gather_labels(const std::vector<int>& labels,
                               const std::vector<size_t>& indices,
                               size_t begin, size_t end) {
  std::vector<int> out;
  out.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) out.push_back(labels[indices[i]]);
  return out;
}

void check_training_inputs(const std::vector<std::vector<double>>& inputs,
                           const std::vector<int>& labels, int classes) {
  if (inputs.empty())
    throw Error(ErrorKind::invalid_argument, "no training samples");
  if (inputs.size() != labels.size())
    throw Error(ErrorKind::invalid_argument,
                "inputs and labels differ in length");
  if (classes < 2)
    throw Error(ErrorKind::invalid_argument, "need at least 2 classes");
  size_t dim = inputs.front().size();
  for (const auto& row : inputs)
    if (row.size() != dim)
      throw Error(ErrorKind::invalid_argument,
                  "inconsistent input dimensions");
  std::vector<bool> present(static_cast<size_t>(classes), false);
  for (int y : labels) {
    if (y < 0 || y >= classes)
      throw Error(ErrorKind::invalid_argument,
                  "label " + std::to_string(y) + " outside [0, " +
                      std::to_string(classes) + ")");
    present[static_cast<size_t>(y)] = true;
  }
  size_t distinct = 0;
  for (bool p : present) distinct += p ? 1 : 0;
  if (distinct < 2)
    throw Error(ErrorKind::invalid_argument,
                "training data contains a single class; need at least 2");
}

struct AdamState {
  std::vector<Matrix> w_m, w_v;
  std::vector<std::vector<double>> b_m, b_v;
  uint64_t step = 0;

  explicit AdamState(const MLPModel& model) {
    for (const auto& w : model.weights) {
      w_m.emplace_back(w.rows, w.cols);
      w_v.emplace_back(w.rows, w.cols);
    }
    for (const auto& b : model.biases) {
      b_m.emplace_back(b.size(), 0.0);
      b_v.emplace_back(b.size(), 0.0);
    }
  }

  void apply(MLPModel& model, const Gradients& grads, double lr) {
    ++step;
    double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
    double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
    auto update = [&](double& param, double grad, double& m, double& v) {
      m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
      v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad * grad;
      param -= lr * (m / c1) / (std::sqrt(v / c2) + kAdamEpsilon);
    };
    for (size_t l = 0; l < model.weights.size(); ++l) {
      auto& w = model.weights[l].data;
      for (size_t i = 0; i < w.size(); ++i)
        update(w[i], grads.weights[l].data[i], w_m[l].data[i],
               w_v[l].data[i]);
      auto& b = model.biases[l];
      for (size_t i = 0; i < b.size(); ++i)
        update(b[i], grads.biases[l][i], b_m[l][i], b_v[l][i]);
    }
  }
};

double evaluate_loss(const MLPModel& model, const Matrix& inputs,
                     const std::vector<int>& labels, double* accuracy) {
  BatchWork work;
  double loss = forward_batch(model, inputs, labels, 0.0, nullptr, work);
  if (accuracy) {
    size_t correct = 0;
    for (size_t i = 0; i < work.probs.rows; ++i) {
      int predicted;
      if (model.logistic_output()) {
        predicted = work.probs.at(i, 0) >= 0.5 ? 1 : 0;
      } else {
        const double* pi = work.probs.row(i);
        predicted = 0;
        for (size_t c = 1; c < work.probs.cols; ++c)
          if (pi[c] > pi[predicted]) predicted = static_cast<int>(c);
      }
      if (predicted == labels[i]) ++correct;
    }
    *accuracy = static_cast<double>(correct) /
                static_cast<double>(work.probs.rows);
  }
  return loss;
}

}  // namespace

size_t MLPModel::parameter_count() const {
  size_t total = 0;
  for (const auto& w : weights) total += w.data.size();
  for (const auto& b : biases) total += b.size();
  return total;
}

const std::vector<double>& learning_rate_candidates() {
  static const std::vector<double> rates = {0.1,  0.001, 0.0001,
                                            0.02, 0.002, 0.003};
  return rates;
}

const std::vector<double>& dropout_candidates() {
  static const std::vector<double> rates = {0.1, 0.2, 0.5};
  return rates;
}

std::pair<std::vector<size_t>, std::vector<size_t>> validation_split(
    size_t count, double fraction, uint64_t seed) {
  if (count < 2)
    throw Error(ErrorKind::invalid_argument,
                "need at least 2 samples to split off validation data");
  if (fraction <= 0.0 || fraction >= 1.0)
    throw Error(ErrorKind::invalid_argument,
                "validation fraction must be in (0, 1)");
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  auto val_count = static_cast<size_t>(std::llround(
      fraction * static_cast<double>(count)));
  val_count = std::max<size_t>(1, std::min(val_count, count - 1));
  std::vector<size_t> val(order.begin(),
                          order.begin() + static_cast<long>(val_count));
  std::vector<size_t> train(order.begin() + static_cast<long>(val_count),
                            order.end());
  return {val, train};
}

MLPModel train_classifier(const std::vector<std::vector<double>>& inputs,
                          const std::vector<int>& labels, int classes,
                          const TrainConfig& cfg, TrainLog* log) {
  check_training_inputs(inputs, labels, classes);
  if (cfg.batch_size < 1)
    throw Error(ErrorKind::invalid_argument, "batch size must be >= 1");
  if (cfg.max_epochs < 1)
    throw Error(ErrorKind::invalid_argument, "max epochs must be >= 1");

  auto [val_idx, train_idx] = validation_split(
      inputs.size(), cfg.validation_fraction, derive_seed(cfg.seed, kSplitTag));
  Matrix val_inputs = gather_rows(inputs, val_idx, 0, val_idx.size());
  std::vector<int> val_labels = gather_labels(labels, val_idx, 0,
                                              val_idx.size());

  Rng init_rng(derive_seed(cfg.seed, kInitTag));
  MLPModel model = build_model(inputs.front().size(), cfg.hidden_sizes,
                               classes, init_rng);

  AdamState adam(model);
  Gradients grads(model);
  BatchWork work;

  MLPModel best = model;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int epochs_without_improvement = 0;
  int stopped_epoch = 0;

  std::vector<size_t> order = train_idx;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng epoch_rng(derive_seed(cfg.seed, kEpochTag,
                              static_cast<uint64_t>(epoch)));
    shuffle(order, epoch_rng);

    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(order.size(),
                            begin + static_cast<size_t>(cfg.batch_size));
      Matrix batch = gather_rows(inputs, order, begin, end);
      std::vector<int> batch_labels = gather_labels(labels, order, begin, end);
      double loss = forward_batch(model, std::move(batch), batch_labels,
                                  cfg.dropout, &epoch_rng, work);
      if (!std::isfinite(loss))
        throw Error(ErrorKind::numeric,
                    "non-finite training loss at epoch " +
                        std::to_string(epoch) + " (learning rate " +
                        std::to_string(cfg.learning_rate) +
                        "); training diverged");
      backward_batch(model, work, batch_labels, grads);
      adam.apply(model, grads, cfg.learning_rate);
      epoch_loss += loss * static_cast<double>(end - begin);
      seen += end - begin;
    }
    epoch_loss /= static_cast<double>(seen);

    double val_accuracy = 0.0;
    double val_loss = evaluate_loss(model, val_inputs, val_labels,
                                    &val_accuracy);
    if (!std::isfinite(val_loss))
      throw Error(ErrorKind::numeric,
                  "non-finite validation loss at epoch " +
                      std::to_string(epoch) + "; training diverged");
    if (log)
      log->epochs.push_back({epoch, epoch_loss, val_loss, val_accuracy});

    if (val_loss < best_val_loss) {
      best_val_loss = val_loss;
      best = model;
      best_epoch = epoch;
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
    }
    stopped_epoch = epoch;
    if (epochs_without_improvement >= cfg.patience) break;
  }

  if (log) {
    log->best_epoch = best_epoch;
    log->best_val_loss = best_val_loss;
    log->stopped_epoch = stopped_epoch;
  }
  return best;
}

std::vector<int> predict(const MLPModel& model,
                         const std::vector<std::vector<double>>& inputs,
                         std::vector<std::vector<double>>* scores) {
  if (scores) scores->clear();
  if (inputs.empty()) return {};
  size_t dim = model.input_dim();
  for (const auto& row : inputs)
    if (row.size() != dim)
      throw Error(ErrorKind::invalid_argument,
                  "input dimension " + std::to_string(row.size()) +
                      " does not match model input " + std::to_string(dim));

  Matrix batch(inputs.size(), dim);
  for (size_t i = 0; i < inputs.size(); ++i)
    std::copy(inputs[i].begin(), inputs[i].end(), batch.row(i));

  BatchWork work;
  forward_batch(model, std::move(batch), {}, 0.0, nullptr, work);

  std::vector<int> predictions;
  predictions.reserve(inputs.size());
  for (size_t i = 0; i < work.probs.rows; ++i) {
    if (model.logistic_output()) {
      double p = work.probs.at(i, 0);
      predictions.push_back(p >= 0.5 ? 1 : 0);
      if (scores) scores->push_back({1.0 - p, p});
    } else {
      const double* pi = work.probs.row(i);
      int arg = 0;
      for (size_t c = 1; c < work.probs.cols; ++c)
        if (pi[c] > pi[arg]) arg = static_cast<int>(c);
      predictions.push_back(arg);
      if (scores) scores->push_back(
          std::vector<double>(pi, pi + work.probs.cols));
    }
  }
  return predictions;
}

double gradient_check(const MLPModel& model,
                      const std::vector<std::vector<double>>& inputs,
                      const std::vector<int>& labels, size_t sample_size,
                      uint64_t seed) {
  if (inputs.empty() || inputs.size() != labels.size())
    throw Error(ErrorKind::invalid_argument,
                "gradient check needs a non-empty labeled batch");

  Matrix batch(inputs.size(), inputs.front().size());
  for (size_t i = 0; i < inputs.size(); ++i)
    std::copy(inputs[i].begin(), inputs[i].end(), batch.row(i));

  MLPModel probe = model;
  BatchWork work;
  forward_batch(probe, batch, labels, 0.0, nullptr, work);
  Gradients grads(probe);
  backward_batch(probe, work, labels, grads);

  auto param_at = [](MLPModel& m, size_t index) -> double& {
    for (auto& w : m.weights) {
      if (index < w.data.size()) return w.data[index];
      index -= w.data.size();
    }
    for (auto& b : m.biases) {
      if (index < b.size()) return b[index];
      index -= b.size();
    }
    throw Error(ErrorKind::invalid_argument, "parameter index out of range");
  };
  auto grad_at = [&](size_t index) -> double {
    for (size_t l = 0; l < grads.weights.size(); ++l) {
      if (index < grads.weights[l].data.size())
        return grads.weights[l].data[index];
      index -= grads.weights[l].data.size();
    }
    for (size_t l = 0; l < grads.biases.size(); ++l) {
      if (index < grads.biases[l].size()) return grads.biases[l][index];
      index -= grads.biases[l].size();
    }
    throw Error(ErrorKind::invalid_argument, "parameter index out of range");
  };

  size_t total = probe.parameter_count();
  size_t samples = std::min(sample_size, total);
  Rng rng(seed);
  const double h = 1e-5;
  double max_rel_error = 0.0;
  for (size_t s = 0; s < samples; ++s) {
    size_t index = static_cast<size_t>(rng.next_index(total));
    double& param = param_at(probe, index);
    double original = param;
    param = original + h;
    double loss_plus = forward_batch(probe, batch, labels, 0.0, nullptr, work);
    param = original - h;
    double loss_minus = forward_batch(probe, batch, labels, 0.0, nullptr, work);
    param = original;
    double numeric = (loss_plus - loss_minus) / (2.0 * h);
    double analytic = grad_at(index);
    double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-6});
    max_rel_error = std::max(max_rel_error,
                             std::fabs(numeric - analytic) / denom);
  }
  return max_rel_error;
}

GridSearchResult grid_search(const std::vector<std::vector<double>>& inputs,
                             const std::vector<int>& labels, int classes,
                             const TrainConfig& base) {
  check_training_inputs(inputs, labels, classes);
  auto [val_idx, train_idx] = validation_split(
      inputs.size(), base.validation_fraction,
      derive_seed(base.seed, kSplitTag));
  std::vector<std::vector<double>> val_inputs;
  std::vector<int> val_labels;
  val_inputs.reserve(val_idx.size());
  val_labels.reserve(val_idx.size());
  for (size_t i : val_idx) {
    val_inputs.push_back(inputs[i]);
    val_labels.push_back(labels[i]);
  }

  GridSearchResult result;
  result.best = base;
  result.best_val_micro_f1 = -1.0;
  for (double lr : learning_rate_candidates()) {
    for (double dropout : dropout_candidates()) {
      TrainConfig cfg = base;
      cfg.learning_rate = lr;
      cfg.dropout = dropout;
      double micro;
      try {
        MLPModel model = train_classifier(inputs, labels, classes, cfg);
        std::vector<int> predicted = predict(model, val_inputs);
        size_t correct = 0;
        for (size_t i = 0; i < predicted.size(); ++i)
          if (predicted[i] == val_labels[i]) ++correct;
        // single-label micro-F1 equals accuracy
        micro = static_cast<double>(correct) /
                static_cast<double>(predicted.size());
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::numeric) throw;
        micro = -1.0;  // diverged at this learning rate; skip the point
      }
      result.tried.push_back({lr, dropout, micro});
      if (micro > result.best_val_micro_f1) {
        result.best_val_micro_f1 = micro;
        result.best = cfg;
      }
    }
  }
  if (result.best_val_micro_f1 < 0.0)
    throw Error(ErrorKind::numeric,
                "every grid point diverged; no usable hyperparameters");
  return result;
}

}  // namespace gtpm
