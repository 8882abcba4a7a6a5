#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtpm/matrix.hpp"

namespace gtpm {

// Feedforward net with rectifier hidden layers. Binary problems use a
// single logistic output unit; more classes use softmax.
struct MLPModel {
  std::vector<size_t> layer_sizes;  // input, hidden..., output units
  std::vector<Matrix> weights;      // weights[l] is (out x in) for layer l
  std::vector<std::vector<double>> biases;
  int classes = 0;
  // Optional label names, indexed by class id; carried through
  // persistence so predictions can be mapped back to labels.
  std::vector<std::string> class_names;

  bool logistic_output() const { return classes == 2; }
  size_t input_dim() const { return layer_sizes.front(); }
  size_t output_units() const { return layer_sizes.back(); }
  size_t layer_count() const { return weights.size(); }
  size_t parameter_count() const;
};

struct TrainConfig {
  double learning_rate = 0.002;
  double dropout = 0.2;
  int batch_size = 64;
  int patience = 10;
  int max_epochs = 200;
  double validation_fraction = 0.1;
  uint64_t seed = 0;
  std::vector<size_t> hidden_sizes = {64, 128, 256, 512};
};

// The candidate sets hyperparameters are drawn from by default.
const std::vector<double>& learning_rate_candidates();
const std::vector<double>& dropout_candidates();

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  int stopped_epoch = 0;
};

// Seeded shuffle split used for validation; returned pair is
// (validation indices, training indices).
std::pair<std::vector<size_t>, std::vector<size_t>> validation_split(
    size_t count, double fraction, uint64_t seed);

// Labels are class indices in [0, classes). Minimizes cross-entropy
// with Adam and inverted dropout; early-stops when validation loss
// stops improving and restores the best epoch's parameters.
MLPModel train_classifier(const std::vector<std::vector<double>>& inputs,
                          const std::vector<int>& labels, int classes,
                          const TrainConfig& cfg, TrainLog* log = nullptr);

// Predicted class per input; per-class scores optionally returned
// (logistic scores are expanded to [1-p, p]). Ties at the logistic
// threshold 0.5 go to class 1.
std::vector<int> predict(const MLPModel& model,
                         const std::vector<std::vector<double>>& inputs,
                         std::vector<std::vector<double>>* scores = nullptr);

// Compares analytic gradients against central finite differences
// (step 1e-5) on sample_size randomly chosen parameters; returns the
// maximum relative error. Dropout is disabled.
double gradient_check(const MLPModel& model,
                      const std::vector<std::vector<double>>& inputs,
                      const std::vector<int>& labels,
                      size_t sample_size = 120, uint64_t seed = 1);

struct GridPoint {
  double learning_rate = 0.0;
  double dropout = 0.0;
  double val_micro_f1 = 0.0;
};

struct GridSearchResult {
  TrainConfig best;
  double best_val_micro_f1 = 0.0;
  std::vector<GridPoint> tried;
};

// Trains one model per (learning rate, dropout) candidate and picks
// the pair with the best validation micro-F1 (first wins ties, in
// candidate order).
GridSearchResult grid_search(const std::vector<std::vector<double>>& inputs,
                             const std::vector<int>& labels, int classes,
                             const TrainConfig& base);

}  // namespace gtpm
