#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "gtpm/classifier.hpp"
#include "gtpm/error.hpp"
#include "gtpm/matrix.hpp"
#include "gtpm/rng.hpp"

using gtpm::Error;
using gtpm::ErrorKind;
using gtpm::MLPModel;
using gtpm::TrainConfig;

namespace {

struct Blobs {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
};

// Gaussian clusters with one active coordinate group per class.
Blobs make_blobs(int classes, int per_class, size_t dim, double spread,
                 uint64_t seed) {
  gtpm::Rng rng(seed);
  Blobs out;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> x(dim, 0.0);
      for (size_t d = 0; d < dim; ++d) {
        double center =
            (d % static_cast<size_t>(classes) == static_cast<size_t>(c))
                ? 3.0
                : 0.0;
        x[d] = center + spread * rng.next_gaussian();
      }
      out.inputs.push_back(std::move(x));
      out.labels.push_back(c);
    }
  }
  return out;
}

double accuracy_on(const MLPModel& model, const Blobs& data) {
  auto predicted = gtpm::predict(model, data.inputs);
  size_t correct = 0;
  for (size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == data.labels[i]) ++correct;
  return static_cast<double>(correct) /
         static_cast<double>(predicted.size());
}

bool models_equal(const MLPModel& a, const MLPModel& b) {
  if (a.layer_sizes != b.layer_sizes || a.classes != b.classes) return false;
  for (size_t l = 0; l < a.weights.size(); ++l)
    if (a.weights[l].data != b.weights[l].data) return false;
  return a.biases == b.biases;
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.hidden_sizes = {8};
  cfg.max_epochs = 6;
  cfg.patience = 3;
  cfg.batch_size = 16;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  SUBCASE("logistic output") {
    auto data = make_blobs(2, 20, 6, 1.0, 11);
    TrainConfig cfg = tiny_config();
    cfg.hidden_sizes = {7};
    cfg.max_epochs = 2;
    MLPModel model =
        gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
    double err = gtpm::gradient_check(model, data.inputs, data.labels, 150, 3);
    CHECK(err < 1e-4);
  }
  SUBCASE("softmax output") {
    auto data = make_blobs(3, 15, 5, 1.0, 12);
    TrainConfig cfg = tiny_config();
    cfg.hidden_sizes = {6, 5};
    cfg.max_epochs = 2;
    MLPModel model =
        gtpm::train_classifier(data.inputs, data.labels, 3, cfg);
    double err = gtpm::gradient_check(model, data.inputs, data.labels, 150, 4);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("learns well separated binary clusters") {
  auto train = make_blobs(2, 120, 8, 0.6, 21);
  auto test = make_blobs(2, 60, 8, 0.6, 22);
  TrainConfig cfg;
  cfg.hidden_sizes = {16};
  cfg.learning_rate = 0.003;
  cfg.batch_size = 32;
  cfg.max_epochs = 80;
  cfg.seed = 5;
  MLPModel model = gtpm::train_classifier(train.inputs, train.labels, 2, cfg);
  CHECK(model.logistic_output());
  CHECK(model.output_units() == 1);
  CHECK(accuracy_on(model, test) >= 0.95);
}

TEST_CASE("learns four softmax classes") {
  auto train = make_blobs(4, 80, 8, 0.5, 31);
  auto test = make_blobs(4, 40, 8, 0.5, 32);
  TrainConfig cfg;
  cfg.hidden_sizes = {24};
  cfg.learning_rate = 0.003;
  cfg.batch_size = 32;
  cfg.max_epochs = 80;
  cfg.seed = 6;
  MLPModel model = gtpm::train_classifier(train.inputs, train.labels, 4, cfg);
  CHECK_FALSE(model.logistic_output());
  CHECK(model.output_units() == 4);
  CHECK(accuracy_on(model, test) >= 0.90);
}

TEST_CASE("training is reproducible per seed and varies across seeds") {
  auto data = make_blobs(2, 40, 5, 0.8, 41);
  TrainConfig cfg = tiny_config();
  MLPModel a = gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
  MLPModel b = gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
  CHECK(models_equal(a, b));

  cfg.seed = 8;
  MLPModel c = gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
  CHECK_FALSE(models_equal(a, c));
}

TEST_CASE("validation split is seeded, disjoint and size-clamped") {
  auto [val, train] = gtpm::validation_split(100, 0.1, 9);
  CHECK(val.size() == 10);
  CHECK(train.size() == 90);
  std::set<size_t> seen(val.begin(), val.end());
  seen.insert(train.begin(), train.end());
  CHECK(seen.size() == 100);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 99);

  auto [val2, train2] = gtpm::validation_split(100, 0.1, 9);
  CHECK(val == val2);
  CHECK(train == train2);
  auto [val3, train3] = gtpm::validation_split(100, 0.1, 10);
  CHECK(val != val3);

  auto [tiny_val, tiny_train] = gtpm::validation_split(8, 0.01, 1);
  CHECK(tiny_val.size() == 1);
  CHECK(tiny_train.size() == 7);

  auto [big_val, big_train] = gtpm::validation_split(10, 0.99, 1);
  CHECK(big_val.size() == 9);
  CHECK(big_train.size() == 1);

  CHECK_THROWS_AS(gtpm::validation_split(10, 0.0, 1), Error);
  CHECK_THROWS_AS(gtpm::validation_split(10, 1.0, 1), Error);
  CHECK_THROWS_AS(gtpm::validation_split(1, 0.1, 1), Error);
}

TEST_CASE("logistic ties at one half predict class one") {
  MLPModel model;
  model.classes = 2;
  model.layer_sizes = {3, 1};
  model.weights.emplace_back(1, 3);
  model.biases.push_back({0.0});

  std::vector<std::vector<double>> scores;
  auto predicted = gtpm::predict(model, {{1.0, 2.0, 3.0}}, &scores);
  REQUIRE(predicted.size() == 1);
  CHECK(predicted[0] == 1);
  REQUIRE(scores.size() == 1);
  REQUIRE(scores[0].size() == 2);
  CHECK(scores[0][0] == 0.5);
  CHECK(scores[0][1] == 0.5);
}

TEST_CASE("prediction scores behave like probabilities") {
  SUBCASE("softmax rows sum to one and argmax wins") {
    auto data = make_blobs(3, 30, 6, 0.8, 51);
    TrainConfig cfg = tiny_config();
    MLPModel model =
        gtpm::train_classifier(data.inputs, data.labels, 3, cfg);
    std::vector<std::vector<double>> scores;
    auto predicted = gtpm::predict(model, data.inputs, &scores);
    REQUIRE(scores.size() == data.inputs.size());
    for (size_t i = 0; i < scores.size(); ++i) {
      REQUIRE(scores[i].size() == 3);
      double sum = 0.0;
      int arg = 0;
      for (int c = 0; c < 3; ++c) {
        CHECK(scores[i][c] >= 0.0);
        CHECK(scores[i][c] <= 1.0);
        sum += scores[i][c];
        if (scores[i][c] > scores[i][arg]) arg = c;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(predicted[i] == arg);
    }
  }
  SUBCASE("logistic scores expand to both classes") {
    auto data = make_blobs(2, 30, 6, 0.8, 52);
    TrainConfig cfg = tiny_config();
    MLPModel model =
        gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
    std::vector<std::vector<double>> scores;
    auto predicted = gtpm::predict(model, data.inputs, &scores);
    for (size_t i = 0; i < scores.size(); ++i) {
      REQUIRE(scores[i].size() == 2);
      CHECK(scores[i][0] + scores[i][1] ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(predicted[i] == (scores[i][1] >= 0.5 ? 1 : 0));
    }
  }
}

TEST_CASE("degenerate training requests are rejected") {
  auto data = make_blobs(2, 10, 4, 0.5, 61);
  TrainConfig cfg = tiny_config();

  CHECK_THROWS_AS(gtpm::train_classifier({}, {}, 2, cfg), Error);
  CHECK_THROWS_AS(
      gtpm::train_classifier(data.inputs, data.labels, 1, cfg), Error);
  CHECK_THROWS_AS(gtpm::train_classifier(data.inputs, {0, 1}, 2, cfg), Error);

  std::vector<int> out_of_range = data.labels;
  out_of_range[0] = 2;
  CHECK_THROWS_AS(
      gtpm::train_classifier(data.inputs, out_of_range, 2, cfg), Error);

  std::vector<int> single_class(data.labels.size(), 0);
  CHECK_THROWS_AS(
      gtpm::train_classifier(data.inputs, single_class, 2, cfg), Error);

  auto ragged = data.inputs;
  ragged[3].pop_back();
  CHECK_THROWS_AS(gtpm::train_classifier(ragged, data.labels, 2, cfg), Error);

  TrainConfig bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(
      gtpm::train_classifier(data.inputs, data.labels, 2, bad), Error);
  bad = cfg;
  bad.max_epochs = 0;
  CHECK_THROWS_AS(
      gtpm::train_classifier(data.inputs, data.labels, 2, bad), Error);

  MLPModel model = gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
  CHECK_THROWS_AS(gtpm::predict(model, {{1.0, 2.0}}), Error);
}

TEST_CASE("training log records early stopping and the best epoch") {
  auto data = make_blobs(2, 60, 5, 1.5, 71);
  TrainConfig cfg;
  cfg.hidden_sizes = {12};
  cfg.max_epochs = 120;
  cfg.patience = 5;
  cfg.batch_size = 16;
  cfg.seed = 3;
  gtpm::TrainLog log;
  gtpm::train_classifier(data.inputs, data.labels, 2, cfg, &log);

  REQUIRE_FALSE(log.epochs.empty());
  CHECK(log.stopped_epoch == static_cast<int>(log.epochs.size()));
  CHECK(log.stopped_epoch <= cfg.max_epochs);
  CHECK(log.best_epoch >= 1);
  CHECK(log.best_epoch <= log.stopped_epoch);

  double min_val = std::numeric_limits<double>::infinity();
  int min_epoch = 0;
  for (const auto& e : log.epochs) {
    CHECK(e.val_accuracy >= 0.0);
    CHECK(e.val_accuracy <= 1.0);
    if (e.val_loss < min_val) {
      min_val = e.val_loss;
      min_epoch = e.epoch;
    }
  }
  CHECK(log.best_epoch == min_epoch);
  CHECK(log.best_val_loss == min_val);

  if (log.stopped_epoch < cfg.max_epochs) {
    for (size_t i = log.epochs.size() - static_cast<size_t>(cfg.patience);
         i < log.epochs.size(); ++i)
      CHECK(log.epochs[i].val_loss >= log.best_val_loss);
  }
}

TEST_CASE("hyperparameter candidates are pinned") {
  const auto& lrs = gtpm::learning_rate_candidates();
  REQUIRE(lrs.size() == 6);
  CHECK(lrs == std::vector<double>{0.1, 0.001, 0.0001, 0.02, 0.002, 0.003});
  const auto& drops = gtpm::dropout_candidates();
  REQUIRE(drops.size() == 3);
  CHECK(drops == std::vector<double>{0.1, 0.2, 0.5});
}

TEST_CASE("grid search tries every candidate pair and keeps the best") {
  auto data = make_blobs(2, 30, 4, 0.8, 81);
  TrainConfig base;
  base.hidden_sizes = {4};
  base.max_epochs = 6;
  base.patience = 3;
  base.batch_size = 16;
  base.validation_fraction = 0.2;
  base.seed = 13;

  auto result = gtpm::grid_search(data.inputs, data.labels, 2, base);
  size_t expected = gtpm::learning_rate_candidates().size() *
                    gtpm::dropout_candidates().size();
  REQUIRE(result.tried.size() == expected);

  double best = -1.0;
  for (const auto& point : result.tried) best = std::max(best, point.val_micro_f1);
  CHECK(result.best_val_micro_f1 == best);
  CHECK(result.best_val_micro_f1 >= 0.0);

  for (const auto& point : result.tried) {
    if (point.val_micro_f1 == best) {
      CHECK(result.best.learning_rate == point.learning_rate);
      CHECK(result.best.dropout == point.dropout);
      break;
    }
  }
  CHECK(result.best.hidden_sizes == base.hidden_sizes);
  CHECK(result.best.seed == base.seed);
}

TEST_CASE("diverging losses surface as numeric errors") {
  auto data = make_blobs(2, 40, 5, 0.8, 101);
  TrainConfig cfg = tiny_config();
  cfg.learning_rate = 1e200;
  cfg.max_epochs = 5;
  try {
    gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
  }
}

TEST_CASE("parameter counts follow the layer shapes") {
  auto data = make_blobs(2, 20, 8, 0.8, 91);
  TrainConfig cfg = tiny_config();
  cfg.hidden_sizes = {16};
  cfg.max_epochs = 1;
  MLPModel model = gtpm::train_classifier(data.inputs, data.labels, 2, cfg);
  REQUIRE(model.layer_sizes == std::vector<size_t>{8, 16, 1});
  CHECK(model.parameter_count() == 8 * 16 + 16 + 16 * 1 + 1);

  auto multi = make_blobs(3, 15, 5, 0.8, 92);
  cfg.hidden_sizes = {6, 5};
  MLPModel soft = gtpm::train_classifier(multi.inputs, multi.labels, 3, cfg);
  REQUIRE(soft.layer_sizes == std::vector<size_t>{5, 6, 5, 3});
  CHECK(soft.parameter_count() == 5 * 6 + 6 + 6 * 5 + 5 + 5 * 3 + 3);
}
