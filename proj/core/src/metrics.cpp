#include "gtpm/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "gtpm/error.hpp"

namespace gtpm {
namespace {

double safe_ratio(uint64_t numerator, uint64_t denominator) {
  return denominator == 0 ? 0.0
                          : static_cast<double>(numerator) /
                                static_cast<double>(denominator);
}

// Count form of the harmonic mean; for pooled single-label counts it
// rounds to exactly the same double as accuracy.
double f1_from(uint64_t tp, uint64_t fp, uint64_t fn) {
  uint64_t denominator = 2 * tp + fp + fn;
  return denominator == 0 ? 0.0
                          : 2.0 * static_cast<double>(tp) /
                                static_cast<double>(denominator);
}

}  // namespace

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& labels) {
  if (predictions.size() != labels.size())
    throw Error(ErrorKind::invalid_argument,
                "predictions and labels differ in length (" +
                    std::to_string(predictions.size()) + " vs " +
                    std::to_string(labels.size()) + ")");
  if (labels.empty())
    throw Error(ErrorKind::invalid_argument,
                "cannot evaluate an empty label sequence");

  struct Tally {
    uint64_t tp = 0, fp = 0, fn = 0;
    bool in_labels = false;
  };
  std::map<std::string, Tally> tallies;
  uint64_t correct = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    tallies[labels[i]].in_labels = true;
    if (predictions[i] == labels[i]) {
      ++tallies[labels[i]].tp;
      ++correct;
    } else {
      ++tallies[labels[i]].fn;
      ++tallies[predictions[i]].fp;
    }
  }

  EvalReport report;
  report.total = labels.size();
  report.accuracy = static_cast<double>(correct) /
                    static_cast<double>(labels.size());

  uint64_t pooled_tp = 0, pooled_fp = 0, pooled_fn = 0;
  double macro_sum = 0.0;
  size_t macro_classes = 0;
  for (const auto& [label, tally] : tallies) {
    ClassStats stats;
    stats.label = label;
    stats.tp = tally.tp;
    stats.fp = tally.fp;
    stats.fn = tally.fn;
    stats.tn = report.total - tally.tp - tally.fp - tally.fn;
    stats.precision = safe_ratio(tally.tp, tally.tp + tally.fp);
    stats.recall = safe_ratio(tally.tp, tally.tp + tally.fn);
    stats.f1 = f1_from(tally.tp, tally.fp, tally.fn);
    stats.in_labels = tally.in_labels;
    pooled_tp += tally.tp;
    pooled_fp += tally.fp;
    pooled_fn += tally.fn;
    if (tally.in_labels) {
      macro_sum += stats.f1;
      ++macro_classes;
    }
    report.per_class.push_back(std::move(stats));
  }

  report.micro_f1 = f1_from(pooled_tp, pooled_fp, pooled_fn);
  report.macro_f1 = macro_classes == 0
                        ? 0.0
                        : macro_sum / static_cast<double>(macro_classes);
  return report;
}

double micro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels) {
  return evaluate(predictions, labels).micro_f1;
}

double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels) {
  return evaluate(predictions, labels).macro_f1;
}

std::string report_text(const EvalReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-20s %8s %8s %8s %10s %10s %10s\n",
                "class", "tp", "fp", "fn", "precision", "recall", "f1");
  out += line;
  for (const auto& c : report.per_class) {
    std::snprintf(line, sizeof(line),
                  "%-20s %8llu %8llu %8llu %10.4f %10.4f %10.4f%s\n",
                  c.label.c_str(), static_cast<unsigned long long>(c.tp),
                  static_cast<unsigned long long>(c.fp),
                  static_cast<unsigned long long>(c.fn), c.precision,
                  c.recall, c.f1,
                  c.in_labels ? "" : "  (prediction-only)");
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "documents %llu  micro-F1 %.4f  macro-F1 %.4f\n",
                static_cast<unsigned long long>(report.total),
                report.micro_f1, report.macro_f1);
  out += line;
  return out;
}

}  // namespace gtpm
