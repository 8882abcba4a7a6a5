#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gtpm {

struct ClassStats {
  std::string label;
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
  uint64_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Classes that only appear in predictions still get a row (their
  // errors pool into micro-F1) but stay out of the macro average.
  bool in_labels = false;
};

struct EvalReport {
  std::vector<ClassStats> per_class;  // sorted by label
  uint64_t total = 0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

// Zero-denominator precision, recall, and F1 are defined as 0.
EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& labels);

double micro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels);
double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels);

std::string report_text(const EvalReport& report);

}  // namespace gtpm
