#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtpm/classifier.hpp"
#include "gtpm/config.hpp"
#include "gtpm/corpus.hpp"
#include "gtpm/graph.hpp"
#include "gtpm/walker.hpp"

namespace gtpm {

struct ExperimentSpec {
  PipelineConfig pipeline;
  TrainConfig train;
  int walk_m = 15;
  int walk_n = 0;  // 0: pick by average document length
  int repeats = 5;
  // With vary_seeds the r-th repeat runs under derive_seed(master, r);
  // without it every repeat reuses master_seed exactly.
  bool vary_seeds = true;
  uint64_t master_seed = 42;
  // Used only when no explicit test split is given.
  double train_fraction = 0.8;
  bool use_grid_search = false;
  std::string out_dir;  // artifacts written here when non-empty
  int threads = 1;
  // The key=value settings behind this spec; stamped into artifacts.
  Config raw;
};

struct PhaseTimings {
  double normalize = 0.0;
  double vocabulary = 0.0;
  double graph = 0.0;
  double walks = 0.0;
  double embed = 0.0;
  double train = 0.0;
  double evaluate = 0.0;

  double total() const {
    return normalize + vocabulary + graph + walks + embed + train + evaluate;
  }
};

struct RunRecord {
  int m = 0;
  int n = 0;
  int repeats = 0;
  uint64_t master_seed = 0;
  double fraction = 1.0;  // training-data fraction this run used
  std::vector<double> micro_runs;
  std::vector<double> macro_runs;
  double micro_mean = 0.0;
  double micro_sd = 0.0;
  double macro_mean = 0.0;
  double macro_sd = 0.0;
  size_t nodes = 0;
  uint64_t edges = 0;
  double test_oov_rate = 0.0;
  size_t train_docs = 0;
  size_t test_docs = 0;
  size_t all_oov_test_docs = 0;
  double learning_rate = 0.0;
  double dropout = 0.0;
  PhaseTimings timings;
};

// Seeded stratified train/test split over document labels; returns
// (train indices, test indices), each ascending. Every class keeps at
// least one training document, and one test document when it has two
// or more members.
std::pair<std::vector<size_t>, std::vector<size_t>> stratified_split(
    const std::vector<std::string>& labels, double train_fraction,
    uint64_t seed);

// Seeded stratified subsample of max(1, round(fraction * class size))
// documents per class, ascending. fraction 1.0 returns every index.
std::vector<size_t> stratified_subsample(
    const std::vector<std::string>& labels, double fraction, uint64_t seed);

// Full pipeline on raw documents: normalize, split off a test set
// when none is given, build vocabulary and graph from the training
// side only, then R seeded repeats of walks, embeddings, training,
// and evaluation. Errors carry a phase= tag.
RunRecord run_experiment(std::vector<DocumentRecord> train_docs,
                         std::vector<DocumentRecord> test_docs,
                         const ExperimentSpec& spec);

// One run per (m, n) grid point, sharing the normalize/vocabulary/
// graph work (the graph does not depend on walk parameters).
std::vector<RunRecord> sweep(std::vector<DocumentRecord> train_docs,
                             std::vector<DocumentRecord> test_docs,
                             const ExperimentSpec& spec,
                             const std::vector<int>& m_grid,
                             const std::vector<int>& n_grid);

// For each fraction (descending): subsample the training split,
// rebuild vocabulary and graph from the subsample only, and evaluate
// on the full test set. Fraction 1.0 reproduces run_experiment
// bit for bit.
std::vector<RunRecord> robustness_curve(
    std::vector<DocumentRecord> train_docs,
    std::vector<DocumentRecord> test_docs, const ExperimentSpec& spec,
    const std::vector<double>& fractions);

struct ProjectedPoint {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

// PCA projection of document embeddings to 2D, labels carried along.
std::vector<ProjectedPoint> project_documents(
    const std::vector<std::string>& ids,
    const std::vector<std::vector<double>>& vectors,
    const std::vector<std::string>& labels);

// Plot-ready TSV with config and version recorded as comment lines.
void write_records_tsv(const std::vector<RunRecord>& records,
                       const Config& cfg, const std::string& path);

void write_projection_tsv(const std::vector<ProjectedPoint>& points,
                          const Config& cfg, const std::string& path);

}  // namespace gtpm
