#include "gtpm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <type_traits>

#include "gtpm/embedding.hpp"
#include "gtpm/error.hpp"
#include "gtpm/hash.hpp"
#include "gtpm/metrics.hpp"
#include "gtpm/pca.hpp"
#include "gtpm/persistence.hpp"
#include "gtpm/rng.hpp"
#include "gtpm/version.hpp"

namespace gtpm {
namespace {

constexpr uint64_t kSplitSeedTag = 0x747261696e746573ull;   // "traintes"
constexpr uint64_t kSubsampleSeedTag = 0x73756273616d706cull;  // "subsampl"
constexpr uint64_t kRepeatSeedTag = 0x7265706561747367ull;  // "repeatsg"

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn under a phase label; errors pick up a "phase=" prefix and
// the elapsed time lands in *slot.
template <typename Fn>
auto timed_phase(const char* phase, double* slot, Fn&& fn) {
  auto start = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      *slot += seconds_since(start);
    } else {
      auto result = fn();
      *slot += seconds_since(start);
      return result;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("phase=") + phase + ": " + e.what());
  }
}

std::map<std::string, std::vector<size_t>> group_by_label(
    const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < labels.size(); ++i)
    groups[labels[i]].push_back(i);
  return groups;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void mean_and_sd(const std::vector<double>& values, double* mean,
                 double* sd) {
  double sum = std::accumulate(values.begin(), values.end(), 0.0);
  *mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    *sd = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - *mean) * (v - *mean);
  *sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
}

struct Pipeline {
  Vocabulary vocab;
  WordGraph graph;
  GraphBuildStats stats;
};

Pipeline build_pipeline(const std::vector<DocumentRecord>& train_docs,
                        const ExperimentSpec& spec, PhaseTimings* timings) {
  Pipeline pipeline;
  pipeline.vocab = timed_phase("vocabulary", &timings->vocabulary, [&] {
    return build_vocabulary(train_docs, spec.pipeline);
  });
  pipeline.graph = timed_phase("graph", &timings->graph, [&] {
    return build_graph(train_docs, pipeline.vocab, &pipeline.stats);
  });
  return pipeline;
}

std::vector<std::string> collect_labels(
    const std::vector<DocumentRecord>& docs) {
  std::vector<std::string> labels;
  labels.reserve(docs.size());
  for (const auto& doc : docs) labels.push_back(doc.label);
  return labels;
}

std::vector<DocumentRecord> select_docs(
    const std::vector<DocumentRecord>& docs,
    const std::vector<size_t>& indices) {
  std::vector<DocumentRecord> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(docs[i]);
  return out;
}

// Walks through embeddings to report, R times with derived seeds.
RunRecord run_repeats(const Pipeline& pipeline,
                      const std::vector<DocumentRecord>& train_docs,
                      const std::vector<DocumentRecord>& test_docs,
                      const ExperimentSpec& spec, int m, int n,
                      double fraction, PhaseTimings timings) {
  if (test_docs.empty())
    throw Error(ErrorKind::invalid_argument, "phase=evaluate: test split is empty");
  if (spec.repeats < 1)
    throw Error(ErrorKind::invalid_argument, "repeats must be >= 1");

  std::vector<std::string> class_names;
  {
    std::map<std::string, int> seen;
    for (const auto& doc : train_docs) seen.emplace(doc.label, 0);
    for (auto& [label, _] : seen) class_names.push_back(label);
  }
  if (class_names.size() < 2)
    throw Error(ErrorKind::invalid_argument,
                "phase=train: training split has a single class");
  std::map<std::string, int> class_ids;
  for (size_t c = 0; c < class_names.size(); ++c)
    class_ids[class_names[c]] = static_cast<int>(c);

  std::vector<int> train_labels;
  train_labels.reserve(train_docs.size());
  for (const auto& doc : train_docs) train_labels.push_back(class_ids[doc.label]);
  std::vector<std::string> test_labels = collect_labels(test_docs);

  RunRecord record;
  record.m = m;
  record.n = n;
  record.repeats = spec.repeats;
  record.master_seed = spec.master_seed;
  record.fraction = fraction;
  record.nodes = pipeline.graph.node_count();
  record.edges = pipeline.graph.edge_count();
  record.train_docs = train_docs.size();
  record.test_docs = test_docs.size();
  record.learning_rate = spec.train.learning_rate;
  record.dropout = spec.train.dropout;
  record.timings = timings;

  double best_lr = spec.train.learning_rate;
  double best_dropout = spec.train.dropout;
  uint64_t graph_hash = graph_digest(pipeline.graph);

  for (int r = 0; r < spec.repeats; ++r) {
    uint64_t repeat_seed =
        spec.vary_seeds
            ? derive_seed(spec.master_seed, kRepeatSeedTag,
                          static_cast<uint64_t>(r))
            : spec.master_seed;

    WalkConfig walk_cfg;
    walk_cfg.m = m;
    walk_cfg.n = n;
    walk_cfg.master_seed = repeat_seed;
    walk_cfg.threads = spec.threads;
    auto walks = timed_phase("walks", &record.timings.walks, [&] {
      return generate_walks(pipeline.graph, walk_cfg);
    });

    size_t dimension = (static_cast<size_t>(m) + 1) *
                       (static_cast<size_t>(m) + 1);
    CorpusEmbedding train_embed, test_embed;
    timed_phase("embed", &record.timings.embed, [&] {
      auto nodes = embed_nodes(walks, m, spec.threads);
      train_embed = embed_corpus_with_nodes(train_docs, nodes,
                                            pipeline.vocab, dimension);
      test_embed = embed_corpus_with_nodes(test_docs, nodes, pipeline.vocab,
                                           dimension);
    });
    if (r == 0) {
      record.test_oov_rate = test_embed.oov_rate();
      record.all_oov_test_docs = test_embed.all_oov_documents;
    }

    TrainConfig train_cfg = spec.train;
    train_cfg.seed = repeat_seed;
    if (spec.use_grid_search && r == 0) {
      auto grid = timed_phase("train", &record.timings.train, [&] {
        return grid_search(train_embed.vectors, train_labels,
                           static_cast<int>(class_names.size()), train_cfg);
      });
      best_lr = grid.best.learning_rate;
      best_dropout = grid.best.dropout;
    }
    train_cfg.learning_rate = best_lr;
    train_cfg.dropout = best_dropout;

    MLPModel model = timed_phase("train", &record.timings.train, [&] {
      return train_classifier(train_embed.vectors, train_labels,
                              static_cast<int>(class_names.size()),
                              train_cfg);
    });
    model.class_names = class_names;

    EvalReport report = timed_phase("evaluate", &record.timings.evaluate, [&] {
      std::vector<int> predicted_ids = predict(model, test_embed.vectors);
      std::vector<std::string> predictions;
      predictions.reserve(predicted_ids.size());
      for (int id : predicted_ids)
        predictions.push_back(class_names[static_cast<size_t>(id)]);
      return evaluate(predictions, test_labels);
    });
    record.micro_runs.push_back(report.micro_f1);
    record.macro_runs.push_back(report.macro_f1);

    if (r == 0 && !spec.out_dir.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(spec.out_dir);
      auto in_dir = [&](const char* name) {
        return (fs::path(spec.out_dir) / name).string();
      };
      save_graph(pipeline.graph, spec.raw, in_dir("graph.tsv"));
      save_normalized_corpus(train_docs, spec.raw, in_dir("corpus_train.tsv"));
      save_normalized_corpus(test_docs, spec.raw, in_dir("corpus_test.tsv"));
      EmbeddingSet train_set{train_embed.doc_ids, train_embed.vectors,
                             dimension, m, n, repeat_seed, graph_hash};
      save_embeddings(train_set, spec.raw, in_dir("embeddings_train.tsv"));
      EmbeddingSet test_set{test_embed.doc_ids, test_embed.vectors,
                            dimension, m, n, repeat_seed, graph_hash};
      save_embeddings(test_set, spec.raw, in_dir("embeddings_test.tsv"));
      save_model(model, train_cfg, spec.raw, in_dir("model.bin"));
      save_report(report, spec.raw, in_dir("report.tsv"));
    }
  }

  record.learning_rate = best_lr;
  record.dropout = best_dropout;
  mean_and_sd(record.micro_runs, &record.micro_mean, &record.micro_sd);
  mean_and_sd(record.macro_runs, &record.macro_mean, &record.macro_sd);
  return record;
}

int resolve_walks_per_node(const ExperimentSpec& spec,
                           const std::vector<DocumentRecord>& train_docs) {
  if (spec.walk_n > 0) return spec.walk_n;
  return default_walks_per_node(average_token_count(train_docs));
}

// Normalize both sides and split off a test set when none was given.
void prepare_documents(std::vector<DocumentRecord>& train_docs,
                       std::vector<DocumentRecord>& test_docs,
                       const ExperimentSpec& spec, PhaseTimings* timings) {
  if (train_docs.empty())
    throw Error(ErrorKind::invalid_argument, "training corpus is empty");
  timed_phase("normalize", &timings->normalize, [&] {
    normalize_corpus(train_docs, spec.pipeline, spec.threads);
    normalize_corpus(test_docs, spec.pipeline, spec.threads);
  });
  if (test_docs.empty()) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
      throw Error(ErrorKind::invalid_argument,
                  "no test split given and train_fraction is not in (0, 1)");
    auto [train_idx, test_idx] =
        stratified_split(collect_labels(train_docs), spec.train_fraction,
                         derive_seed(spec.master_seed, kSplitSeedTag));
    test_docs = select_docs(train_docs, test_idx);
    train_docs = select_docs(train_docs, train_idx);
  }
}

}  // namespace

std::pair<std::vector<size_t>, std::vector<size_t>> stratified_split(
    const std::vector<std::string>& labels, double train_fraction,
    uint64_t seed) {
  if (labels.empty())
    throw Error(ErrorKind::invalid_argument, "cannot split an empty corpus");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw Error(ErrorKind::invalid_argument,
                "train fraction must be in (0, 1)");
  std::vector<size_t> train, test;
  size_t class_index = 0;
  for (auto& [label, indices] : group_by_label(labels)) {
    std::vector<size_t> shuffled = indices;
    Rng rng(derive_seed(seed, class_index++));
    shuffle(shuffled, rng);
    auto take = static_cast<size_t>(std::llround(
        train_fraction * static_cast<double>(shuffled.size())));
    take = std::max<size_t>(1, take);
    if (shuffled.size() > 1) take = std::min(take, shuffled.size() - 1);
    train.insert(train.end(), shuffled.begin(),
                 shuffled.begin() + static_cast<long>(take));
    test.insert(test.end(), shuffled.begin() + static_cast<long>(take),
                shuffled.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

std::vector<size_t> stratified_subsample(
    const std::vector<std::string>& labels, double fraction, uint64_t seed) {
  if (labels.empty())
    throw Error(ErrorKind::invalid_argument,
                "cannot subsample an empty corpus");
  if (fraction <= 0.0 || fraction > 1.0)
    throw Error(ErrorKind::invalid_argument,
                "subsample fraction must be in (0, 1]");
  std::vector<size_t> picked;
  size_t class_index = 0;
  for (auto& [label, indices] : group_by_label(labels)) {
    std::vector<size_t> shuffled = indices;
    Rng rng(derive_seed(seed, class_index++));
    shuffle(shuffled, rng);
    auto take = static_cast<size_t>(std::llround(
        fraction * static_cast<double>(shuffled.size())));
    take = std::max<size_t>(1, std::min(take, shuffled.size()));
    picked.insert(picked.end(), shuffled.begin(),
                  shuffled.begin() + static_cast<long>(take));
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

RunRecord run_experiment(std::vector<DocumentRecord> train_docs,
                         std::vector<DocumentRecord> test_docs,
                         const ExperimentSpec& spec) {
  PhaseTimings timings;
  prepare_documents(train_docs, test_docs, spec, &timings);
  Pipeline pipeline = build_pipeline(train_docs, spec, &timings);
  int n = resolve_walks_per_node(spec, train_docs);
  return run_repeats(pipeline, train_docs, test_docs, spec, spec.walk_m, n,
                     1.0, timings);
}

std::vector<RunRecord> sweep(std::vector<DocumentRecord> train_docs,
                             std::vector<DocumentRecord> test_docs,
                             const ExperimentSpec& spec,
                             const std::vector<int>& m_grid,
                             const std::vector<int>& n_grid) {
  if (m_grid.empty() || n_grid.empty())
    throw Error(ErrorKind::invalid_argument, "sweep grids must be non-empty");
  PhaseTimings shared_timings;
  prepare_documents(train_docs, test_docs, spec, &shared_timings);
  Pipeline pipeline = build_pipeline(train_docs, spec, &shared_timings);

  std::vector<RunRecord> records;
  records.reserve(m_grid.size() * n_grid.size());
  for (int m : m_grid) {
    for (int n_point : n_grid) {
      int n = n_point > 0 ? n_point
                          : default_walks_per_node(
                                average_token_count(train_docs));
      ExperimentSpec point = spec;
      point.out_dir.clear();  // grid points only report numbers
      records.push_back(run_repeats(pipeline, train_docs, test_docs, point,
                                    m, n, 1.0, shared_timings));
      shared_timings = PhaseTimings{};  // shared phases count once
    }
  }
  return records;
}

std::vector<RunRecord> robustness_curve(
    std::vector<DocumentRecord> train_docs,
    std::vector<DocumentRecord> test_docs, const ExperimentSpec& spec,
    const std::vector<double>& fractions) {
  if (fractions.empty())
    throw Error(ErrorKind::invalid_argument, "fraction list is empty");
  for (size_t i = 1; i < fractions.size(); ++i)
    if (fractions[i] > fractions[i - 1])
      throw Error(ErrorKind::invalid_argument,
                  "fractions must be sorted descending");

  PhaseTimings shared_timings;
  prepare_documents(train_docs, test_docs, spec, &shared_timings);
  std::vector<std::string> train_labels = collect_labels(train_docs);

  std::vector<RunRecord> records;
  records.reserve(fractions.size());
  for (double fraction : fractions) {
    std::vector<size_t> picked = stratified_subsample(
        train_labels, fraction,
        derive_seed(spec.master_seed, kSubsampleSeedTag));
    std::vector<DocumentRecord> subsample = select_docs(train_docs, picked);

    PhaseTimings timings = shared_timings;
    shared_timings = PhaseTimings{};
    Pipeline pipeline = build_pipeline(subsample, spec, &timings);
    int n = resolve_walks_per_node(spec, subsample);
    ExperimentSpec point = spec;
    point.out_dir.clear();
    records.push_back(run_repeats(pipeline, subsample, test_docs, point,
                                  spec.walk_m, n, fraction, timings));
  }
  return records;
}

std::vector<ProjectedPoint> project_documents(
    const std::vector<std::string>& ids,
    const std::vector<std::vector<double>>& vectors,
    const std::vector<std::string>& labels) {
  if (ids.size() != vectors.size() || ids.size() != labels.size())
    throw Error(ErrorKind::invalid_argument,
                "ids, vectors, and labels differ in length");
  Pca2D projection = project_2d_pca(vectors);
  std::vector<ProjectedPoint> points;
  points.reserve(ids.size());
  for (size_t i = 0; i < ids.size(); ++i)
    points.push_back({ids[i], projection.coordinates[i][0],
                      projection.coordinates[i][1], labels[i]});
  return points;
}

namespace {

void write_tsv_header(std::ofstream& out, const char* tag,
                      const Config& cfg) {
  out << "#" << tag << " v1\n";
  out << "#version " << kVersion << "\n";
  for (const auto& [key, value] : cfg.entries())
    out << "#cfg " << key << "=" << value << "\n";
}

}  // namespace

void write_records_tsv(const std::vector<RunRecord>& records,
                       const Config& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot create file: " + path);
  write_tsv_header(out, "gtpm-results", cfg);
  out << "fraction\tm\tn\trepeats\tmicro_mean\tmicro_sd\tmacro_mean\t"
         "macro_sd\tnodes\tedges\toov_rate\ttrain_docs\ttest_docs\t"
         "learning_rate\tdropout\tseconds\n";
  for (const auto& r : records) {
    out << format_double(r.fraction) << '\t' << r.m << '\t' << r.n << '\t'
        << r.repeats << '\t' << format_double(r.micro_mean) << '\t'
        << format_double(r.micro_sd) << '\t' << format_double(r.macro_mean)
        << '\t' << format_double(r.macro_sd) << '\t' << r.nodes << '\t'
        << r.edges << '\t' << format_double(r.test_oov_rate) << '\t'
        << r.train_docs << '\t' << r.test_docs << '\t'
        << format_double(r.learning_rate) << '\t'
        << format_double(r.dropout) << '\t'
        << format_double(r.timings.total()) << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "write failed: " + path);
}

void write_projection_tsv(const std::vector<ProjectedPoint>& points,
                          const Config& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot create file: " + path);
  write_tsv_header(out, "gtpm-projection", cfg);
  out << "id\tx\ty\tlabel\n";
  for (const auto& p : points)
    out << p.id << '\t' << format_double(p.x) << '\t' << format_double(p.y)
        << '\t' << p.label << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed: " + path);
}

}  // namespace gtpm
