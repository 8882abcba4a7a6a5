#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gtpm/classifier.hpp"
#include "gtpm/config.hpp"
#include "gtpm/corpus.hpp"
#include "gtpm/embedding.hpp"
#include "gtpm/error.hpp"
#include "gtpm/experiments.hpp"
#include "gtpm/graph.hpp"
#include "gtpm/hash.hpp"
#include "gtpm/metrics.hpp"
#include "gtpm/persistence.hpp"
#include "gtpm/version.hpp"
#include "gtpm/walker.hpp"

namespace {

namespace fs = std::filesystem;

struct GlobalArgs {
  std::string config_path;
  std::string seed_text;
  std::string out_dir;
  int threads = 0;
};

gtpm::Config effective_config(const GlobalArgs& g) {
  gtpm::Config cfg;
  if (!g.config_path.empty()) cfg = gtpm::Config::load(g.config_path);
  if (!g.seed_text.empty()) cfg.set("seed", g.seed_text);
  if (!g.out_dir.empty()) cfg.set("out_dir", g.out_dir);
  if (g.threads > 0) cfg.set("threads", std::to_string(g.threads));
  return cfg;
}

uint64_t seed_of(const gtpm::Config& cfg) { return cfg.get_uint64("seed", 42); }

int threads_of(const gtpm::Config& cfg) {
  auto threads = cfg.get_int64("threads", 1);
  if (threads < 1)
    throw gtpm::Error(gtpm::ErrorKind::invalid_argument,
                      "threads must be at least 1");
  return static_cast<int>(threads);
}

int int_key(const gtpm::Config& cfg, const std::string& key, int fallback) {
  return static_cast<int>(cfg.get_int64(key, fallback));
}

// Explicit path wins; otherwise the file lands in out_dir (or the
// working directory). Parent directories are created.
std::string resolve_out(const gtpm::Config& cfg,
                        const std::string& explicit_path, const char* name) {
  fs::path path;
  if (!explicit_path.empty()) {
    path = explicit_path;
  } else {
    std::string dir = cfg.get_string("out_dir", "");
    path = dir.empty() ? fs::path(name) : fs::path(dir) / name;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  return path.string();
}

std::vector<size_t> parse_size_list(const std::string& text,
                                    const std::string& what) {
  std::vector<size_t> out;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    char* end = nullptr;
    unsigned long long value = std::strtoull(item.c_str(), &end, 10);
    if (item.empty() || end == nullptr || *end != '\0')
      throw gtpm::Error(gtpm::ErrorKind::invalid_argument,
                        what + ": '" + item + "' is not an integer");
    out.push_back(static_cast<size_t>(value));
  }
  if (out.empty())
    throw gtpm::Error(gtpm::ErrorKind::invalid_argument, what + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& what) {
  std::vector<int> out;
  for (size_t v : parse_size_list(text, what)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    char* end = nullptr;
    double value = std::strtod(item.c_str(), &end);
    if (item.empty() || end == nullptr || *end != '\0')
      throw gtpm::Error(gtpm::ErrorKind::invalid_argument,
                        what + ": '" + item + "' is not a number");
    out.push_back(value);
  }
  if (out.empty())
    throw gtpm::Error(gtpm::ErrorKind::invalid_argument, what + ": empty list");
  return out;
}

gtpm::TrainConfig train_config_from(const gtpm::Config& cfg) {
  gtpm::TrainConfig t;
  t.learning_rate = cfg.get_double("train.learning_rate", t.learning_rate);
  t.dropout = cfg.get_double("train.dropout", t.dropout);
  t.batch_size = int_key(cfg, "train.batch_size", t.batch_size);
  t.patience = int_key(cfg, "train.patience", t.patience);
  t.max_epochs = int_key(cfg, "train.max_epochs", t.max_epochs);
  t.validation_fraction =
      cfg.get_double("train.validation_fraction", t.validation_fraction);
  t.seed = seed_of(cfg);
  if (cfg.has("train.hidden_sizes"))
    t.hidden_sizes = parse_size_list(cfg.get_string("train.hidden_sizes", ""),
                                     "train.hidden_sizes");
  return t;
}

gtpm::ExperimentSpec experiment_spec(const gtpm::Config& cfg) {
  gtpm::ExperimentSpec spec;
  spec.raw = cfg;
  spec.pipeline = gtpm::pipeline_from_config(cfg);
  spec.train = train_config_from(cfg);
  spec.walk_m = int_key(cfg, "walk.m", spec.walk_m);
  spec.walk_n = int_key(cfg, "walk.n", spec.walk_n);
  spec.repeats = int_key(cfg, "experiment.repeats", spec.repeats);
  spec.vary_seeds = cfg.get_bool("experiment.vary_seeds", spec.vary_seeds);
  spec.master_seed = seed_of(cfg);
  spec.train_fraction =
      cfg.get_double("experiment.train_fraction", spec.train_fraction);
  spec.use_grid_search =
      cfg.get_bool("experiment.grid_search", spec.use_grid_search);
  spec.out_dir = cfg.get_string("out_dir", "");
  spec.threads = threads_of(cfg);
  return spec;
}

std::vector<gtpm::DocumentRecord> load_raw(const std::string& path,
                                           const std::string& format) {
  return gtpm::load_corpus(path, gtpm::parse_corpus_format(format));
}

std::unordered_map<std::string, std::string> label_index(
    const std::vector<gtpm::DocumentRecord>& docs) {
  std::unordered_map<std::string, std::string> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.emplace(doc.id, doc.label);
  return out;
}

std::vector<std::string> labels_for_ids(
    const std::vector<std::string>& ids,
    const std::unordered_map<std::string, std::string>& by_id,
    const std::string& corpus_path) {
  std::vector<std::string> labels;
  labels.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw gtpm::Error(gtpm::ErrorKind::invalid_argument,
                        corpus_path + ": no document with id '" + id + "'");
    labels.push_back(it->second);
  }
  return labels;
}

std::vector<std::string> sorted_class_names(
    const std::vector<std::string>& labels) {
  std::set<std::string> seen(labels.begin(), labels.end());
  return {seen.begin(), seen.end()};
}

std::vector<int> label_ids(const std::vector<std::string>& labels,
                           const std::vector<std::string>& class_names) {
  std::unordered_map<std::string, int> index;
  for (size_t c = 0; c < class_names.size(); ++c)
    index[class_names[c]] = static_cast<int>(c);
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (const auto& label : labels) ids.push_back(index.at(label));
  return ids;
}

void print_record(const gtpm::RunRecord& r) {
  std::printf("m=%d n=%d repeats=%d seed=%llu fraction=%.2f\n", r.m, r.n,
              r.repeats, static_cast<unsigned long long>(r.master_seed),
              r.fraction);
  std::printf("graph: %zu nodes, %llu edges; train %zu docs, test %zu docs\n",
              r.nodes, static_cast<unsigned long long>(r.edges), r.train_docs,
              r.test_docs);
  std::printf("test OOV rate %.4f; all-OOV test docs %zu\n", r.test_oov_rate,
              r.all_oov_test_docs);
  std::printf("learning rate %g, dropout %g\n", r.learning_rate, r.dropout);
  auto joined = [](const std::vector<double>& values) {
    std::string out;
    char buf[32];
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), "%.4f", v);
      if (!out.empty()) out += ", ";
      out += buf;
    }
    return out;
  };
  std::printf("micro-F1 %.4f +- %.4f  [%s]\n", r.micro_mean, r.micro_sd,
              joined(r.micro_runs).c_str());
  std::printf("macro-F1 %.4f +- %.4f  [%s]\n", r.macro_mean, r.macro_sd,
              joined(r.macro_runs).c_str());
  std::printf(
      "time %.2fs (normalize %.2f, graph %.2f, walks %.2f, embed %.2f, "
      "train %.2f, eval %.2f)\n",
      r.timings.total(), r.timings.normalize,
      r.timings.vocabulary + r.timings.graph, r.timings.walks, r.timings.embed,
      r.timings.train, r.timings.evaluate);
}

void print_record_table(const std::vector<gtpm::RunRecord>& records) {
  std::printf("%8s %4s %4s %10s %10s %10s %10s %8s %10s\n", "fraction", "m",
              "n", "micro", "micro_sd", "macro", "macro_sd", "nodes", "edges");
  for (const auto& r : records)
    std::printf("%8.3f %4d %4d %10.4f %10.4f %10.4f %10.4f %8zu %10llu\n",
                r.fraction, r.m, r.n, r.micro_mean, r.micro_sd, r.macro_mean,
                r.macro_sd, r.nodes, static_cast<unsigned long long>(r.edges));
}

void write_histogram_tsv(
    const std::vector<std::pair<uint64_t, uint64_t>>& histogram,
    const gtpm::WordGraph& graph, const gtpm::Config& cfg,
    const std::string& path) {
  std::string content = "#gtpm-histogram v1 nodes=" +
                        std::to_string(graph.node_count()) +
                        " edges=" + std::to_string(graph.edge_count()) + "\n";
  content += std::string("#version ") + gtpm::kVersion + "\n";
  for (const auto& [key, value] : cfg.entries())
    content += "#cfg " + key + "=" + value + "\n";
  content += "degree\tnodes\n";
  for (const auto& [degree, count] : histogram)
    content += std::to_string(degree) + "\t" + std::to_string(count) + "\n";
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content))
    throw gtpm::Error(gtpm::ErrorKind::io, path + ": cannot write");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word-graph random-walk text embeddings"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(gtpm::kVersion));

  GlobalArgs g;
  app.add_option("--config", g.config_path, "key=value settings file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed_text, "master random seed (default 42)");
  app.add_option("--out-dir", g.out_dir, "directory for output artifacts");
  app.add_option("--threads", g.threads, "worker threads")
      ->check(CLI::PositiveNumber);

  std::string input, format = "jsonl", output;
  std::string graph_path, corpus_path, walks_path, model_path, report_path;
  std::string train_path, test_path;
  std::string m_grid_text = "5,10,15,25", n_grid_text = "1,4";
  std::string fractions_text;
  int opt_m = -1, opt_n = -1;
  uint64_t min_degree = 1;
  bool grid_flag = false;

  auto* ingest =
      app.add_subcommand("ingest", "normalize a raw corpus into tokens");
  ingest->add_option("--input", input, "raw corpus file")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--format", format, "jsonl or tsv");
  ingest->add_option("--output", output, "normalized corpus path");
  ingest->callback([&] {
    auto cfg = effective_config(g);
    auto pipeline = gtpm::pipeline_from_config(cfg);
    auto docs = load_raw(input, format);
    gtpm::normalize_corpus(docs, pipeline, threads_of(cfg));
    std::string out = resolve_out(cfg, output, "corpus.tsv");
    gtpm::save_normalized_corpus(docs, cfg, out);
    std::printf("normalized %zu documents (avg %.1f tokens) -> %s\n",
                docs.size(), gtpm::average_token_count(docs), out.c_str());
  });

  auto* build = app.add_subcommand(
      "build-graph", "build the co-occurrence graph from a normalized corpus");
  build->add_option("--input", input, "normalized corpus file")
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--output", output, "graph path");
  build->callback([&] {
    auto cfg = effective_config(g);
    auto pipeline = gtpm::pipeline_from_config(cfg);
    auto docs = gtpm::load_normalized_corpus(input);
    auto vocab = gtpm::build_vocabulary(docs, pipeline);
    gtpm::GraphBuildStats stats;
    auto graph = gtpm::build_graph(docs, std::move(vocab), &stats);
    std::string out = resolve_out(cfg, output, "graph.tsv");
    gtpm::save_graph(graph, cfg, out);
    std::printf("graph: %zu nodes, %llu edges (%llu token pairs, %llu "
                "out-of-vocabulary) -> %s\n",
                graph.node_count(),
                static_cast<unsigned long long>(graph.edge_count()),
                static_cast<unsigned long long>(stats.pairs_seen),
                static_cast<unsigned long long>(stats.pairs_oov), out.c_str());
    std::printf("digest %s\n", gtpm::hex16(gtpm::graph_digest(graph)).c_str());
  });

  auto* stats_cmd =
      app.add_subcommand("stats", "degree statistics for a saved graph");
  stats_cmd->add_option("--graph", graph_path, "graph file")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--min-degree", min_degree,
                        "smallest degree used in the tail fit");
  stats_cmd->add_option("--histogram", output, "degree histogram output path");
  stats_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto graph = gtpm::load_graph(graph_path);
    auto histogram = gtpm::degree_histogram(graph);
    size_t isolated = 0;
    for (const auto& [degree, count] : histogram)
      if (degree == 0) isolated += count;
    std::printf("nodes %zu, edges %llu, total edge count %llu, isolated %zu\n",
                graph.node_count(),
                static_cast<unsigned long long>(graph.edge_count()),
                static_cast<unsigned long long>(graph.total_count()),
                isolated);
    std::vector<std::pair<uint64_t, uint32_t>> hubs;
    for (uint32_t v = 0; v < graph.node_count(); ++v)
      hubs.emplace_back(graph.weighted_degree(v), v);
    std::sort(hubs.rbegin(), hubs.rend());
    std::printf("top nodes by weighted degree:");
    for (size_t i = 0; i < hubs.size() && i < 5; ++i)
      std::printf(" %s(%llu)", graph.vocab().words[hubs[i].second].c_str(),
                  static_cast<unsigned long long>(hubs[i].first));
    std::printf("\n");
    size_t fit_points = 0;
    for (const auto& [degree, count] : histogram)
      if (degree >= min_degree && count > 0) ++fit_points;
    if (fit_points >= 2) {
      auto fit = gtpm::degree_tail_fit(histogram, min_degree);
      std::printf("degree tail fit: slope %.3f, R^2 %.3f over %zu points\n",
                  fit.slope, fit.r_squared, fit.points);
    } else {
      std::printf("degree tail fit: not enough distinct degrees\n");
    }
    if (!output.empty() || cfg.has("out_dir")) {
      std::string out = resolve_out(cfg, output, "degree_histogram.tsv");
      write_histogram_tsv(histogram, graph, cfg, out);
      std::printf("histogram -> %s\n", out.c_str());
    }
  });

  auto* walk_cmd =
      app.add_subcommand("walk", "generate seeded random walks over a graph");
  walk_cmd->add_option("--graph", graph_path, "graph file")
      ->required()
      ->check(CLI::ExistingFile);
  walk_cmd->add_option("--m", opt_m, "steps per walk");
  walk_cmd->add_option("--n", opt_n, "walks per node");
  walk_cmd->add_option("--output", output, "walk dump path");
  walk_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto graph = gtpm::load_graph(graph_path);
    gtpm::WalkConfig wc;
    wc.m = opt_m >= 0 ? opt_m : int_key(cfg, "walk.m", 15);
    wc.n = opt_n >= 0 ? opt_n : int_key(cfg, "walk.n", 1);
    if (wc.n < 1)
      throw gtpm::Error(gtpm::ErrorKind::invalid_argument,
                        "walk.n must be at least 1 here; the automatic "
                        "choice needs a corpus");
    wc.master_seed = seed_of(cfg);
    wc.threads = threads_of(cfg);
    auto walks = gtpm::generate_walks(graph, wc);
    gtpm::WalkSet set{std::move(walks), wc.m, wc.n, wc.master_seed,
                      gtpm::graph_digest(graph)};
    std::string out = resolve_out(cfg, output, "walks.tsv");
    gtpm::save_walks(set, cfg, out);
    size_t total = 0, truncated = 0;
    for (const auto& per_node : set.walks)
      for (const auto& walk : per_node) {
        ++total;
        if (walk.size() < static_cast<size_t>(wc.m) + 1) ++truncated;
      }
    std::printf("%zu walks (%zu ended early) -> %s\n", total, truncated,
                out.c_str());
  });

  auto* embed_cmd = app.add_subcommand(
      "embed", "embed a normalized corpus against a graph");
  embed_cmd->add_option("--graph", graph_path, "graph file")
      ->required()
      ->check(CLI::ExistingFile);
  embed_cmd->add_option("--corpus", corpus_path, "normalized corpus file")
      ->required()
      ->check(CLI::ExistingFile);
  embed_cmd->add_option("--walks", walks_path, "reuse a saved walk dump")
      ->check(CLI::ExistingFile);
  embed_cmd->add_option("--m", opt_m, "steps per walk");
  embed_cmd->add_option("--n", opt_n, "walks per node (0 = by doc length)");
  embed_cmd->add_option("--output", output, "embedding path");
  embed_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto graph = gtpm::load_graph(graph_path);
    auto docs = gtpm::load_normalized_corpus(corpus_path);
    int threads = threads_of(cfg);
    uint64_t digest = gtpm::graph_digest(graph);
    int m = opt_m >= 0 ? opt_m : int_key(cfg, "walk.m", 15);
    int n = opt_n >= 0 ? opt_n : int_key(cfg, "walk.n", 0);
    uint64_t seed = seed_of(cfg);
    std::vector<std::vector<double>> node_vectors;
    if (!walks_path.empty()) {
      auto set = gtpm::load_walks(walks_path);
      if (set.graph_digest != digest)
        throw gtpm::Error(gtpm::ErrorKind::digest_mismatch,
                          walks_path + ": walks were generated from a "
                                       "different graph");
      m = set.m;
      n = set.n;
      seed = set.seed;
      node_vectors = gtpm::embed_nodes(set.walks, m, threads);
    } else {
      if (n <= 0) n = gtpm::default_walks_per_node(
          gtpm::average_token_count(docs));
      gtpm::WalkConfig wc{m, n, seed, threads};
      node_vectors = gtpm::embed_nodes(gtpm::generate_walks(graph, wc), m,
                                       threads);
    }
    size_t dimension =
        static_cast<size_t>(m + 1) * static_cast<size_t>(m + 1);
    auto embedded = gtpm::embed_corpus_with_nodes(docs, node_vectors,
                                                  graph.vocab(), dimension);
    gtpm::EmbeddingSet set{std::move(embedded.doc_ids),
                           std::move(embedded.vectors),
                           dimension,
                           m,
                           n,
                           seed,
                           digest};
    std::string out = resolve_out(cfg, output, "embeddings.tsv");
    gtpm::save_embeddings(set, cfg, out);
    std::printf("%zu documents embedded at dimension %zu "
                "(OOV rate %.4f, all-OOV docs %zu) -> %s\n",
                set.ids.size(), dimension, embedded.oov_rate(),
                embedded.all_oov_documents, out.c_str());
  });

  auto* train_cmd =
      app.add_subcommand("train", "train a classifier on saved embeddings");
  train_cmd->add_option("--embeddings", input, "embedding file")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--corpus", corpus_path, "corpus file with labels")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--model", model_path, "model output path");
  train_cmd->add_flag("--grid", grid_flag,
                      "pick learning rate and dropout by grid search");
  train_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto embeddings = gtpm::load_embeddings(input);
    auto docs = gtpm::load_normalized_corpus(corpus_path);
    auto labels = labels_for_ids(embeddings.ids, label_index(docs),
                                 corpus_path);
    auto class_names = sorted_class_names(labels);
    if (class_names.size() < 2)
      throw gtpm::Error(gtpm::ErrorKind::invalid_argument,
                        corpus_path + ": training needs at least 2 classes");
    auto ids = label_ids(labels, class_names);
    auto train_cfg = train_config_from(cfg);
    int classes = static_cast<int>(class_names.size());
    if (grid_flag || cfg.get_bool("experiment.grid_search", false)) {
      auto grid = gtpm::grid_search(embeddings.vectors, ids, classes,
                                    train_cfg);
      train_cfg.learning_rate = grid.best.learning_rate;
      train_cfg.dropout = grid.best.dropout;
      std::printf("grid search: learning rate %g, dropout %g "
                  "(validation micro-F1 %.4f)\n",
                  train_cfg.learning_rate, train_cfg.dropout,
                  grid.best_val_micro_f1);
    }
    gtpm::TrainLog log;
    auto model = gtpm::train_classifier(embeddings.vectors, ids, classes,
                                        train_cfg, &log);
    model.class_names = class_names;
    std::string out = resolve_out(cfg, model_path, "model.bin");
    gtpm::save_model(model, train_cfg, cfg, out);
    std::printf("%d classes, %zu parameters; best epoch %d "
                "(validation loss %.4f), stopped at %d -> %s\n",
                classes, model.parameter_count(), log.best_epoch,
                log.best_val_loss, log.stopped_epoch, out.c_str());
  });

  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate a model on saved embeddings");
  eval_cmd->add_option("--model", model_path, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--embeddings", input, "embedding file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--corpus", corpus_path, "corpus file with labels")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", report_path, "report output path");
  eval_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto loaded = gtpm::load_model(model_path);
    auto embeddings = gtpm::load_embeddings(input);
    if (embeddings.dimension != loaded.model.input_dim())
      throw gtpm::Error(
          gtpm::ErrorKind::invalid_argument,
          input + ": embedding dimension " +
              std::to_string(embeddings.dimension) + " does not match the "
              "model input " + std::to_string(loaded.model.input_dim()));
    if (loaded.model.class_names.empty())
      throw gtpm::Error(gtpm::ErrorKind::invalid_argument,
                        model_path + ": model carries no class names");
    auto docs = gtpm::load_normalized_corpus(corpus_path);
    auto labels = labels_for_ids(embeddings.ids, label_index(docs),
                                 corpus_path);
    auto predicted = gtpm::predict(loaded.model, embeddings.vectors);
    std::vector<std::string> predictions;
    predictions.reserve(predicted.size());
    for (int id : predicted)
      predictions.push_back(
          loaded.model.class_names[static_cast<size_t>(id)]);
    auto report = gtpm::evaluate(predictions, labels);
    std::fputs(gtpm::report_text(report).c_str(), stdout);
    if (!report_path.empty() || cfg.has("out_dir")) {
      std::string out = resolve_out(cfg, report_path, "report.tsv");
      gtpm::save_report(report, cfg, out);
      std::printf("report -> %s\n", out.c_str());
    }
  });

  auto* run_cmd = app.add_subcommand(
      "run", "full pipeline: normalize, graph, walks, embed, train, eval");
  run_cmd->add_option("--train", train_path, "raw training corpus")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--test", test_path, "raw test corpus (else split)")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--format", format, "jsonl or tsv");
  run_cmd->add_flag("--grid", grid_flag,
                    "pick learning rate and dropout by grid search");
  run_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto spec = experiment_spec(cfg);
    if (grid_flag) spec.use_grid_search = true;
    auto train_docs = load_raw(train_path, format);
    std::vector<gtpm::DocumentRecord> test_docs;
    if (!test_path.empty()) test_docs = load_raw(test_path, format);
    auto record = gtpm::run_experiment(std::move(train_docs),
                                       std::move(test_docs), spec);
    print_record(record);
    if (!spec.out_dir.empty()) {
      std::string out = resolve_out(cfg, "", "results.tsv");
      gtpm::write_records_tsv({record}, cfg, out);
      std::printf("results -> %s\n", out.c_str());
    }
  });

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "grid over walk length and walks per node");
  sweep_cmd->add_option("--train", train_path, "raw training corpus")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--test", test_path, "raw test corpus (else split)")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--format", format, "jsonl or tsv");
  sweep_cmd->add_option("--m-grid", m_grid_text, "walk lengths, comma list");
  sweep_cmd->add_option("--n-grid", n_grid_text,
                        "walks per node, comma list");
  sweep_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto spec = experiment_spec(cfg);
    auto m_grid = parse_int_list(m_grid_text, "--m-grid");
    auto n_grid = parse_int_list(n_grid_text, "--n-grid");
    auto train_docs = load_raw(train_path, format);
    std::vector<gtpm::DocumentRecord> test_docs;
    if (!test_path.empty()) test_docs = load_raw(test_path, format);
    auto records = gtpm::sweep(std::move(train_docs), std::move(test_docs),
                               spec, m_grid, n_grid);
    print_record_table(records);
    if (!spec.out_dir.empty()) {
      std::string out = resolve_out(cfg, "", "sweep.tsv");
      gtpm::write_records_tsv(records, cfg, out);
      std::printf("results -> %s\n", out.c_str());
    }
  });

  auto* robust_cmd = app.add_subcommand(
      "robustness", "accuracy as the training set shrinks");
  robust_cmd->add_option("--train", train_path, "raw training corpus")
      ->required()
      ->check(CLI::ExistingFile);
  robust_cmd->add_option("--test", test_path, "raw test corpus (else split)")
      ->check(CLI::ExistingFile);
  robust_cmd->add_option("--format", format, "jsonl or tsv");
  robust_cmd->add_option("--fractions", fractions_text,
                         "training fractions, descending comma list");
  robust_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto spec = experiment_spec(cfg);
    std::string text = !fractions_text.empty()
                           ? fractions_text
                           : cfg.get_string("robustness.fractions",
                                            "0.10,0.08,0.06,0.04,0.02");
    auto fractions = parse_double_list(text, "--fractions");
    auto train_docs = load_raw(train_path, format);
    std::vector<gtpm::DocumentRecord> test_docs;
    if (!test_path.empty()) test_docs = load_raw(test_path, format);
    auto records = gtpm::robustness_curve(std::move(train_docs),
                                          std::move(test_docs), spec,
                                          fractions);
    print_record_table(records);
    if (!spec.out_dir.empty()) {
      std::string out = resolve_out(cfg, "", "robustness.tsv");
      gtpm::write_records_tsv(records, cfg, out);
      std::printf("results -> %s\n", out.c_str());
    }
  });

  auto* project_cmd = app.add_subcommand(
      "project", "project saved embeddings to 2D for plotting");
  project_cmd->add_option("--embeddings", input, "embedding file")
      ->required()
      ->check(CLI::ExistingFile);
  project_cmd->add_option("--corpus", corpus_path, "corpus file with labels")
      ->required()
      ->check(CLI::ExistingFile);
  project_cmd->add_option("--output", output, "projection output path");
  project_cmd->callback([&] {
    auto cfg = effective_config(g);
    auto embeddings = gtpm::load_embeddings(input);
    auto docs = gtpm::load_normalized_corpus(corpus_path);
    auto labels = labels_for_ids(embeddings.ids, label_index(docs),
                                 corpus_path);
    auto points = gtpm::project_documents(embeddings.ids, embeddings.vectors,
                                          labels);
    std::string out = resolve_out(cfg, output, "projection.tsv");
    gtpm::write_projection_tsv(points, cfg, out);
    std::printf("%zu points -> %s\n", points.size(), out.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const gtpm::Error& e) {
    std::fprintf(stderr, "gtpm: %s error: %s\n", gtpm::to_string(e.kind()),
                 e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gtpm: %s\n", e.what());
    return 1;
  }
  return 0;
}
