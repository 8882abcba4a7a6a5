#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "gtpm/classifier.hpp"
#include "gtpm/error.hpp"
#include "gtpm/graph.hpp"
#include "gtpm/metrics.hpp"
#include "gtpm/persistence.hpp"
#include "gtpm/rng.hpp"
#include "gtpm/walker.hpp"
#include "support/temp_dir.hpp"
#include "support/toy_fixture.hpp"

using gtpm::Config;
using gtpm::Error;
using gtpm::ErrorKind;

namespace {

gtpm::WordGraph toy_graph() {
  auto docs = gtpm_test::toy_documents();
  auto cfg = gtpm_test::toy_pipeline();
  gtpm::normalize_corpus(docs, cfg);
  auto vocab = gtpm::build_vocabulary(docs, cfg);
  return gtpm::build_graph(docs, std::move(vocab));
}

Config sample_config() {
  Config cfg;
  cfg.set("seed", "42");
  cfg.set("walk.m", "15");
  return cfg;
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string replace_once(std::string text, const std::string& from,
                         const std::string& to) {
  size_t pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

gtpm::MLPModel tiny_model() {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  gtpm::Rng rng(17);
  for (int i = 0; i < 24; ++i) {
    double center = i % 2 == 0 ? 1.5 : -1.5;
    inputs.push_back({center + 0.3 * rng.next_gaussian(),
                      -center + 0.3 * rng.next_gaussian(),
                      0.3 * rng.next_gaussian()});
    labels.push_back(i % 2);
  }
  gtpm::TrainConfig cfg;
  cfg.hidden_sizes = {5};
  cfg.max_epochs = 4;
  cfg.patience = 2;
  cfg.batch_size = 8;
  cfg.seed = 9;
  auto model = gtpm::train_classifier(inputs, labels, 2, cfg);
  model.class_names = {"neg", "pos"};
  return model;
}

}  // namespace

TEST_CASE("graph artifacts reload exactly and re-save byte for byte") {
  gtpm_test::TempDir dir;
  auto graph = toy_graph();
  Config cfg = sample_config();

  auto path_a = dir.file("graph_a.tsv");
  uint64_t saved_digest = gtpm::save_graph(graph, cfg, path_a);
  CHECK(saved_digest == gtpm::graph_digest(graph));

  uint64_t config_digest = 0;
  auto loaded = gtpm::load_graph(path_a, &config_digest);
  CHECK(config_digest == cfg.digest());
  CHECK(loaded.node_count() == graph.node_count());
  CHECK(loaded.edge_count() == graph.edge_count());
  CHECK(loaded.total_count() == graph.total_count());
  CHECK(loaded.vocab().words == graph.vocab().words);
  CHECK(loaded.vocab().frequencies == graph.vocab().frequencies);
  for (const auto& [pair, count] : gtpm_test::toy_edges()) {
    auto a = loaded.vocab().id_of(pair.first);
    auto b = loaded.vocab().id_of(pair.second);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(loaded.count(*a, *b) == count);
  }
  CHECK(gtpm::graph_digest(loaded) == gtpm::graph_digest(graph));

  auto path_b = dir.file("graph_b.tsv");
  gtpm::save_graph(loaded, cfg, path_b);
  CHECK(gtpm_test::slurp(path_a) == gtpm_test::slurp(path_b));

  CHECK(gtpm::serialize_graph(graph, cfg) == gtpm_test::slurp(path_a));
}

TEST_CASE("normalized corpora reload with identical sentences") {
  gtpm_test::TempDir dir;
  auto docs = gtpm_test::toy_documents();
  auto pipeline = gtpm_test::toy_pipeline();
  gtpm::normalize_corpus(docs, pipeline);
  Config cfg = sample_config();

  auto path_a = dir.file("corpus_a.tsv");
  gtpm::save_normalized_corpus(docs, cfg, path_a);
  uint64_t config_digest = 0;
  auto loaded = gtpm::load_normalized_corpus(path_a, &config_digest);
  CHECK(config_digest == cfg.digest());

  REQUIRE(loaded.size() == docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    CHECK(loaded[i].id == docs[i].id);
    CHECK(loaded[i].label == docs[i].label);
    CHECK(loaded[i].sentences == docs[i].sentences);
    CHECK(loaded[i].text.empty());
  }

  auto path_b = dir.file("corpus_b.tsv");
  gtpm::save_normalized_corpus(loaded, cfg, path_b);
  CHECK(gtpm_test::slurp(path_a) == gtpm_test::slurp(path_b));
}

TEST_CASE("walk sets reload exactly") {
  gtpm_test::TempDir dir;
  auto graph = toy_graph();
  gtpm::WalkConfig walk_cfg;
  walk_cfg.m = 4;
  walk_cfg.n = 2;
  walk_cfg.master_seed = 7;
  gtpm::WalkSet set{gtpm::generate_walks(graph, walk_cfg), 4, 2, 7,
                    gtpm::graph_digest(graph)};
  Config cfg = sample_config();

  auto path_a = dir.file("walks_a.tsv");
  gtpm::save_walks(set, cfg, path_a);
  auto loaded = gtpm::load_walks(path_a);
  CHECK(loaded.m == 4);
  CHECK(loaded.n == 2);
  CHECK(loaded.seed == 7);
  CHECK(loaded.graph_digest == set.graph_digest);
  CHECK(loaded.walks == set.walks);

  auto path_b = dir.file("walks_b.tsv");
  gtpm::save_walks(loaded, cfg, path_b);
  CHECK(gtpm_test::slurp(path_a) == gtpm_test::slurp(path_b));
}

TEST_CASE("embeddings survive a text round trip digit for digit") {
  gtpm_test::TempDir dir;
  gtpm::EmbeddingSet set;
  set.ids = {"doc-1", "doc-2"};
  set.vectors = {{0.1 + 0.2, 1.0 / 3.0, 1e-17},
                 {-12345.678900000001, 2.2250738585072014e-308, 0.0}};
  set.dimension = 3;
  set.m = 15;
  set.n = 4;
  set.seed = 42;
  set.graph_digest = 0xdeadbeefcafef00dULL;
  Config cfg = sample_config();

  auto path_a = dir.file("embed_a.tsv");
  gtpm::save_embeddings(set, cfg, path_a);
  auto loaded = gtpm::load_embeddings(path_a);
  CHECK(loaded.ids == set.ids);
  CHECK(loaded.dimension == 3);
  CHECK(loaded.m == 15);
  CHECK(loaded.n == 4);
  CHECK(loaded.seed == 42);
  CHECK(loaded.graph_digest == set.graph_digest);
  REQUIRE(loaded.vectors.size() == 2);
  CHECK(loaded.vectors[0] == set.vectors[0]);
  CHECK(loaded.vectors[1] == set.vectors[1]);

  auto path_b = dir.file("embed_b.tsv");
  gtpm::save_embeddings(loaded, cfg, path_b);
  CHECK(gtpm_test::slurp(path_a) == gtpm_test::slurp(path_b));

  gtpm::EmbeddingSet bad = set;
  bad.ids.pop_back();
  CHECK(kind_of([&] {
          gtpm::save_embeddings(bad, cfg, dir.file("bad.tsv"));
        }) == ErrorKind::invalid_argument);
  bad = set;
  bad.vectors[1].pop_back();
  CHECK(kind_of([&] {
          gtpm::save_embeddings(bad, cfg, dir.file("bad.tsv"));
        }) == ErrorKind::invalid_argument);
}

TEST_CASE("models reload bit for bit") {
  gtpm_test::TempDir dir;
  auto model = tiny_model();
  gtpm::TrainConfig train_cfg;
  train_cfg.learning_rate = 0.003;
  train_cfg.dropout = 0.5;
  train_cfg.batch_size = 8;
  train_cfg.patience = 2;
  train_cfg.max_epochs = 4;
  train_cfg.validation_fraction = 0.25;
  train_cfg.seed = 9;
  train_cfg.hidden_sizes = {5};
  Config cfg = sample_config();

  auto path_a = dir.file("model_a.bin");
  gtpm::save_model(model, train_cfg, cfg, path_a);
  auto loaded = gtpm::load_model(path_a);

  CHECK(loaded.config_digest == cfg.digest());
  CHECK(loaded.model.layer_sizes == model.layer_sizes);
  CHECK(loaded.model.classes == 2);
  CHECK(loaded.model.class_names == model.class_names);
  REQUIRE(loaded.model.weights.size() == model.weights.size());
  for (size_t l = 0; l < model.weights.size(); ++l)
    CHECK(loaded.model.weights[l].data == model.weights[l].data);
  CHECK(loaded.model.biases == model.biases);
  CHECK(loaded.train_config.learning_rate == train_cfg.learning_rate);
  CHECK(loaded.train_config.dropout == train_cfg.dropout);
  CHECK(loaded.train_config.batch_size == train_cfg.batch_size);
  CHECK(loaded.train_config.patience == train_cfg.patience);
  CHECK(loaded.train_config.max_epochs == train_cfg.max_epochs);
  CHECK(loaded.train_config.validation_fraction ==
        train_cfg.validation_fraction);
  CHECK(loaded.train_config.seed == train_cfg.seed);
  CHECK(loaded.train_config.hidden_sizes == train_cfg.hidden_sizes);

  auto path_b = dir.file("model_b.bin");
  gtpm::save_model(loaded.model, loaded.train_config, cfg, path_b);
  CHECK(gtpm_test::slurp(path_a) == gtpm_test::slurp(path_b));
}

TEST_CASE("reports reload with identical numbers") {
  gtpm_test::TempDir dir;
  std::vector<std::string> labels = {"x", "x", "y", "y", "y"};
  std::vector<std::string> predictions = {"x", "z", "y", "y", "x"};
  auto report = gtpm::evaluate(predictions, labels);
  Config cfg = sample_config();

  auto path_a = dir.file("report_a.tsv");
  gtpm::save_report(report, cfg, path_a);
  uint64_t config_digest = 0;
  auto loaded = gtpm::load_report(path_a, &config_digest);
  CHECK(config_digest == cfg.digest());
  CHECK(loaded.total == report.total);
  CHECK(loaded.micro_f1 == report.micro_f1);
  CHECK(loaded.macro_f1 == report.macro_f1);
  CHECK(loaded.accuracy == report.accuracy);
  REQUIRE(loaded.per_class.size() == report.per_class.size());
  for (size_t i = 0; i < report.per_class.size(); ++i) {
    CHECK(loaded.per_class[i].label == report.per_class[i].label);
    CHECK(loaded.per_class[i].tp == report.per_class[i].tp);
    CHECK(loaded.per_class[i].fp == report.per_class[i].fp);
    CHECK(loaded.per_class[i].fn == report.per_class[i].fn);
    CHECK(loaded.per_class[i].tn == report.per_class[i].tn);
    CHECK(loaded.per_class[i].precision == report.per_class[i].precision);
    CHECK(loaded.per_class[i].recall == report.per_class[i].recall);
    CHECK(loaded.per_class[i].f1 == report.per_class[i].f1);
    CHECK(loaded.per_class[i].in_labels == report.per_class[i].in_labels);
  }

  auto path_b = dir.file("report_b.tsv");
  gtpm::save_report(loaded, cfg, path_b);
  CHECK(gtpm_test::slurp(path_a) == gtpm_test::slurp(path_b));
}

TEST_CASE("text loaders distinguish error kinds") {
  gtpm_test::TempDir dir;
  auto graph = toy_graph();
  Config cfg = sample_config();
  auto path = dir.file("graph.tsv");
  gtpm::save_graph(graph, cfg, path);
  const std::string pristine = gtpm_test::slurp(path);

  SUBCASE("missing file") {
    CHECK(kind_of([&] { gtpm::load_graph(dir.file("absent.tsv")); }) ==
          ErrorKind::io);
  }
  SUBCASE("empty file") {
    spit(path, "");
    CHECK(kind_of([&] { gtpm::load_graph(path); }) == ErrorKind::truncated);
  }
  SUBCASE("unsupported version") {
    spit(path, replace_once(pristine, "#gtpm-graph v1", "#gtpm-graph v2"));
    CHECK(kind_of([&] { gtpm::load_graph(path); }) ==
          ErrorKind::version_mismatch);
  }
  SUBCASE("wrong artifact tag") {
    CHECK(kind_of([&] { gtpm::load_normalized_corpus(path); }) ==
          ErrorKind::parse);
  }
  SUBCASE("dropped payload line") {
    std::string clipped = pristine;
    clipped.erase(clipped.rfind('\n', clipped.size() - 2) + 1);
    spit(path, clipped);
    CHECK(kind_of([&] { gtpm::load_graph(path); }) == ErrorKind::truncated);
  }
  SUBCASE("payload cut mid-line") {
    spit(path, pristine.substr(0, pristine.size() - 2));
    CHECK(kind_of([&] { gtpm::load_graph(path); }) == ErrorKind::truncated);
  }
  SUBCASE("edited payload value") {
    spit(path, replace_once(pristine, "wd\twe\t3", "wd\twe\t4"));
    CHECK(kind_of([&] { gtpm::load_graph(path); }) ==
          ErrorKind::digest_mismatch);
  }
  SUBCASE("missing #config line") {
    std::string broken = replace_once(pristine, "#config ", "#konfig ");
    spit(path, broken);
    CHECK(kind_of([&] { gtpm::load_graph(path); }) == ErrorKind::parse);
  }
  SUBCASE("garbage instead of a header") {
    spit(path, "hello world\n");
    CHECK(kind_of([&] { gtpm::load_graph(path); }) == ErrorKind::parse);
  }
}

TEST_CASE("walk loader cross-checks its header") {
  gtpm_test::TempDir dir;
  auto graph = toy_graph();
  gtpm::WalkConfig walk_cfg;
  walk_cfg.m = 3;
  walk_cfg.n = 1;
  gtpm::WalkSet set{gtpm::generate_walks(graph, walk_cfg), 3, 1, 0,
                    gtpm::graph_digest(graph)};
  auto path = dir.file("walks.tsv");
  gtpm::save_walks(set, sample_config(), path);
  const std::string pristine = gtpm_test::slurp(path);

  spit(path, replace_once(pristine, "walks=6", "walks=5"));
  CHECK(kind_of([&] { gtpm::load_walks(path); }) == ErrorKind::parse);
}

TEST_CASE("model loader distinguishes error kinds") {
  gtpm_test::TempDir dir;
  auto model = tiny_model();
  gtpm::TrainConfig train_cfg;
  train_cfg.hidden_sizes = {5};
  auto path = dir.file("model.bin");
  gtpm::save_model(model, train_cfg, sample_config(), path);
  const std::string pristine = gtpm_test::slurp(path);

  SUBCASE("shorter than the magic") {
    spit(path, pristine.substr(0, 4));
    CHECK(kind_of([&] { gtpm::load_model(path); }) == ErrorKind::truncated);
  }
  SUBCASE("wrong magic") {
    std::string bad = pristine;
    bad[0] = 'X';
    spit(path, bad);
    CHECK(kind_of([&] { gtpm::load_model(path); }) == ErrorKind::parse);
  }
  SUBCASE("unsupported version byte") {
    std::string bad = pristine;
    bad[7] = '2';
    spit(path, bad);
    CHECK(kind_of([&] { gtpm::load_model(path); }) ==
          ErrorKind::version_mismatch);
  }
  SUBCASE("cut inside the JSON header") {
    spit(path, pristine.substr(0, 40));
    CHECK(kind_of([&] { gtpm::load_model(path); }) == ErrorKind::truncated);
  }
  SUBCASE("cut inside the parameters") {
    spit(path, pristine.substr(0, pristine.size() - 7));
    CHECK(kind_of([&] { gtpm::load_model(path); }) == ErrorKind::truncated);
  }
  SUBCASE("trailing bytes") {
    spit(path, pristine + "x");
    CHECK(kind_of([&] { gtpm::load_model(path); }) == ErrorKind::parse);
  }
  SUBCASE("flipped parameter byte") {
    std::string bad = pristine;
    bad[bad.size() - 3] = static_cast<char>(bad[bad.size() - 3] ^ 0x40);
    spit(path, bad);
    CHECK(kind_of([&] { gtpm::load_model(path); }) ==
          ErrorKind::digest_mismatch);
  }
  SUBCASE("mangled JSON header") {
    std::string bad = pristine;
    bad[16] = 'X';
    spit(path, bad);
    CHECK(kind_of([&] { gtpm::load_model(path); }) == ErrorKind::parse);
  }
}

TEST_CASE("format registry pins versions") {
  CHECK(gtpm::format_version("gtpm-graph") == 1);
  CHECK(gtpm::format_version("gtpm-corpus") == 1);
  CHECK(gtpm::format_version("gtpm-walks") == 1);
  CHECK(gtpm::format_version("gtpm-embeddings") == 1);
  CHECK(gtpm::format_version("gtpm-report") == 1);
  CHECK_THROWS_AS(gtpm::format_version("gtpm-nonsense"), Error);
}

TEST_CASE("config digests separate different settings") {
  gtpm_test::TempDir dir;
  auto graph = toy_graph();
  Config a = sample_config();
  Config b = sample_config();
  b.set("walk.m", "25");

  auto path_a = dir.file("a.tsv");
  auto path_b = dir.file("b.tsv");
  gtpm::save_graph(graph, a, path_a);
  gtpm::save_graph(graph, b, path_b);

  uint64_t digest_a = 0, digest_b = 0;
  gtpm::load_graph(path_a, &digest_a);
  gtpm::load_graph(path_b, &digest_b);
  CHECK(digest_a == a.digest());
  CHECK(digest_b == b.digest());
  CHECK(digest_a != digest_b);
}
