#include <benchmark/benchmark.h>

#include <vector>

#include "gtpm/classifier.hpp"
#include "gtpm/corpus.hpp"
#include "gtpm/embedding.hpp"
#include "gtpm/graph.hpp"
#include "gtpm/rng.hpp"
#include "gtpm/walker.hpp"
#include "support/synthetic_corpus.hpp"

namespace {

gtpm_test::SyntheticSpec corpus_spec(int docs_per_class) {
  gtpm_test::SyntheticSpec spec;
  spec.docs_per_class = docs_per_class;
  spec.seed = 20250819;
  return spec;
}

std::vector<gtpm::DocumentRecord> normalized_corpus(int docs_per_class) {
  auto docs = gtpm_test::synthetic_corpus(corpus_spec(docs_per_class));
  gtpm::normalize_corpus(docs, gtpm_test::synthetic_pipeline());
  return docs;
}

gtpm::WordGraph corpus_graph(const std::vector<gtpm::DocumentRecord>& docs) {
  auto vocab = gtpm::build_vocabulary(docs, gtpm_test::synthetic_pipeline());
  return gtpm::build_graph(docs, std::move(vocab));
}

void bench_normalize(benchmark::State& state) {
  auto raw = gtpm_test::synthetic_corpus(
      corpus_spec(static_cast<int>(state.range(0))));
  auto cfg = gtpm_test::synthetic_pipeline();
  size_t tokens = 0;
  for (auto _ : state) {
    auto docs = raw;
    gtpm::normalize_corpus(docs, cfg);
    tokens = 0;
    for (const auto& doc : docs)
      for (const auto& sentence : doc.sentences) tokens += sentence.size();
    benchmark::DoNotOptimize(docs);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(tokens));
}
BENCHMARK(bench_normalize)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void bench_build_graph(benchmark::State& state) {
  auto docs = normalized_corpus(static_cast<int>(state.range(0)));
  auto cfg = gtpm_test::synthetic_pipeline();
  for (auto _ : state) {
    auto vocab = gtpm::build_vocabulary(docs, cfg);
    auto graph = gtpm::build_graph(docs, std::move(vocab));
    benchmark::DoNotOptimize(graph.edge_count());
  }
}
BENCHMARK(bench_build_graph)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void bench_generate_walks(benchmark::State& state) {
  auto docs = normalized_corpus(250);
  auto graph = corpus_graph(docs);
  gtpm::WalkConfig cfg;
  cfg.m = static_cast<int>(state.range(0));
  cfg.n = 4;
  cfg.master_seed = 42;
  cfg.threads = static_cast<int>(state.range(1));
  size_t walks = 0;
  for (auto _ : state) {
    auto all = gtpm::generate_walks(graph, cfg);
    walks = 0;
    for (const auto& per_node : all) walks += per_node.size();
    benchmark::DoNotOptimize(all);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(walks));
}
BENCHMARK(bench_generate_walks)
    ->Args({15, 1})
    ->Args({15, 4})
    ->Args({30, 4})
    ->Unit(benchmark::kMillisecond);

void bench_embed_nodes(benchmark::State& state) {
  auto docs = normalized_corpus(250);
  auto graph = corpus_graph(docs);
  gtpm::WalkConfig cfg;
  cfg.m = static_cast<int>(state.range(0));
  cfg.n = 4;
  cfg.master_seed = 42;
  cfg.threads = 4;
  auto walks = gtpm::generate_walks(graph, cfg);
  for (auto _ : state) {
    auto embeddings =
        gtpm::embed_nodes(walks, cfg.m, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(embeddings);
  }
}
BENCHMARK(bench_embed_nodes)
    ->Args({15, 1})
    ->Args({15, 4})
    ->Unit(benchmark::kMillisecond);

void bench_anonymize_walk(benchmark::State& state) {
  gtpm::Rng rng(7);
  std::vector<gtpm::Walk> walks(1024);
  for (auto& walk : walks) {
    walk.resize(static_cast<size_t>(state.range(0)) + 1);
    for (auto& node : walk)
      node = static_cast<uint32_t>(rng.next_index(2000));
  }
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gtpm::anonymize_walk(walks[i]));
    i = (i + 1) & 1023;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_anonymize_walk)->Arg(15)->Arg(30)->Arg(60);

void bench_train_epochs(benchmark::State& state) {
  auto docs = normalized_corpus(100);
  auto graph = corpus_graph(docs);
  gtpm::WalkConfig walk_cfg;
  walk_cfg.m = 15;
  walk_cfg.n = 2;
  walk_cfg.master_seed = 42;
  walk_cfg.threads = 4;
  auto embedded = gtpm::embed_corpus(docs, graph, walk_cfg);
  std::vector<int> labels;
  labels.reserve(docs.size());
  for (const auto& doc : docs) labels.push_back(doc.label == "c0" ? 0 : 1);

  gtpm::TrainConfig cfg;
  cfg.hidden_sizes = {static_cast<size_t>(state.range(0))};
  cfg.max_epochs = 5;
  cfg.patience = 5;
  cfg.seed = 7;
  for (auto _ : state) {
    auto model = gtpm::train_classifier(embedded.vectors, labels, 2, cfg);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(bench_train_epochs)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
