#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtpm/classifier.hpp"
#include "gtpm/config.hpp"
#include "gtpm/corpus.hpp"
#include "gtpm/graph.hpp"
#include "gtpm/metrics.hpp"
#include "gtpm/walker.hpp"

namespace gtpm {

// Current on-disk format versions; loaders reject anything else.
int format_version(const std::string& tag);

// Text artifacts share one layout: a `#<tag> v<version> key=value...`
// header line, a `#config <digest>` line tying the artifact to the
// pipeline settings that produced it, a `#checksum <digest>` line over
// the payload bytes, then the payload. Loaders report version
// mismatches, truncation, and checksum failures as distinct errors.

uint64_t save_graph(const WordGraph& graph, const Config& cfg,
                    const std::string& path);
WordGraph load_graph(const std::string& path,
                     uint64_t* config_digest = nullptr);
// Full file image / payload digest without touching the filesystem.
std::string serialize_graph(const WordGraph& graph, const Config& cfg);
uint64_t graph_digest(const WordGraph& graph);

uint64_t save_normalized_corpus(const std::vector<DocumentRecord>& docs,
                                const Config& cfg, const std::string& path);
std::vector<DocumentRecord> load_normalized_corpus(
    const std::string& path, uint64_t* config_digest = nullptr);

struct WalkSet {
  std::vector<std::vector<Walk>> walks;  // [node id][walk index]
  int m = 0;
  int n = 0;
  uint64_t seed = 0;
  uint64_t graph_digest = 0;
};

uint64_t save_walks(const WalkSet& walks, const Config& cfg,
                    const std::string& path);
WalkSet load_walks(const std::string& path,
                   uint64_t* config_digest = nullptr);

struct EmbeddingSet {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> vectors;
  size_t dimension = 0;
  int m = 0;
  int n = 0;
  uint64_t seed = 0;
  uint64_t graph_digest = 0;
};

uint64_t save_embeddings(const EmbeddingSet& embeddings, const Config& cfg,
                         const std::string& path);
EmbeddingSet load_embeddings(const std::string& path,
                             uint64_t* config_digest = nullptr);

// Binary container: magic, JSON description (shapes, activations,
// training settings), then all parameters as little-endian IEEE-754
// doubles, integrity-checked.
uint64_t save_model(const MLPModel& model, const TrainConfig& train_cfg,
                    const Config& cfg, const std::string& path);
struct LoadedModel {
  MLPModel model;
  TrainConfig train_config;
  uint64_t config_digest = 0;
};
LoadedModel load_model(const std::string& path);

uint64_t save_report(const EvalReport& report, const Config& cfg,
                     const std::string& path);
EvalReport load_report(const std::string& path,
                       uint64_t* config_digest = nullptr);

}  // namespace gtpm
