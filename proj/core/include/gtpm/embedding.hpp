#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtpm/corpus.hpp"
#include "gtpm/walker.hpp"

namespace gtpm {

// First-occurrence relabeling: position i gets the 1-based index of
// walk[i] among the distinct nodes seen so far.
std::vector<uint32_t> anonymize_walk(const Walk& walk);

// Anonymizes each walk, pools label-to-label transition counts over
// all walks into an (m+1) x (m+1) matrix, row-normalizes nonzero rows,
// and flattens row-major. All-isolated input yields the zero vector.
std::vector<double> node_embedding(const std::vector<Walk>& walks, int m);

// Mean of the node embeddings over every in-vocabulary token
// occurrence. No in-vocabulary token yields the zero vector and sets
// *all_oov when provided.
std::vector<double> embed_document(
    const DocumentRecord& doc,
    const std::vector<std::vector<double>>& node_embeddings,
    const Vocabulary& vocab, size_t dimension, bool* all_oov = nullptr);

struct CorpusEmbedding {
  std::vector<std::string> doc_ids;
  std::vector<std::vector<double>> vectors;
  size_t dimension = 0;
  size_t all_oov_documents = 0;
  uint64_t tokens_total = 0;
  uint64_t tokens_oov = 0;

  double oov_rate() const {
    return tokens_total == 0
               ? 0.0
               : static_cast<double>(tokens_oov) /
                     static_cast<double>(tokens_total);
  }
};

// One embedding per node, indexed by node id.
std::vector<std::vector<double>> embed_nodes(
    const std::vector<std::vector<Walk>>& walks, int m, int threads = 1);

// generate_walks -> embed_nodes -> embed_document over the corpus.
CorpusEmbedding embed_corpus(const std::vector<DocumentRecord>& docs,
                             const WordGraph& graph, const WalkConfig& cfg);

// Same pipeline but reuses node embeddings already computed against
// the graph (test-set embedding against a frozen training graph).
CorpusEmbedding embed_corpus_with_nodes(
    const std::vector<DocumentRecord>& docs,
    const std::vector<std::vector<double>>& node_embeddings,
    const Vocabulary& vocab, size_t dimension);

}  // namespace gtpm
