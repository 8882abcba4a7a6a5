#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gtpm/corpus.hpp"

namespace gtpm {

struct GraphBuildStats {
  uint64_t documents = 0;
  uint64_t sentences = 0;
  uint64_t pairs_seen = 0;       // consecutive in-sentence token pairs
  uint64_t pairs_counted = 0;    // pairs that incremented an edge
  uint64_t pairs_oov = 0;        // skipped: at least one word out of vocab
  uint64_t duplicate_pairs = 0;  // skipped: consecutive identical tokens

  void merge(const GraphBuildStats& other);
};

// Undirected weighted word graph. Nodes are vocabulary ids; an edge
// count is the number of consecutive in-sentence co-occurrences of the
// two words across the corpus. No self-loops are stored.
class WordGraph {
 public:
  using Neighbor = std::pair<uint32_t, uint64_t>;  // (node id, count)

  WordGraph() = default;
  explicit WordGraph(Vocabulary vocab);

  const Vocabulary& vocab() const { return vocab_; }
  Vocabulary& vocab() { return vocab_; }

  size_t node_count() const { return adjacency_.size(); }
  uint64_t edge_count() const { return edge_count_; }
  // Sum of all edge counts, each undirected edge counted once.
  uint64_t total_count() const { return total_count_; }

  // Sorted by neighbor id ascending.
  const std::vector<Neighbor>& neighbors(uint32_t node) const;
  uint64_t weighted_degree(uint32_t node) const;
  size_t degree(uint32_t node) const { return neighbors(node).size(); }
  uint64_t count(uint32_t a, uint32_t b) const;

  // Adds `by` to the undirected count of (a, b). Rejects self-loops
  // and out-of-range ids.
  void add_count(uint32_t a, uint32_t b, uint64_t by = 1);

  // Grows the node set to match vocabulary size (open-vocabulary use).
  void sync_with_vocab();

 private:
  void check_node(uint32_t node) const;

  Vocabulary vocab_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<uint64_t> weighted_degree_;
  uint64_t edge_count_ = 0;
  uint64_t total_count_ = 0;
};

WordGraph build_graph(const std::vector<DocumentRecord>& docs,
                      Vocabulary vocab, GraphBuildStats* stats = nullptr);

// Adds one normalized document's pairs to an existing graph. Words
// outside the vocabulary are skipped unless open_vocabulary is set, in
// which case they join the vocabulary with the next free id.
void update_graph(WordGraph& graph, const DocumentRecord& doc,
                  bool open_vocabulary = false,
                  GraphBuildStats* stats = nullptr);

// Probabilities over the id-sorted neighbor list: count(i,j) divided
// by the weighted degree of i. Empty for an isolated node.
std::vector<std::pair<uint32_t, double>> transition_distribution(
    const WordGraph& graph, uint32_t node);

// (degree, node count) pairs sorted ascending by unweighted degree.
std::vector<std::pair<uint64_t, uint64_t>> degree_histogram(
    const WordGraph& graph);

struct TailFit {
  double slope = 0.0;
  double r_squared = 0.0;
  size_t points = 0;
};

// Least squares of the log10 survival count (nodes with degree >= d)
// on log10(d), over histogram rows with d >= min_degree. The survival
// form keeps sparse high-degree rows from swamping the fit.
TailFit degree_tail_fit(
    const std::vector<std::pair<uint64_t, uint64_t>>& histogram,
    uint64_t min_degree = 1);

}  // namespace gtpm
