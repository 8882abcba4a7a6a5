#pragma once

#include <cstdint>
#include <vector>

#include "gtpm/graph.hpp"
#include "gtpm/rng.hpp"

namespace gtpm {

struct WalkConfig {
  int m = 15;               // steps per walk; a full walk has m+1 nodes
  int n = 1;                // walks per node; 0 means resolve by doc length
  uint64_t master_seed = 0;
  int threads = 1;
};

// Short documents need more walks per node to stabilize the transition
// statistics; the cutoff is an average of 40 tokens per document.
int default_walks_per_node(double average_tokens_per_doc);

using Walk = std::vector<uint32_t>;

// Starts at `start` and takes up to m steps; each step samples the
// next node by inverse CDF over the id-sorted neighbor list, with
// probabilities proportional to edge counts. A node without neighbors
// ends the walk early.
Walk sample_walk(const WordGraph& graph, uint32_t start, int m, Rng& rng);

// Walks indexed [node id][walk index]. Walk (v, k) is drawn from a
// generator seeded with derive_seed(master_seed, v, k), so results are
// identical for any thread count or execution order.
std::vector<std::vector<Walk>> generate_walks(const WordGraph& graph,
                                              const WalkConfig& cfg);

}  // namespace gtpm
