#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "gtpm/graph.hpp"

namespace gtpm_test {

// Straight-line relabeling by first occurrence, kept deliberately
// different in structure from the library implementation.
inline std::vector<uint32_t> anonymize_reference(
    const std::vector<uint32_t>& walk) {
  std::vector<uint32_t> seen;
  std::vector<uint32_t> out;
  for (uint32_t node : walk) {
    auto it = std::find(seen.begin(), seen.end(), node);
    if (it == seen.end()) {
      seen.push_back(node);
      out.push_back(static_cast<uint32_t>(seen.size()));
    } else {
      out.push_back(static_cast<uint32_t>(it - seen.begin()) + 1);
    }
  }
  return out;
}

// Pooled anonymous-walk transition matrix, row-normalized and
// flattened row-major, computed with dense counting.
inline std::vector<double> node_embedding_reference(
    const std::vector<std::vector<uint32_t>>& walks, int m) {
  size_t side = static_cast<size_t>(m) + 1;
  std::vector<uint64_t> counts(side * side, 0);
  for (const auto& walk : walks) {
    auto labels = anonymize_reference(walk);
    for (size_t i = 0; i + 1 < labels.size(); ++i)
      counts[(labels[i] - 1) * side + (labels[i + 1] - 1)] += 1;
  }
  std::vector<double> out(side * side, 0.0);
  for (size_t r = 0; r < side; ++r) {
    uint64_t row_total = 0;
    for (size_t c = 0; c < side; ++c) row_total += counts[r * side + c];
    if (row_total == 0) continue;
    for (size_t c = 0; c < side; ++c)
      out[r * side + c] = static_cast<double>(counts[r * side + c]) /
                          static_cast<double>(row_total);
  }
  return out;
}

inline void enumerate_walks_from(const gtpm::WordGraph& graph,
                                 std::vector<uint32_t>& current,
                                 size_t max_nodes,
                                 std::vector<std::vector<uint32_t>>* out) {
  out->push_back(current);
  if (current.size() == max_nodes) return;
  for (const auto& [next, count] : graph.neighbors(current.back()))
    if (count > 0) {
      current.push_back(next);
      enumerate_walks_from(graph, current, max_nodes, out);
      current.pop_back();
    }
}

// Every edge-following walk from `start` with 1..max_nodes nodes.
inline std::vector<std::vector<uint32_t>> enumerate_walks(
    const gtpm::WordGraph& graph, uint32_t start, size_t max_nodes) {
  std::vector<std::vector<uint32_t>> out;
  std::vector<uint32_t> current{start};
  enumerate_walks_from(graph, current, max_nodes, &out);
  return out;
}

}  // namespace gtpm_test
