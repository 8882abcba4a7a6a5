#include "gtpm/walker.hpp"

#include <thread>

#include "gtpm/error.hpp"

namespace gtpm {

int default_walks_per_node(double average_tokens_per_doc) {
  return average_tokens_per_doc >= 40.0 ? 1 : 4;
}

Walk sample_walk(const WordGraph& graph, uint32_t start, int m, Rng& rng) {
  if (start >= graph.node_count())
    throw Error(ErrorKind::invalid_argument,
                "walk start node " + std::to_string(start) + " not in graph");
  if (m < 1)
    throw Error(ErrorKind::invalid_argument, "walk length must be >= 1");

  Walk walk;
  walk.reserve(static_cast<size_t>(m) + 1);
  walk.push_back(start);
  uint32_t current = start;
  for (int step = 0; step < m; ++step) {
    const auto& neighbors = graph.neighbors(current);
    if (neighbors.empty()) break;
    double target = rng.next_double() *
                    static_cast<double>(graph.weighted_degree(current));
    double cumulative = 0.0;
    uint32_t next = neighbors.back().first;
    for (const auto& [id, count] : neighbors) {
      cumulative += static_cast<double>(count);
      if (target < cumulative) {
        next = id;
        break;
      }
    }
    walk.push_back(next);
    current = next;
  }
  return walk;
}

std::vector<std::vector<Walk>> generate_walks(const WordGraph& graph,
                                              const WalkConfig& cfg) {
  if (cfg.m < 1)
    throw Error(ErrorKind::invalid_argument, "walk.m must be >= 1");
  if (cfg.n < 1)
    throw Error(ErrorKind::invalid_argument, "walk.n must be >= 1");

  size_t node_count = graph.node_count();
  std::vector<std::vector<Walk>> walks(node_count);
  for (auto& per_node : walks)
    per_node.resize(static_cast<size_t>(cfg.n));

  auto run_node = [&](uint32_t v) {
    for (int k = 0; k < cfg.n; ++k) {
      Rng rng(derive_seed(cfg.master_seed, v, static_cast<uint64_t>(k)));
      walks[v][static_cast<size_t>(k)] = sample_walk(graph, v, cfg.m, rng);
    }
  };

  if (cfg.threads <= 1 || node_count < 2) {
    for (size_t v = 0; v < node_count; ++v)
      run_node(static_cast<uint32_t>(v));
    return walks;
  }
  size_t workers =
      std::min<size_t>(static_cast<size_t>(cfg.threads), node_count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t v = w; v < node_count; v += workers)
        run_node(static_cast<uint32_t>(v));
    });
  }
  for (auto& t : pool) t.join();
  return walks;
}

}  // namespace gtpm
