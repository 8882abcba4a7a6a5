#include "gtpm/graph.hpp"

#include <algorithm>
#include <cmath>

#include "gtpm/error.hpp"

namespace gtpm {

void GraphBuildStats::merge(const GraphBuildStats& other) {
  documents += other.documents;
  sentences += other.sentences;
  pairs_seen += other.pairs_seen;
  pairs_counted += other.pairs_counted;
  pairs_oov += other.pairs_oov;
  duplicate_pairs += other.duplicate_pairs;
}

WordGraph::WordGraph(Vocabulary vocab) : vocab_(std::move(vocab)) {
  adjacency_.resize(vocab_.size());
  weighted_degree_.resize(vocab_.size(), 0);
}

void WordGraph::check_node(uint32_t node) const {
  if (node >= adjacency_.size())
    throw Error(ErrorKind::invalid_argument,
                "node id " + std::to_string(node) + " out of range (graph has " +
                    std::to_string(adjacency_.size()) + " nodes)");
}

const std::vector<WordGraph::Neighbor>& WordGraph::neighbors(
    uint32_t node) const {
  check_node(node);
  return adjacency_[node];
}

uint64_t WordGraph::weighted_degree(uint32_t node) const {
  check_node(node);
  return weighted_degree_[node];
}

uint64_t WordGraph::count(uint32_t a, uint32_t b) const {
  check_node(a);
  check_node(b);
  const auto& list = adjacency_[a];
  auto it = std::lower_bound(
      list.begin(), list.end(), b,
      [](const Neighbor& n, uint32_t id) { return n.first < id; });
  if (it == list.end() || it->first != b) return 0;
  return it->second;
}

void WordGraph::add_count(uint32_t a, uint32_t b, uint64_t by) {
  check_node(a);
  check_node(b);
  if (a == b)
    throw Error(ErrorKind::invalid_argument,
                "self-loop on node " + std::to_string(a));
  if (by == 0) return;
  bool existed = false;
  for (uint32_t node : {a, b}) {
    uint32_t other = node == a ? b : a;
    auto& list = adjacency_[node];
    auto it = std::lower_bound(
        list.begin(), list.end(), other,
        [](const Neighbor& n, uint32_t id) { return n.first < id; });
    if (it != list.end() && it->first == other) {
      it->second += by;
      existed = true;
    } else {
      list.insert(it, {other, by});
    }
    weighted_degree_[node] += by;
  }
  if (!existed) ++edge_count_;
  total_count_ += by;
}

void WordGraph::sync_with_vocab() {
  adjacency_.resize(vocab_.size());
  weighted_degree_.resize(vocab_.size(), 0);
}

namespace {

void add_document_pairs(WordGraph& graph, const DocumentRecord& doc,
                        bool open_vocabulary, GraphBuildStats* stats) {
  GraphBuildStats local;
  local.documents = 1;
  Vocabulary& vocab = graph.vocab();
  for (const auto& sentence : doc.sentences) {
    ++local.sentences;
    for (size_t i = 0; i + 1 < sentence.size(); ++i) {
      ++local.pairs_seen;
      const std::string& wa = sentence[i];
      const std::string& wb = sentence[i + 1];
      if (wa == wb) {
        ++local.duplicate_pairs;
        continue;
      }
      auto ia = vocab.id_of(wa);
      auto ib = vocab.id_of(wb);
      if (open_vocabulary) {
        if (!ia) ia = vocab.add_word(wa, 0);
        if (!ib) ib = vocab.add_word(wb, 0);
        graph.sync_with_vocab();
      } else if (!ia || !ib) {
        ++local.pairs_oov;
        continue;
      }
      graph.add_count(*ia, *ib);
      ++local.pairs_counted;
    }
  }
  if (stats) stats->merge(local);
}

}  // namespace

WordGraph build_graph(const std::vector<DocumentRecord>& docs,
                      Vocabulary vocab, GraphBuildStats* stats) {
  WordGraph graph(std::move(vocab));
  for (const auto& doc : docs) add_document_pairs(graph, doc, false, stats);
  return graph;
}

void update_graph(WordGraph& graph, const DocumentRecord& doc,
                  bool open_vocabulary, GraphBuildStats* stats) {
  add_document_pairs(graph, doc, open_vocabulary, stats);
}

std::vector<std::pair<uint32_t, double>> transition_distribution(
    const WordGraph& graph, uint32_t node) {
  const auto& list = graph.neighbors(node);
  std::vector<std::pair<uint32_t, double>> probs;
  probs.reserve(list.size());
  auto degree = static_cast<double>(graph.weighted_degree(node));
  for (const auto& [id, count] : list)
    probs.emplace_back(id, static_cast<double>(count) / degree);
  return probs;
}

std::vector<std::pair<uint64_t, uint64_t>> degree_histogram(
    const WordGraph& graph) {
  std::vector<std::pair<uint64_t, uint64_t>> histogram;
  std::vector<uint64_t> degrees;
  degrees.reserve(graph.node_count());
  for (size_t v = 0; v < graph.node_count(); ++v)
    degrees.push_back(graph.degree(static_cast<uint32_t>(v)));
  std::sort(degrees.begin(), degrees.end());
  for (size_t i = 0; i < degrees.size();) {
    size_t j = i;
    while (j < degrees.size() && degrees[j] == degrees[i]) ++j;
    histogram.emplace_back(degrees[i], j - i);
    i = j;
  }
  return histogram;
}

TailFit degree_tail_fit(
    const std::vector<std::pair<uint64_t, uint64_t>>& histogram,
    uint64_t min_degree) {
  std::vector<std::pair<double, double>> points;
  uint64_t at_or_above = 0;
  for (auto it = histogram.rbegin(); it != histogram.rend(); ++it) {
    const auto& [degree, count] = *it;
    at_or_above += count;
    if (degree >= min_degree && degree > 0 && count > 0)
      points.emplace_back(std::log10(static_cast<double>(degree)),
                          std::log10(static_cast<double>(at_or_above)));
  }
  if (points.size() < 2)
    throw Error(ErrorKind::invalid_argument,
                "degree tail fit needs at least 2 histogram points at or "
                "above degree " +
                    std::to_string(min_degree));

  double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw Error(ErrorKind::numeric,
                "degree tail fit is degenerate (all degrees equal)");
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;

  double mean_y = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (const auto& [x, y] : points) {
    double fit = slope * x + intercept;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  TailFit fit;
  fit.slope = slope;
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  fit.points = points.size();
  return fit;
}

}  // namespace gtpm
