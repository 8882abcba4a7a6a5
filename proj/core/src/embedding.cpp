#include "gtpm/embedding.hpp"

#include <thread>
#include <unordered_map>

#include "gtpm/error.hpp"

namespace gtpm {

std::vector<uint32_t> anonymize_walk(const Walk& walk) {
  if (walk.empty())
    throw Error(ErrorKind::invalid_argument, "cannot anonymize an empty walk");
  std::vector<uint32_t> labels;
  labels.reserve(walk.size());
  std::unordered_map<uint32_t, uint32_t> first_seen;
  first_seen.reserve(walk.size());
  for (uint32_t node : walk) {
    auto [it, inserted] =
        first_seen.emplace(node, static_cast<uint32_t>(first_seen.size() + 1));
    labels.push_back(it->second);
  }
  return labels;
}

std::vector<double> node_embedding(const std::vector<Walk>& walks, int m) {
  if (m < 1)
    throw Error(ErrorKind::invalid_argument, "walk length must be >= 1");
  size_t side = static_cast<size_t>(m) + 1;
  std::vector<uint64_t> counts(side * side, 0);
  for (const Walk& walk : walks) {
    std::vector<uint32_t> labels = anonymize_walk(walk);
    for (size_t i = 0; i + 1 < labels.size(); ++i) {
      size_t row = labels[i] - 1;
      size_t col = labels[i + 1] - 1;
      if (row >= side || col >= side)
        throw Error(ErrorKind::invalid_argument,
                    "walk visits more than m+1 distinct nodes");
      ++counts[row * side + col];
    }
  }
  std::vector<double> embedding(side * side, 0.0);
  for (size_t row = 0; row < side; ++row) {
    uint64_t row_total = 0;
    for (size_t col = 0; col < side; ++col) row_total += counts[row * side + col];
    if (row_total == 0) continue;
    for (size_t col = 0; col < side; ++col)
      embedding[row * side + col] =
          static_cast<double>(counts[row * side + col]) /
          static_cast<double>(row_total);
  }
  return embedding;
}

std::vector<double> embed_document(
    const DocumentRecord& doc,
    const std::vector<std::vector<double>>& node_embeddings,
    const Vocabulary& vocab, size_t dimension, bool* all_oov) {
  std::vector<double> sum(dimension, 0.0);
  uint64_t hits = 0;
  for (const auto& sentence : doc.sentences) {
    for (const auto& word : sentence) {
      auto id = vocab.id_of(word);
      if (!id || *id >= node_embeddings.size()) continue;
      const auto& vec = node_embeddings[*id];
      for (size_t d = 0; d < dimension; ++d) sum[d] += vec[d];
      ++hits;
    }
  }
  if (all_oov) *all_oov = hits == 0;
  if (hits == 0) return sum;
  for (double& v : sum) v /= static_cast<double>(hits);
  return sum;
}

std::vector<std::vector<double>> embed_nodes(
    const std::vector<std::vector<Walk>>& walks, int m, int threads) {
  size_t node_count = walks.size();
  std::vector<std::vector<double>> embeddings(node_count);
  auto run_node = [&](size_t v) { embeddings[v] = node_embedding(walks[v], m); };
  if (threads <= 1 || node_count < 2) {
    for (size_t v = 0; v < node_count; ++v) run_node(v);
    return embeddings;
  }
  size_t workers =
      std::min<size_t>(static_cast<size_t>(threads), node_count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t v = w; v < node_count; v += workers) run_node(v);
    });
  }
  for (auto& t : pool) t.join();
  return embeddings;
}

namespace {

CorpusEmbedding pool_documents(
    const std::vector<DocumentRecord>& docs,
    const std::vector<std::vector<double>>& node_embeddings,
    const Vocabulary& vocab, size_t dimension) {
  CorpusEmbedding result;
  result.dimension = dimension;
  result.doc_ids.reserve(docs.size());
  result.vectors.reserve(docs.size());
  for (const auto& doc : docs) {
    bool all_oov = false;
    result.vectors.push_back(
        embed_document(doc, node_embeddings, vocab, dimension, &all_oov));
    result.doc_ids.push_back(doc.id);
    if (all_oov) ++result.all_oov_documents;
    for (const auto& sentence : doc.sentences) {
      for (const auto& word : sentence) {
        ++result.tokens_total;
        if (!vocab.contains(word)) ++result.tokens_oov;
      }
    }
  }
  return result;
}

}  // namespace

CorpusEmbedding embed_corpus(const std::vector<DocumentRecord>& docs,
                             const WordGraph& graph, const WalkConfig& cfg) {
  auto walks = generate_walks(graph, cfg);
  auto nodes = embed_nodes(walks, cfg.m, cfg.threads);
  size_t side = static_cast<size_t>(cfg.m) + 1;
  return pool_documents(docs, nodes, graph.vocab(), side * side);
}

CorpusEmbedding embed_corpus_with_nodes(
    const std::vector<DocumentRecord>& docs,
    const std::vector<std::vector<double>>& node_embeddings,
    const Vocabulary& vocab, size_t dimension) {
  return pool_documents(docs, node_embeddings, vocab, dimension);
}

}  // namespace gtpm
