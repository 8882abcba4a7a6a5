#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "gtpm/embedding.hpp"
#include "gtpm/error.hpp"
#include "gtpm/rng.hpp"
#include "gtpm/walker.hpp"
#include "support/oracles.hpp"
#include "support/toy_fixture.hpp"

using gtpm::Error;

namespace {

gtpm::WordGraph toy_graph() {
  auto docs = gtpm_test::toy_documents();
  auto cfg = gtpm_test::toy_pipeline();
  gtpm::normalize_corpus(docs, cfg);
  auto vocab = gtpm::build_vocabulary(docs, cfg);
  return gtpm::build_graph(docs, std::move(vocab));
}

}  // namespace

TEST_CASE("anonymization relabels by first occurrence") {
  CHECK(gtpm::anonymize_walk({7}) == std::vector<uint32_t>{1});
  CHECK(gtpm::anonymize_walk({3, 1, 4, 1, 5}) ==
        std::vector<uint32_t>{1, 2, 3, 2, 4});
  CHECK(gtpm::anonymize_walk({0, 1, 0, 2, 0}) ==
        std::vector<uint32_t>{1, 2, 1, 3, 1});
  CHECK(gtpm::anonymize_walk({9, 9, 9}) == std::vector<uint32_t>{1, 1, 1});
  CHECK_THROWS_AS(gtpm::anonymize_walk({}), Error);
}

TEST_CASE("anonymization matches the reference on random walks") {
  gtpm::Rng rng(42);
  for (int round = 0; round < 500; ++round) {
    gtpm::Walk walk;
    size_t len = 1 + rng.next_index(20);
    for (size_t i = 0; i < len; ++i)
      walk.push_back(static_cast<uint32_t>(rng.next_index(6)));
    CAPTURE(round);
    CHECK(gtpm::anonymize_walk(walk) == gtpm_test::anonymize_reference(walk));
  }
}

TEST_CASE("node embedding pools counts before normalizing rows") {
  // First walk visits label 2 twice as a source, second walk once, so
  // pooling gives 2/3 against 1/3 where averaging normalized matrices
  // would give 1/2 against 1/2.
  std::vector<gtpm::Walk> walks = {{5, 6, 5, 6, 5}, {5, 6, 7}};
  auto embedding = gtpm::node_embedding(walks, 2);
  REQUIRE(embedding.size() == 9);

  std::vector<double> want = {
      0.0,       1.0, 0.0,
      2.0 / 3.0, 0.0, 1.0 / 3.0,
      0.0,       0.0, 0.0,
  };
  for (size_t i = 0; i < want.size(); ++i)
    CHECK(embedding[i] == doctest::Approx(want[i]).epsilon(1e-15));
}

TEST_CASE("node embedding matches the reference on sampled walks") {
  auto graph = toy_graph();
  gtpm::WalkConfig cfg;
  cfg.m = 5;
  cfg.n = 4;
  cfg.master_seed = 3;
  auto walks = gtpm::generate_walks(graph, cfg);
  for (uint32_t v = 0; v < walks.size(); ++v) {
    auto got = gtpm::node_embedding(walks[v], cfg.m);
    auto want = gtpm_test::node_embedding_reference(walks[v], cfg.m);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
  }
}

TEST_CASE("every embedding row sums to one or stays zero") {
  auto graph = toy_graph();
  gtpm::WalkConfig cfg;
  cfg.m = 15;
  cfg.n = 8;
  cfg.master_seed = 5;
  auto walks = gtpm::generate_walks(graph, cfg);
  size_t side = 16;
  for (uint32_t v = 0; v < walks.size(); ++v) {
    auto embedding = gtpm::node_embedding(walks[v], cfg.m);
    REQUIRE(embedding.size() == side * side);
    for (size_t r = 0; r < side; ++r) {
      double sum = 0.0;
      for (size_t c = 0; c < side; ++c) sum += embedding[r * side + c];
      if (sum != 0.0) CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("walks that are too long for the matrix are rejected") {
  std::vector<gtpm::Walk> walks = {{0, 1, 2}};
  CHECK_THROWS_AS(gtpm::node_embedding(walks, 1), Error);
  CHECK(gtpm::node_embedding({}, 3).size() == 16);
}

TEST_CASE("isolated nodes embed to the zero vector") {
  std::vector<gtpm::Walk> walks = {{4}, {4}};
  auto embedding = gtpm::node_embedding(walks, 3);
  for (double v : embedding) CHECK(v == 0.0);
}

TEST_CASE("document embeddings average per token occurrence") {
  gtpm::Vocabulary vocab;
  vocab.add_word("first", 3);
  vocab.add_word("second", 2);
  std::vector<std::vector<double>> nodes = {{1.0, 3.0}, {5.0, 7.0}};

  gtpm::DocumentRecord doc;
  doc.sentences = {{"first", "second"}, {"first", "unknown"}};
  bool all_oov = true;
  auto vec = gtpm::embed_document(doc, nodes, vocab, 2, &all_oov);
  CHECK_FALSE(all_oov);
  // first counts twice, second once, unknown is skipped.
  CHECK(vec[0] == doctest::Approx((1.0 + 1.0 + 5.0) / 3.0));
  CHECK(vec[1] == doctest::Approx((3.0 + 3.0 + 7.0) / 3.0));

  gtpm::DocumentRecord oov_doc;
  oov_doc.sentences = {{"unknown", "alien"}};
  all_oov = false;
  auto zero = gtpm::embed_document(oov_doc, nodes, vocab, 2, &all_oov);
  CHECK(all_oov);
  CHECK(zero == std::vector<double>{0.0, 0.0});
}

TEST_CASE("corpus embedding keeps document order and counts OOV tokens") {
  auto graph = toy_graph();
  auto docs = gtpm_test::toy_documents();
  auto cfg = gtpm_test::toy_pipeline();
  gtpm::normalize_corpus(docs, cfg);
  docs[1].sentences.push_back({"neverseen"});

  gtpm::WalkConfig wc;
  wc.m = 4;
  wc.n = 2;
  wc.master_seed = 9;
  auto embedded = gtpm::embed_corpus(docs, graph, wc);

  CHECK(embedded.doc_ids ==
        std::vector<std::string>{"t0", "t1", "t2", "t3"});
  CHECK(embedded.dimension == 25);
  CHECK(embedded.vectors.size() == 4);
  CHECK(embedded.tokens_total == 18);
  CHECK(embedded.tokens_oov == 1);
  CHECK(embedded.oov_rate() == doctest::Approx(1.0 / 18.0));
  CHECK(embedded.all_oov_documents == 0);
}

TEST_CASE("corpus embedding composes from node embeddings") {
  auto graph = toy_graph();
  auto docs = gtpm_test::toy_documents();
  auto cfg = gtpm_test::toy_pipeline();
  gtpm::normalize_corpus(docs, cfg);

  gtpm::WalkConfig wc;
  wc.m = 6;
  wc.n = 3;
  wc.master_seed = 31;

  auto direct = gtpm::embed_corpus(docs, graph, wc);
  auto walks = gtpm::generate_walks(graph, wc);
  auto nodes = gtpm::embed_nodes(walks, wc.m);
  auto composed = gtpm::embed_corpus_with_nodes(docs, nodes, graph.vocab(),
                                                direct.dimension);

  REQUIRE(direct.vectors.size() == composed.vectors.size());
  for (size_t i = 0; i < direct.vectors.size(); ++i)
    CHECK(direct.vectors[i] == composed.vectors[i]);
}

TEST_CASE("threaded node embedding matches single-threaded") {
  auto graph = toy_graph();
  gtpm::WalkConfig wc;
  wc.m = 7;
  wc.n = 6;
  wc.master_seed = 13;
  auto walks = gtpm::generate_walks(graph, wc);

  auto one = gtpm::embed_nodes(walks, wc.m, 1);
  auto four = gtpm::embed_nodes(walks, wc.m, 4);
  CHECK(one == four);
}
