#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "support/temp_dir.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

std::string shell_quote(const std::string& arg) {
  std::string quoted = "'";
  for (char c : arg) {
    if (c == '\'')
      quoted += "'\\''";
    else
      quoted += c;
  }
  quoted += "'";
  return quoted;
}

CliResult run_cli(const std::vector<std::string>& args) {
  std::string command = shell_quote(GTPM_CLI_PATH);
  for (const auto& arg : args) command += " " + shell_quote(arg);
  command += " 2>&1";

  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer;
  size_t got;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), got);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Two topic vocabularies that stay apart, plus shared filler.
void write_jsonl_corpus(const std::string& path, int docs_per_class) {
  const char* red[] = {"ruby", "crimson", "scarlet", "maroon"};
  const char* blue[] = {"azure", "cobalt", "navy", "teal"};
  const char* filler[] = {"stone", "river", "cloud"};
  std::string text;
  std::string content;
  for (int c = 0; c < 2; ++c) {
    for (int d = 0; d < docs_per_class; ++d) {
      text.clear();
      for (int t = 0; t < 12; ++t) {
        const char* word = (t % 3 == 2)
                               ? filler[(d + t) % 3]
                               : (c == 0 ? red[(d + t) % 4]
                                         : blue[(d + t) % 4]);
        text += word;
        text += (t % 6 == 5) ? ". " : " ";
      }
      content += std::string("{\"id\":\"") + (c == 0 ? "r" : "b") +
                 std::to_string(d) + "\",\"label\":\"" +
                 (c == 0 ? "red" : "blue") + "\",\"text\":\"" + text +
                 "\"}\n";
    }
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string write_min_count_config(gtpm_test::TempDir& dir) {
  return dir.write("pipeline.cfg",
                   "corpus.min_count = 1\ncorpus.stemming = false\n");
}

}  // namespace

TEST_CASE("the whole artifact pipeline runs through the command line") {
  gtpm_test::TempDir dir;
  auto corpus_path = dir.file("corpus.jsonl");
  write_jsonl_corpus(corpus_path, 12);
  auto config_path = write_min_count_config(dir);

  auto normalized = dir.file("normalized.tsv");
  auto ingest = run_cli({"--config", config_path, "ingest", "--input",
                         corpus_path, "--format", "jsonl", "--output",
                         normalized});
  CAPTURE(ingest.output);
  REQUIRE(ingest.exit_code == 0);
  CHECK(gtpm_test::slurp(normalized).rfind("#gtpm-corpus v1", 0) == 0);

  auto graph_path = dir.file("graph.tsv");
  auto build = run_cli({"--config", config_path, "build-graph", "--input",
                        normalized, "--output", graph_path});
  CAPTURE(build.output);
  REQUIRE(build.exit_code == 0);
  CHECK(build.output.find("digest") != std::string::npos);
  CHECK(gtpm_test::slurp(graph_path).rfind("#gtpm-graph v1", 0) == 0);

  auto stats = run_cli({"stats", "--graph", graph_path});
  CAPTURE(stats.output);
  REQUIRE(stats.exit_code == 0);
  CHECK(stats.output.find("nodes") != std::string::npos);
  CHECK(stats.output.find("edges") != std::string::npos);

  auto walks_path = dir.file("walks.tsv");
  auto walk = run_cli({"--seed", "7", "walk", "--graph", graph_path, "--m",
                       "4", "--n", "2", "--output", walks_path});
  CAPTURE(walk.output);
  REQUIRE(walk.exit_code == 0);
  CHECK(gtpm_test::slurp(walks_path).rfind("#gtpm-walks v1", 0) == 0);

  auto embed_path = dir.file("embeddings.tsv");
  auto embed = run_cli({"--config", config_path, "--seed", "7", "embed",
                        "--graph", graph_path, "--corpus", normalized,
                        "--walks", walks_path, "--m", "4", "--n", "2",
                        "--output", embed_path});
  CAPTURE(embed.output);
  REQUIRE(embed.exit_code == 0);
  CHECK(gtpm_test::slurp(embed_path).rfind("#gtpm-embeddings v1", 0) == 0);

  auto model_path = dir.file("model.bin");
  auto train = run_cli({"--config", config_path, "--seed", "7", "train",
                        "--embeddings", embed_path, "--corpus", normalized,
                        "--model", model_path});
  CAPTURE(train.output);
  REQUIRE(train.exit_code == 0);
  CHECK(std::filesystem::exists(model_path));

  auto report_path = dir.file("report.tsv");
  auto eval = run_cli({"eval", "--model", model_path, "--embeddings",
                       embed_path, "--corpus", normalized, "--report",
                       report_path});
  CAPTURE(eval.output);
  REQUIRE(eval.exit_code == 0);
  CHECK(eval.output.find("micro-F1") != std::string::npos);
  CHECK(gtpm_test::slurp(report_path).rfind("#gtpm-report v1", 0) == 0);

  auto projection_path = dir.file("projection.tsv");
  auto project = run_cli({"project", "--embeddings", embed_path, "--corpus",
                          normalized, "--output", projection_path});
  CAPTURE(project.output);
  REQUIRE(project.exit_code == 0);
  CHECK(gtpm_test::slurp(projection_path).rfind("#gtpm-projection v1", 0) ==
        0);
}

TEST_CASE("run trains and reports scores end to end") {
  gtpm_test::TempDir dir;
  auto corpus_path = dir.file("corpus.jsonl");
  write_jsonl_corpus(corpus_path, 25);
  auto config_path =
      dir.write("run.cfg",
                "corpus.min_count = 1\ncorpus.stemming = false\n"
                "walk.m = 4\nexperiment.repeats = 1\n"
                "train.max_epochs = 20\n");

  auto out_dir = (dir.path / "artifacts").string();
  auto run = run_cli({"--config", config_path, "--seed", "11", "--out-dir",
                      out_dir, "run", "--train", corpus_path, "--format",
                      "jsonl"});
  CAPTURE(run.output);
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("micro") != std::string::npos);
  CHECK(run.output.find("macro") != std::string::npos);
  namespace fs = std::filesystem;
  CHECK(fs::exists(fs::path(out_dir) / "results.tsv"));
  CHECK(fs::exists(fs::path(out_dir) / "model.bin"));
  CHECK(fs::exists(fs::path(out_dir) / "embeddings_train.tsv"));
}

TEST_CASE("version flag prints and exits cleanly") {
  auto result = run_cli({"--version"});
  CHECK(result.exit_code == 0);
  CHECK_FALSE(result.output.empty());
}

TEST_CASE("failures exit nonzero with a tagged message") {
  gtpm_test::TempDir dir;

  auto missing = run_cli({"build-graph", "--input", dir.file("absent.tsv"),
                          "--output", dir.file("graph.tsv")});
  CHECK(missing.exit_code != 0);

  auto garbage_path = dir.write("garbage.tsv", "this is not an artifact\n");
  auto garbage = run_cli({"build-graph", "--input", garbage_path, "--output",
                          dir.file("graph.tsv")});
  CHECK(garbage.exit_code != 0);
  CHECK(garbage.output.find("gtpm:") != std::string::npos);
  CHECK(garbage.output.find("error") != std::string::npos);

  auto unknown = run_cli({"frobnicate"});
  CHECK(unknown.exit_code != 0);

  auto no_sub = run_cli({});
  CHECK(no_sub.exit_code != 0);
}

TEST_CASE("embed rejects walks from a different graph") {
  gtpm_test::TempDir dir;
  auto corpus_path = dir.file("corpus.jsonl");
  write_jsonl_corpus(corpus_path, 12);
  auto config_path = write_min_count_config(dir);

  auto normalized = dir.file("normalized.tsv");
  REQUIRE(run_cli({"--config", config_path, "ingest", "--input", corpus_path,
                   "--format", "jsonl", "--output", normalized})
              .exit_code == 0);
  auto graph_path = dir.file("graph.tsv");
  REQUIRE(run_cli({"--config", config_path, "build-graph", "--input",
                   normalized, "--output", graph_path})
              .exit_code == 0);
  auto walks_path = dir.file("walks.tsv");
  REQUIRE(run_cli({"walk", "--graph", graph_path, "--m", "3", "--n", "1",
                   "--output", walks_path})
              .exit_code == 0);

  auto smaller_corpus = dir.file("small.jsonl");
  write_jsonl_corpus(smaller_corpus, 6);
  auto small_normalized = dir.file("small_normalized.tsv");
  REQUIRE(run_cli({"--config", config_path, "ingest", "--input",
                   smaller_corpus, "--format", "jsonl", "--output",
                   small_normalized})
              .exit_code == 0);
  auto small_graph = dir.file("small_graph.tsv");
  REQUIRE(run_cli({"--config", config_path, "build-graph", "--input",
                   small_normalized, "--output", small_graph})
              .exit_code == 0);

  auto mismatch = run_cli({"--config", config_path, "embed", "--graph",
                           small_graph, "--corpus", small_normalized,
                           "--walks", walks_path, "--output",
                           dir.file("never.tsv")});
  CHECK(mismatch.exit_code != 0);
  CHECK(mismatch.output.find("digest_mismatch") != std::string::npos);
}
