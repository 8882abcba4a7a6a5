#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gtpm/config.hpp"

namespace gtpm {

struct DocumentRecord {
  std::string id;
  std::string label;
  std::string text;
  // Filled by normalization: tokens per sentence, empty sentences dropped.
  std::vector<std::vector<std::string>> sentences;

  size_t token_count() const {
    size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
};

enum class CorpusFormat { jsonl, tsv };

CorpusFormat parse_corpus_format(const std::string& name);
std::string to_string(CorpusFormat format);

struct PipelineConfig {
  int min_count = 5;
  bool stemming = true;
  std::string sentence_delimiters = ".!?";
  std::unordered_set<std::string> stopwords;
  bool open_vocabulary = false;

  PipelineConfig();
};

// Reads pipeline keys (corpus.min_count, corpus.stemming,
// corpus.sentence_delimiters, corpus.stopword_file,
// corpus.open_vocabulary) with the defaults above.
PipelineConfig pipeline_from_config(const Config& cfg);

struct Vocabulary {
  // Index is the word id; ids are assigned by descending corpus
  // frequency, ties broken lexicographically.
  std::vector<std::string> words;
  std::vector<uint64_t> frequencies;
  std::unordered_map<std::string, uint32_t> ids;

  size_t size() const { return words.size(); }
  bool contains(const std::string& word) const { return ids.count(word) != 0; }
  std::optional<uint32_t> id_of(const std::string& word) const {
    auto it = ids.find(word);
    if (it == ids.end()) return std::nullopt;
    return it->second;
  }
  // Appends a word with the next free id (open-vocabulary growth).
  uint32_t add_word(const std::string& word, uint64_t frequency);
};

// Raw records, not yet normalized; order preserved, labels opaque.
std::vector<DocumentRecord> load_corpus(const std::string& path,
                                        CorpusFormat format);

// Sentence split on cfg.sentence_delimiters first; then per sentence:
// ASCII lowercasing, punctuation and digits become separators,
// whitespace tokenization, stopword removal, stemming to a fixed point
// when enabled, and a second stopword pass so no emitted token is a
// stopword. Empty sentences are dropped.
std::vector<std::vector<std::string>> normalize_text(
    const std::string& raw, const PipelineConfig& cfg);

void normalize_document(DocumentRecord& doc, const PipelineConfig& cfg);
void normalize_corpus(std::vector<DocumentRecord>& docs,
                      const PipelineConfig& cfg, int threads = 1);

double average_token_count(const std::vector<DocumentRecord>& docs);

Vocabulary build_vocabulary(const std::vector<DocumentRecord>& docs,
                            const PipelineConfig& cfg);

}  // namespace gtpm
