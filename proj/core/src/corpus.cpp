#include "gtpm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "gtpm/error.hpp"
#include "gtpm/porter.hpp"
#include "gtpm/stopwords.hpp"

namespace gtpm {

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "tsv") return CorpusFormat::tsv;
  throw Error(ErrorKind::invalid_argument,
              "unknown corpus format '" + name + "' (expected jsonl or tsv)");
}

std::string to_string(CorpusFormat format) {
  return format == CorpusFormat::jsonl ? "jsonl" : "tsv";
}

PipelineConfig::PipelineConfig() : stopwords(default_stopwords()) {}

PipelineConfig pipeline_from_config(const Config& cfg) {
  PipelineConfig pc;
  pc.min_count = static_cast<int>(cfg.get_int64("corpus.min_count", 5));
  if (pc.min_count < 1)
    throw Error(ErrorKind::invalid_argument, "corpus.min_count must be >= 1");
  pc.stemming = cfg.get_bool("corpus.stemming", true);
  pc.sentence_delimiters =
      cfg.get_string("corpus.sentence_delimiters", ".!?");
  pc.open_vocabulary = cfg.get_bool("corpus.open_vocabulary", false);
  std::string stopword_file = cfg.get_string("corpus.stopword_file", "");
  if (!stopword_file.empty()) pc.stopwords = load_stopwords(stopword_file);
  return pc;
}

uint32_t Vocabulary::add_word(const std::string& word, uint64_t frequency) {
  auto id = static_cast<uint32_t>(words.size());
  words.push_back(word);
  frequencies.push_back(frequency);
  ids.emplace(word, id);
  return id;
}

namespace {

std::vector<DocumentRecord> load_jsonl(std::istream& in,
                                       const std::string& path) {
  std::vector<DocumentRecord> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorKind::parse, path + " line " + std::to_string(line_no) +
                                        ": not a JSON object");
    DocumentRecord doc;
    for (const char* field : {"id", "label", "text"}) {
      auto it = j.find(field);
      if (it == j.end() || !it->is_string())
        throw Error(ErrorKind::parse,
                    path + " line " + std::to_string(line_no) +
                        ": missing or non-string field '" + field + "'");
    }
    doc.id = j["id"].get<std::string>();
    doc.label = j["label"].get<std::string>();
    doc.text = j["text"].get<std::string>();
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<DocumentRecord> load_tsv(std::istream& in,
                                     const std::string& path) {
  std::vector<DocumentRecord> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab1 = line.find('\t');
    size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                            : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos)
      throw Error(ErrorKind::parse, path + " line " + std::to_string(line_no) +
                                        ": expected 3 tab-separated columns");
    DocumentRecord doc;
    doc.id = line.substr(0, tab1);
    doc.label = line.substr(tab1 + 1, tab2 - tab1 - 1);
    doc.text = line.substr(tab2 + 1);
    if (doc.id.empty())
      throw Error(ErrorKind::parse,
                  path + " line " + std::to_string(line_no) + ": empty id");
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

std::vector<DocumentRecord> load_corpus(const std::string& path,
                                        CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open corpus file: " + path);
  std::vector<DocumentRecord> docs = format == CorpusFormat::jsonl
                                         ? load_jsonl(in, path)
                                         : load_tsv(in, path);
  std::unordered_set<std::string> seen;
  seen.reserve(docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    if (!seen.insert(docs[i].id).second)
      throw Error(ErrorKind::parse, path + ": duplicate document id '" +
                                        docs[i].id + "' at record " +
                                        std::to_string(i + 1));
  }
  return docs;
}

std::vector<std::vector<std::string>> normalize_text(
    const std::string& raw, const PipelineConfig& cfg) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> tokens;
  std::string token;

  auto flush_token = [&] {
    if (token.empty()) return;
    if (cfg.stopwords.count(token) == 0) {
      std::string final_token =
          cfg.stemming ? porter_stem_fixpoint(token) : token;
      if (!final_token.empty() && cfg.stopwords.count(final_token) == 0)
        tokens.push_back(std::move(final_token));
    }
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!tokens.empty()) {
      sentences.push_back(std::move(tokens));
      tokens.clear();
    }
  };

  for (char c : raw) {
    if (cfg.sentence_delimiters.find(c) != std::string::npos) {
      flush_sentence();
    } else if (c >= 'A' && c <= 'Z') {
      token.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') ||
               static_cast<unsigned char>(c) >= 0x80) {
      token.push_back(c);
    } else {
      flush_token();
    }
  }
  flush_sentence();
  return sentences;
}

void normalize_document(DocumentRecord& doc, const PipelineConfig& cfg) {
  doc.sentences = normalize_text(doc.text, cfg);
}

void normalize_corpus(std::vector<DocumentRecord>& docs,
                      const PipelineConfig& cfg, int threads) {
  if (threads <= 1 || docs.size() < 2) {
    for (auto& doc : docs) normalize_document(doc, cfg);
    return;
  }
  size_t n = docs.size();
  size_t workers = std::min<size_t>(static_cast<size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < n; i += workers) normalize_document(docs[i], cfg);
    });
  }
  for (auto& t : pool) t.join();
}

double average_token_count(const std::vector<DocumentRecord>& docs) {
  if (docs.empty()) return 0.0;
  size_t total = 0;
  for (const auto& doc : docs) total += doc.token_count();
  return static_cast<double>(total) / static_cast<double>(docs.size());
}

Vocabulary build_vocabulary(const std::vector<DocumentRecord>& docs,
                            const PipelineConfig& cfg) {
  std::unordered_map<std::string, uint64_t> counts;
  for (const auto& doc : docs)
    for (const auto& sentence : doc.sentences)
      for (const auto& word : sentence) ++counts[word];

  std::vector<std::pair<std::string, uint64_t>> retained;
  retained.reserve(counts.size());
  for (auto& [word, count] : counts)
    if (count >= static_cast<uint64_t>(cfg.min_count))
      retained.emplace_back(word, count);
  if (retained.empty())
    throw Error(ErrorKind::invalid_argument,
                "vocabulary is empty after frequency filtering; lower "
                "corpus.min_count (currently " +
                    std::to_string(cfg.min_count) + ")");

  std::sort(retained.begin(), retained.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });

  Vocabulary vocab;
  vocab.words.reserve(retained.size());
  vocab.frequencies.reserve(retained.size());
  vocab.ids.reserve(retained.size());
  for (auto& [word, count] : retained) vocab.add_word(word, count);
  return vocab;
}

}  // namespace gtpm
