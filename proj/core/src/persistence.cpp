#include "gtpm/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gtpm/error.hpp"
#include "gtpm/hash.hpp"

namespace gtpm {
namespace {

const std::map<std::string, int>& format_registry() {
  static const std::map<std::string, int> registry = {
      {"gtpm-graph", 1},   {"gtpm-corpus", 1}, {"gtpm-walks", 1},
      {"gtpm-embeddings", 1}, {"gtpm-report", 1},
  };
  return registry;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end == text.c_str() || *end != '\0')
    throw Error(ErrorKind::parse, where + ": bad number '" + text + "'");
  return v;
}

uint64_t parse_u64(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno != 0 || end == text.c_str() || *end != '\0' || text.empty() ||
      text.front() == '-')
    throw Error(ErrorKind::parse, where + ": bad integer '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

struct Header {
  std::string tag;
  int version = 0;
  std::map<std::string, std::string> fields;

  uint64_t u64_field(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end())
      throw Error(ErrorKind::parse,
                  tag + " header is missing field '" + key + "'");
    return parse_u64(it->second, tag + " header field " + key);
  }
  double double_field(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end())
      throw Error(ErrorKind::parse,
                  tag + " header is missing field '" + key + "'");
    return parse_double(it->second, tag + " header field " + key);
  }
  uint64_t hex_field(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end())
      throw Error(ErrorKind::parse,
                  tag + " header is missing field '" + key + "'");
    return parse_hex16(it->second);
  }
};

std::string header_line(const std::string& tag,
                        const std::vector<std::pair<std::string, std::string>>&
                            fields) {
  std::string line = "#" + tag + " v" +
                     std::to_string(format_registry().at(tag));
  for (const auto& [key, value] : fields)
    line += " " + key + "=" + value;
  return line;
}

Header parse_header(const std::string& line, const std::string& expected_tag) {
  if (line.empty() || line.front() != '#')
    throw Error(ErrorKind::parse,
                "not a " + expected_tag + " file (missing header line)");
  std::vector<std::string> parts = split(line.substr(1), ' ');
  Header header;
  header.tag = parts[0];
  if (header.tag != expected_tag)
    throw Error(ErrorKind::parse, "expected a " + expected_tag +
                                      " file, found '" + header.tag + "'");
  if (parts.size() < 2 || parts[1].size() < 2 || parts[1][0] != 'v')
    throw Error(ErrorKind::parse, expected_tag + ": malformed version field");
  header.version =
      static_cast<int>(parse_u64(parts[1].substr(1), "format version"));
  int expected_version = format_registry().at(expected_tag);
  if (header.version != expected_version)
    throw Error(ErrorKind::version_mismatch,
                expected_tag + " version " + std::to_string(header.version) +
                    " is not supported (expected v" +
                    std::to_string(expected_version) + ")");
  for (size_t i = 2; i < parts.size(); ++i) {
    size_t eq = parts[i].find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::parse,
                  expected_tag + ": malformed header field '" + parts[i] + "'");
    header.fields[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }
  return header;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot create file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed: " + path);
}

// Assembles header + #config + #checksum + payload.
std::string assemble_text_artifact(
    const std::string& tag,
    const std::vector<std::pair<std::string, std::string>>& header_fields,
    uint64_t config_digest, const std::string& payload, uint64_t* out_digest) {
  uint64_t digest = fnv1a64(payload);
  if (out_digest) *out_digest = digest;
  std::string content = header_line(tag, header_fields);
  content += "\n#config " + hex16(config_digest);
  content += "\n#checksum " + hex16(digest);
  content += "\n";
  content += payload;
  return content;
}

struct TextArtifact {
  Header header;
  uint64_t config_digest = 0;
  uint64_t declared_checksum = 0;
  std::string payload;
  std::vector<std::string> payload_lines;  // without trailing newline
  bool payload_complete = true;            // payload ended with a newline
};

TextArtifact read_text_artifact(const std::string& path,
                                const std::string& expected_tag) {
  std::string content = read_file(path);
  TextArtifact artifact;

  size_t pos = 0;
  auto next_line = [&](const char* what) {
    size_t eol = content.find('\n', pos);
    if (eol == std::string::npos)
      throw Error(ErrorKind::truncated,
                  path + ": file ends before " + what);
    std::string line = content.substr(pos, eol - pos);
    pos = eol + 1;
    return line;
  };

  artifact.header = parse_header(next_line("header line"), expected_tag);
  std::string config_line = next_line("#config line");
  if (config_line.rfind("#config ", 0) != 0)
    throw Error(ErrorKind::parse, path + ": missing #config line");
  artifact.config_digest = parse_hex16(config_line.substr(8));
  std::string checksum_line = next_line("#checksum line");
  if (checksum_line.rfind("#checksum ", 0) != 0)
    throw Error(ErrorKind::parse, path + ": missing #checksum line");
  artifact.declared_checksum = parse_hex16(checksum_line.substr(10));

  artifact.payload = content.substr(pos);
  std::string remaining = artifact.payload;
  while (!remaining.empty()) {
    size_t eol = remaining.find('\n');
    if (eol == std::string::npos) {
      artifact.payload_lines.push_back(remaining);
      artifact.payload_complete = false;
      break;
    }
    artifact.payload_lines.push_back(remaining.substr(0, eol));
    remaining = remaining.substr(eol + 1);
  }
  return artifact;
}

void verify_payload_checksum(const TextArtifact& artifact,
                             const std::string& path) {
  uint64_t actual = fnv1a64(artifact.payload);
  if (actual != artifact.declared_checksum)
    throw Error(ErrorKind::digest_mismatch,
                path + ": payload checksum " + hex16(actual) +
                    " does not match declared " +
                    hex16(artifact.declared_checksum) +
                    "; file was modified or corrupted");
}

void require_payload_lines(const TextArtifact& artifact, size_t expected,
                           const std::string& path, const char* what) {
  if (artifact.payload_lines.size() < expected || !artifact.payload_complete)
    throw Error(ErrorKind::truncated,
                path + ": expected " + std::to_string(expected) + " " + what +
                    ", found " +
                    std::to_string(artifact.payload_lines.size()) +
                    (artifact.payload_complete ? "" : " (last line cut off)"));
  if (artifact.payload_lines.size() > expected)
    throw Error(ErrorKind::parse,
                path + ": trailing data after " + std::to_string(expected) +
                    " " + what);
}

void append_u64_le(std::string& out, uint64_t value) {
  for (int byte = 0; byte < 8; ++byte)
    out.push_back(static_cast<char>((value >> (8 * byte)) & 0xff));
}

uint64_t read_u64_le(const unsigned char* bytes) {
  uint64_t value = 0;
  for (int byte = 7; byte >= 0; --byte)
    value = (value << 8) | bytes[byte];
  return value;
}

}  // namespace

int format_version(const std::string& tag) {
  auto it = format_registry().find(tag);
  if (it == format_registry().end())
    throw Error(ErrorKind::invalid_argument, "unknown format tag: " + tag);
  return it->second;
}

std::string serialize_graph(const WordGraph& graph, const Config& cfg) {
  const Vocabulary& vocab = graph.vocab();
  std::string payload;
  for (size_t id = 0; id < vocab.size(); ++id) {
    payload += "#vocab\t";
    payload += vocab.words[id];
    payload += '\t';
    payload += std::to_string(vocab.frequencies[id]);
    payload += '\n';
  }

  std::vector<std::tuple<std::string, std::string, uint64_t>> edges;
  edges.reserve(graph.edge_count());
  for (size_t a = 0; a < graph.node_count(); ++a) {
    for (const auto& [b, count] : graph.neighbors(static_cast<uint32_t>(a))) {
      if (b <= a) continue;
      const std::string& wa = vocab.words[a];
      const std::string& wb = vocab.words[b];
      if (wa < wb)
        edges.emplace_back(wa, wb, count);
      else
        edges.emplace_back(wb, wa, count);
    }
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [wa, wb, count] : edges) {
    payload += wa;
    payload += '\t';
    payload += wb;
    payload += '\t';
    payload += std::to_string(count);
    payload += '\n';
  }

  return assemble_text_artifact(
      "gtpm-graph",
      {{"nodes", std::to_string(vocab.size())},
       {"edges", std::to_string(graph.edge_count())}},
      cfg.digest(), payload, nullptr);
}

uint64_t graph_digest(const WordGraph& graph) {
  Config empty;
  std::string content = serialize_graph(graph, empty);
  size_t payload_start = 0;
  for (int line = 0; line < 3; ++line)
    payload_start = content.find('\n', payload_start) + 1;
  return fnv1a64(content.substr(payload_start));
}

uint64_t save_graph(const WordGraph& graph, const Config& cfg,
                    const std::string& path) {
  std::string content = serialize_graph(graph, cfg);
  write_file(path, content);
  size_t payload_start = 0;
  for (int line = 0; line < 3; ++line)
    payload_start = content.find('\n', payload_start) + 1;
  return fnv1a64(content.substr(payload_start));
}

WordGraph load_graph(const std::string& path, uint64_t* config_digest) {
  TextArtifact artifact = read_text_artifact(path, "gtpm-graph");
  auto nodes = static_cast<size_t>(artifact.header.u64_field("nodes"));
  auto edges = static_cast<size_t>(artifact.header.u64_field("edges"));
  require_payload_lines(artifact, nodes + edges, path,
                        "#vocab and edge lines");
  verify_payload_checksum(artifact, path);
  if (config_digest) *config_digest = artifact.config_digest;

  Vocabulary vocab;
  for (size_t i = 0; i < nodes; ++i) {
    const std::string& line = artifact.payload_lines[i];
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3 || fields[0] != "#vocab")
      throw Error(ErrorKind::parse,
                  path + ": malformed #vocab line: " + line);
    if (vocab.contains(fields[1]))
      throw Error(ErrorKind::parse,
                  path + ": duplicate vocabulary word '" + fields[1] + "'");
    vocab.add_word(fields[1], parse_u64(fields[2], path + " vocab frequency"));
  }

  WordGraph graph(std::move(vocab));
  for (size_t i = 0; i < edges; ++i) {
    const std::string& line = artifact.payload_lines[nodes + i];
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3)
      throw Error(ErrorKind::parse, path + ": malformed edge line: " + line);
    auto ia = graph.vocab().id_of(fields[0]);
    auto ib = graph.vocab().id_of(fields[1]);
    if (!ia || !ib)
      throw Error(ErrorKind::parse,
                  path + ": edge references unknown word: " + line);
    uint64_t count = parse_u64(fields[2], path + " edge count");
    if (count == 0)
      throw Error(ErrorKind::parse, path + ": zero edge count: " + line);
    graph.add_count(*ia, *ib, count);
  }
  return graph;
}

uint64_t save_normalized_corpus(const std::vector<DocumentRecord>& docs,
                                const Config& cfg, const std::string& path) {
  std::string payload;
  for (const auto& doc : docs) {
    payload += doc.id;
    payload += '\t';
    payload += doc.label;
    payload += '\t';
    bool first_sentence = true;
    for (const auto& sentence : doc.sentences) {
      if (!first_sentence) payload += " | ";
      first_sentence = false;
      bool first_token = true;
      for (const auto& token : sentence) {
        if (!first_token) payload += ' ';
        first_token = false;
        payload += token;
      }
    }
    payload += '\n';
  }
  uint64_t digest = 0;
  std::string content = assemble_text_artifact(
      "gtpm-corpus", {{"docs", std::to_string(docs.size())}}, cfg.digest(),
      payload, &digest);
  write_file(path, content);
  return digest;
}

std::vector<DocumentRecord> load_normalized_corpus(const std::string& path,
                                                   uint64_t* config_digest) {
  TextArtifact artifact = read_text_artifact(path, "gtpm-corpus");
  auto doc_count = static_cast<size_t>(artifact.header.u64_field("docs"));
  require_payload_lines(artifact, doc_count, path, "document lines");
  verify_payload_checksum(artifact, path);
  if (config_digest) *config_digest = artifact.config_digest;

  std::vector<DocumentRecord> docs;
  docs.reserve(doc_count);
  for (size_t i = 0; i < doc_count; ++i) {
    const std::string& line = artifact.payload_lines[i];
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3)
      throw Error(ErrorKind::parse,
                  path + ": expected 3 columns in document line " +
                      std::to_string(i + 1));
    DocumentRecord doc;
    doc.id = fields[0];
    doc.label = fields[1];
    for (const std::string& chunk : split(fields[2], '|')) {
      std::vector<std::string> tokens;
      std::istringstream token_stream(chunk);
      std::string token;
      while (token_stream >> token) tokens.push_back(token);
      if (!tokens.empty()) doc.sentences.push_back(std::move(tokens));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

uint64_t save_walks(const WalkSet& walks, const Config& cfg,
                    const std::string& path) {
  size_t total = 0;
  std::string payload;
  for (const auto& per_node : walks.walks) {
    for (const auto& walk : per_node) {
      ++total;
      bool first = true;
      for (uint32_t node : walk) {
        if (!first) payload += ' ';
        first = false;
        payload += std::to_string(node);
      }
      payload += '\n';
    }
  }
  uint64_t digest = 0;
  std::string content = assemble_text_artifact(
      "gtpm-walks",
      {{"m", std::to_string(walks.m)},
       {"n", std::to_string(walks.n)},
       {"seed", std::to_string(walks.seed)},
       {"graph", hex16(walks.graph_digest)},
       {"nodes", std::to_string(walks.walks.size())},
       {"walks", std::to_string(total)}},
      cfg.digest(), payload, &digest);
  write_file(path, content);
  return digest;
}

WalkSet load_walks(const std::string& path, uint64_t* config_digest) {
  TextArtifact artifact = read_text_artifact(path, "gtpm-walks");
  WalkSet set;
  set.m = static_cast<int>(artifact.header.u64_field("m"));
  set.n = static_cast<int>(artifact.header.u64_field("n"));
  set.seed = artifact.header.u64_field("seed");
  set.graph_digest = artifact.header.hex_field("graph");
  auto nodes = static_cast<size_t>(artifact.header.u64_field("nodes"));
  auto total = static_cast<size_t>(artifact.header.u64_field("walks"));
  if (total != nodes * static_cast<size_t>(set.n))
    throw Error(ErrorKind::parse,
                path + ": walk count does not equal nodes * n");
  require_payload_lines(artifact, total, path, "walk lines");
  verify_payload_checksum(artifact, path);
  if (config_digest) *config_digest = artifact.config_digest;

  set.walks.assign(nodes, {});
  size_t line_index = 0;
  for (size_t v = 0; v < nodes; ++v) {
    set.walks[v].reserve(static_cast<size_t>(set.n));
    for (int k = 0; k < set.n; ++k, ++line_index) {
      const std::string& line = artifact.payload_lines[line_index];
      Walk walk;
      std::istringstream stream(line);
      std::string token;
      while (stream >> token)
        walk.push_back(static_cast<uint32_t>(
            parse_u64(token, path + " walk line " +
                                 std::to_string(line_index + 1))));
      if (walk.empty())
        throw Error(ErrorKind::parse,
                    path + ": empty walk at line " +
                        std::to_string(line_index + 1));
      set.walks[v].push_back(std::move(walk));
    }
  }
  return set;
}

uint64_t save_embeddings(const EmbeddingSet& embeddings, const Config& cfg,
                         const std::string& path) {
  if (embeddings.ids.size() != embeddings.vectors.size())
    throw Error(ErrorKind::invalid_argument,
                "embedding ids and vectors differ in length");
  std::string payload = "id";
  for (size_t d = 0; d < embeddings.dimension; ++d)
    payload += "\tv" + std::to_string(d);
  payload += '\n';
  for (size_t i = 0; i < embeddings.ids.size(); ++i) {
    if (embeddings.vectors[i].size() != embeddings.dimension)
      throw Error(ErrorKind::invalid_argument,
                  "embedding vector dimension mismatch for id " +
                      embeddings.ids[i]);
    payload += embeddings.ids[i];
    for (double v : embeddings.vectors[i]) {
      payload += '\t';
      payload += format_double(v);
    }
    payload += '\n';
  }
  uint64_t digest = 0;
  std::string content = assemble_text_artifact(
      "gtpm-embeddings",
      {{"m", std::to_string(embeddings.m)},
       {"n", std::to_string(embeddings.n)},
       {"seed", std::to_string(embeddings.seed)},
       {"graph", hex16(embeddings.graph_digest)},
       {"dim", std::to_string(embeddings.dimension)},
       {"docs", std::to_string(embeddings.ids.size())}},
      cfg.digest(), payload, &digest);
  write_file(path, content);
  return digest;
}

EmbeddingSet load_embeddings(const std::string& path,
                             uint64_t* config_digest) {
  TextArtifact artifact = read_text_artifact(path, "gtpm-embeddings");
  EmbeddingSet set;
  set.m = static_cast<int>(artifact.header.u64_field("m"));
  set.n = static_cast<int>(artifact.header.u64_field("n"));
  set.seed = artifact.header.u64_field("seed");
  set.graph_digest = artifact.header.hex_field("graph");
  set.dimension = static_cast<size_t>(artifact.header.u64_field("dim"));
  auto docs = static_cast<size_t>(artifact.header.u64_field("docs"));
  require_payload_lines(artifact, docs + 1, path,
                        "embedding lines (incl. column header)");
  verify_payload_checksum(artifact, path);
  if (config_digest) *config_digest = artifact.config_digest;

  set.ids.reserve(docs);
  set.vectors.reserve(docs);
  for (size_t i = 0; i < docs; ++i) {
    const std::string& line = artifact.payload_lines[i + 1];
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != set.dimension + 1)
      throw Error(ErrorKind::parse,
                  path + ": embedding line " + std::to_string(i + 1) +
                      " has " + std::to_string(fields.size() - 1) +
                      " values, expected " + std::to_string(set.dimension));
    set.ids.push_back(fields[0]);
    std::vector<double> vec;
    vec.reserve(set.dimension);
    for (size_t d = 1; d < fields.size(); ++d)
      vec.push_back(parse_double(fields[d], path + " embedding value"));
    set.vectors.push_back(std::move(vec));
  }
  return set;
}

uint64_t save_model(const MLPModel& model, const TrainConfig& train_cfg,
                    const Config& cfg, const std::string& path) {
  std::string params;
  params.reserve(model.parameter_count() * 8);
  auto append_doubles = [&](const std::vector<double>& values) {
    for (double v : values) append_u64_le(params, std::bit_cast<uint64_t>(v));
  };
  for (const auto& w : model.weights) append_doubles(w.data);
  for (const auto& b : model.biases) append_doubles(b);
  uint64_t param_checksum = fnv1a64(params.data(), params.size());

  nlohmann::json header;
  header["layer_sizes"] = model.layer_sizes;
  header["classes"] = model.classes;
  header["hidden_activation"] = "relu";
  header["output_activation"] =
      model.logistic_output() ? "logistic" : "softmax";
  if (!model.class_names.empty()) header["class_names"] = model.class_names;
  header["param_count"] = model.parameter_count();
  header["param_checksum"] = hex16(param_checksum);
  header["config_digest"] = hex16(cfg.digest());
  header["train"] = {{"learning_rate", train_cfg.learning_rate},
                     {"dropout", train_cfg.dropout},
                     {"batch_size", train_cfg.batch_size},
                     {"patience", train_cfg.patience},
                     {"max_epochs", train_cfg.max_epochs},
                     {"validation_fraction", train_cfg.validation_fraction},
                     {"seed", train_cfg.seed},
                     {"hidden_sizes", train_cfg.hidden_sizes}};
  std::string header_json = header.dump();

  std::string content = "GTPMMDL1";
  append_u64_le(content, header_json.size());
  content += header_json;
  content += params;
  write_file(path, content);
  return param_checksum;
}

LoadedModel load_model(const std::string& path) {
  std::string content = read_file(path);
  if (content.size() < 8)
    throw Error(ErrorKind::truncated, path + ": file shorter than its magic");
  if (content.compare(0, 7, "GTPMMDL") != 0)
    throw Error(ErrorKind::parse, path + ": not a model file");
  if (content[7] != '1')
    throw Error(ErrorKind::version_mismatch,
                path + ": model format version '" +
                    std::string(1, content[7]) + "' is not supported");
  if (content.size() < 16)
    throw Error(ErrorKind::truncated, path + ": file ends inside the header");
  uint64_t header_size = read_u64_le(
      reinterpret_cast<const unsigned char*>(content.data() + 8));
  if (content.size() < 16 + header_size)
    throw Error(ErrorKind::truncated,
                path + ": file ends inside the JSON header");

  nlohmann::json header = nlohmann::json::parse(
      content.substr(16, header_size), nullptr, false);
  if (header.is_discarded() || !header.is_object())
    throw Error(ErrorKind::parse, path + ": malformed JSON header");

  LoadedModel loaded;
  uint64_t param_count = 0;
  uint64_t declared_checksum = 0;
  try {
    loaded.model.layer_sizes = header.at("layer_sizes")
                                   .get<std::vector<size_t>>();
    loaded.model.classes = header.at("classes").get<int>();
    if (header.contains("class_names"))
      loaded.model.class_names =
          header.at("class_names").get<std::vector<std::string>>();
    param_count = header.at("param_count").get<uint64_t>();
    declared_checksum = parse_hex16(
        header.at("param_checksum").get<std::string>());
    loaded.config_digest = parse_hex16(
        header.at("config_digest").get<std::string>());
    const auto& train = header.at("train");
    loaded.train_config.learning_rate = train.at("learning_rate").get<double>();
    loaded.train_config.dropout = train.at("dropout").get<double>();
    loaded.train_config.batch_size = train.at("batch_size").get<int>();
    loaded.train_config.patience = train.at("patience").get<int>();
    loaded.train_config.max_epochs = train.at("max_epochs").get<int>();
    loaded.train_config.validation_fraction =
        train.at("validation_fraction").get<double>();
    loaded.train_config.seed = train.at("seed").get<uint64_t>();
    loaded.train_config.hidden_sizes = train.at("hidden_sizes")
                                           .get<std::vector<size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse,
                path + ": JSON header missing fields: " + e.what());
  }
  if (loaded.model.layer_sizes.size() < 2)
    throw Error(ErrorKind::parse, path + ": model needs at least 2 layers");

  size_t param_bytes = static_cast<size_t>(param_count) * 8;
  if (content.size() < 16 + header_size + param_bytes)
    throw Error(ErrorKind::truncated,
                path + ": file ends inside the parameter block");
  if (content.size() > 16 + header_size + param_bytes)
    throw Error(ErrorKind::parse, path + ": trailing bytes after parameters");

  const char* params = content.data() + 16 + header_size;
  uint64_t actual_checksum = fnv1a64(params, param_bytes);
  if (actual_checksum != declared_checksum)
    throw Error(ErrorKind::digest_mismatch,
                path + ": parameter checksum " + hex16(actual_checksum) +
                    " does not match declared " + hex16(declared_checksum));

  size_t expected_params = 0;
  const auto& sizes = loaded.model.layer_sizes;
  for (size_t l = 0; l + 1 < sizes.size(); ++l)
    expected_params += sizes[l] * sizes[l + 1] + sizes[l + 1];
  if (expected_params != param_count)
    throw Error(ErrorKind::parse,
                path + ": param_count does not match layer sizes");

  const unsigned char* cursor =
      reinterpret_cast<const unsigned char*>(params);
  auto take_doubles = [&](size_t count) {
    std::vector<double> values;
    values.reserve(count);
    for (size_t i = 0; i < count; ++i, cursor += 8)
      values.push_back(std::bit_cast<double>(read_u64_le(cursor)));
    return values;
  };
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    Matrix w(sizes[l + 1], sizes[l]);
    w.data = take_doubles(sizes[l] * sizes[l + 1]);
    loaded.model.weights.push_back(std::move(w));
  }
  for (size_t l = 0; l + 1 < sizes.size(); ++l)
    loaded.model.biases.push_back(take_doubles(sizes[l + 1]));
  return loaded;
}

uint64_t save_report(const EvalReport& report, const Config& cfg,
                     const std::string& path) {
  std::string payload =
      "class\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\tin_labels\n";
  uint64_t pooled_tp = 0, pooled_fp = 0, pooled_fn = 0, pooled_tn = 0;
  for (const auto& c : report.per_class) {
    payload += c.label + '\t' + std::to_string(c.tp) + '\t' +
               std::to_string(c.fp) + '\t' + std::to_string(c.fn) + '\t' +
               std::to_string(c.tn) + '\t' + format_double(c.precision) +
               '\t' + format_double(c.recall) + '\t' + format_double(c.f1) +
               '\t' + (c.in_labels ? "1" : "0") + '\n';
    pooled_tp += c.tp;
    pooled_fp += c.fp;
    pooled_fn += c.fn;
    pooled_tn += c.tn;
  }
  payload += "__overall__\t" + std::to_string(pooled_tp) + '\t' +
             std::to_string(pooled_fp) + '\t' + std::to_string(pooled_fn) +
             '\t' + std::to_string(pooled_tn) + '\t' +
             format_double(report.micro_f1) + '\t' +
             format_double(report.micro_f1) + '\t' +
             format_double(report.micro_f1) + "\t1\n";
  uint64_t digest = 0;
  std::string content = assemble_text_artifact(
      "gtpm-report",
      {{"classes", std::to_string(report.per_class.size())},
       {"docs", std::to_string(report.total)},
       {"micro_f1", format_double(report.micro_f1)},
       {"macro_f1", format_double(report.macro_f1)},
       {"accuracy", format_double(report.accuracy)}},
      cfg.digest(), payload, &digest);
  write_file(path, content);
  return digest;
}

EvalReport load_report(const std::string& path, uint64_t* config_digest) {
  TextArtifact artifact = read_text_artifact(path, "gtpm-report");
  auto classes = static_cast<size_t>(artifact.header.u64_field("classes"));
  require_payload_lines(artifact, classes + 2, path,
                        "report lines (incl. column header and summary)");
  verify_payload_checksum(artifact, path);
  if (config_digest) *config_digest = artifact.config_digest;

  EvalReport report;
  report.total = artifact.header.u64_field("docs");
  report.micro_f1 = artifact.header.double_field("micro_f1");
  report.macro_f1 = artifact.header.double_field("macro_f1");
  report.accuracy = artifact.header.double_field("accuracy");
  for (size_t i = 0; i < classes; ++i) {
    const std::string& line = artifact.payload_lines[i + 1];
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 9)
      throw Error(ErrorKind::parse,
                  path + ": report line " + std::to_string(i + 1) +
                      " has " + std::to_string(fields.size()) + " columns");
    ClassStats stats;
    stats.label = fields[0];
    stats.tp = parse_u64(fields[1], path + " tp");
    stats.fp = parse_u64(fields[2], path + " fp");
    stats.fn = parse_u64(fields[3], path + " fn");
    stats.tn = parse_u64(fields[4], path + " tn");
    stats.precision = parse_double(fields[5], path + " precision");
    stats.recall = parse_double(fields[6], path + " recall");
    stats.f1 = parse_double(fields[7], path + " f1");
    stats.in_labels = fields[8] == "1";
    report.per_class.push_back(std::move(stats));
  }
  return report;
}

}  // namespace gtpm
