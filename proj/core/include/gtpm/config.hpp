#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace gtpm {

// Flat key=value settings. Keys are dotted lowercase names; values are
// uninterpreted strings until read through a typed getter.
class Config {
 public:
  Config() = default;

  // One key=value per line; '#' starts a comment; blank lines skipped;
  // whitespace around key and value trimmed; later keys override earlier.
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  int64_t get_int64(const std::string& key, int64_t fallback) const;
  uint64_t get_uint64(const std::string& key, uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Sorted "key=value\n" lines; the digest input.
  std::string canonical() const;
  uint64_t digest() const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace gtpm
