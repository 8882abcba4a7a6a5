#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace gtpm {

inline constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ull;

inline uint64_t fnv1a64(const void* data, size_t size,
                        uint64_t state = kFnvOffset) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < size; ++i) {
    state ^= bytes[i];
    state *= kFnvPrime;
  }
  return state;
}

inline uint64_t fnv1a64(const std::string& text,
                        uint64_t state = kFnvOffset) {
  return fnv1a64(text.data(), text.size(), state);
}

// 16 lowercase hex digits, zero padded.
std::string hex16(uint64_t value);

// Inverse of hex16; throws on malformed input.
uint64_t parse_hex16(const std::string& text);

}  // namespace gtpm
