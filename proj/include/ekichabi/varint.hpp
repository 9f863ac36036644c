#pragma once

// Unsigned LEB128: base-128, little-endian groups, high bit set on every byte
// except the last.
//
//   1   -> 01
//   127 -> 7F
//   138 -> 8A 01
//
// Decoding rejects encodings longer than ten bytes or overflowing 64 bits
// instead of silently truncating them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace ekichabi {

inline std::size_t varint_size(std::uint64_t v) {
  std::size_t n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

inline void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

enum class VarintStatus { Ok, Incomplete, Overflow };

/// Decodes one varint from the front of `in`. On Ok, `value` and `consumed`
/// are set.
inline VarintStatus get_varint(std::span<const std::uint8_t> in,
                               std::uint64_t& value, std::size_t& consumed) {
  std::uint64_t result = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::uint64_t part = in[i] & 0x7F;
    unsigned shift = static_cast<unsigned>(7 * i);
    if (i == 9 && part > 1) return VarintStatus::Overflow;
    result |= part << shift;
    if ((in[i] & 0x80) == 0) {
      value = result;
      consumed = i + 1;
      return VarintStatus::Ok;
    }
    if (i == 9) return VarintStatus::Overflow;
  }
  return VarintStatus::Incomplete;
}

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace ekichabi
