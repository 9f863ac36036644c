#pragma once

/// @file ekichabi/snapshot.hpp
/// @brief Versioned binary snapshot of a whole directory for offline clients.
///
/// Layout (all integers are unsigned LEB128 varints unless noted):
///
///     "EKD1"                 4 bytes magic
///     format                 1 byte, currently 1
///     content version        8 bytes, SHA-256 prefix of the canonical records
///     business count
///     pool size
///     pool entries           length + UTF-8 bytes, strictly ascending, unique
///     records                per business in id order:
///                              id delta, name, owner, phone (pool indices),
///                              sector (1 byte), subsector, district, village,
///                              subvillage (pool indices),
///                              product count (1 byte), product pool indices
///
/// Encoding is canonical: equal directories give equal bytes.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ekichabi/directory.hpp"

namespace ekichabi {

inline constexpr std::string_view kSnapshotMagic = "EKD1";
inline constexpr std::uint8_t kSnapshotFormat = 1;

using ContentVersion = std::array<std::uint8_t, 8>;

class SnapshotError : public std::runtime_error {
 public:
  enum class Kind {
    BadMagic,
    UnsupportedFormat,
    Truncated,
    UnsortedPool,
    DanglingIndex,
    BadRecord,
    VersionMismatch,
    TrailingBytes,
  };

  SnapshotError(Kind kind, std::size_t offset, const std::string& what);
  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

const char* to_string(SnapshotError::Kind kind);

/// Canonical per-record bytes the content version is hashed from.
std::string canonical_record_bytes(const Directory& d);

ContentVersion content_version(const Directory& d);

/// 16 lowercase hex characters.
std::string version_of(const Directory& d);
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Deduplicated, bytewise-sorted string pool used by the snapshot. Tag-6
/// usage-log records refer to facet values by index into this pool.
std::vector<std::string> string_pool(const Directory& d);

std::string encode_snapshot(const Directory& d);

/// Throws SnapshotError; never returns a directory that differs from what
/// was encoded.
Directory decode_snapshot(std::string_view bytes);

/// Reads only the header's content version (throws on bad magic/format).
std::string snapshot_version(std::string_view bytes);

}  // namespace ekichabi
