#pragma once

/// @file ekichabi/usage_log.hpp
/// @brief Compact binary usage logs written by offline clients.
///
/// Batch layout:
///
///     "EKL1"                 4 bytes
///     device msisdn          12 ASCII digits
///     base timestamp         u32 little endian, unix seconds
///     directory version      8 bytes, as in the snapshot header
///     record count           varint
///     records
///
/// Record: tag byte, dt varint (seconds since the previous record, or since
/// the base timestamp for the first), then a payload chosen by tag:
///
///     1-5  business id varint
///     6    facet count varint, then per facet: facet tag byte (1 sector,
///          2 subsector, 3 district, 4 village, 5 subvillage) and a value
///          varint (the sector code for 1, a snapshot string-pool index
///          otherwise)
///     7    query length byte (at most 32), then the UTF-8 query bytes

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ekichabi/directory.hpp"

namespace ekichabi {

inline constexpr std::string_view kLogMagic = "EKL1";
inline constexpr std::size_t kLogHeaderSize = 4 + 12 + 4 + 8;
inline constexpr std::size_t kMaxLoggedQuery = 32;
inline constexpr std::size_t kMaxLoggedFacets = 5;

enum class Action : std::uint8_t {
  Favorite = 1,
  Unfavorite = 2,
  Call = 3,
  AddContact = 4,
  OpenDetail = 5,
  FilterSearch = 6,
  TextSearch = 7,
};

inline constexpr int kActionCount = 7;

const char* action_name(Action a);
std::optional<Action> parse_action_name(std::string_view name);
bool carries_business(Action a);

struct FacetChoice {
  std::uint8_t facet = 1;  // 1..5
  std::uint64_t value = 0;
  bool operator==(const FacetChoice&) const = default;
};

struct UsageLogRecord {
  Action action = Action::OpenDetail;
  std::uint64_t dt = 0;
  BusinessId business = 0;          // tags 1-5
  std::vector<FacetChoice> facets;  // tag 6
  std::string query;                // tag 7
  bool operator==(const UsageLogRecord&) const = default;
};

struct LogBatch {
  std::string msisdn;  // canonical, 12 digits
  std::uint32_t base_ts = 0;
  std::array<std::uint8_t, 8> version{};
  std::vector<UsageLogRecord> records;
  bool operator==(const LogBatch&) const = default;
};

class LogError : public std::runtime_error {
 public:
  enum class Kind {
    BadMagic,
    BadHeader,
    Truncated,
    BadTag,
    OversizeQuery,
    BadPayload,
    TrailingBytes,
  };
  static constexpr std::size_t kHeader = static_cast<std::size_t>(-1);

  LogError(Kind kind, std::size_t record, const std::string& what);
  Kind kind() const { return kind_; }
  /// Zero-based index of the offending record, or kHeader.
  std::size_t record() const { return record_; }

 private:
  Kind kind_;
  std::size_t record_;
};

const char* to_string(LogError::Kind k);

/// Throws LogError (with the record index) for records that cannot be
/// encoded: oversize query, too many facets, bad facet tag.
std::string encode_record(const UsageLogRecord& r, std::size_t index = 0);
std::string encode_batch(const LogBatch& b);
std::size_t encoded_size(const LogBatch& b);

/// Incremental decoder: bytes may arrive in chunks of any size.
class BatchDecoder {
 public:
  /// Throws LogError as soon as the bytes seen so far are invalid.
  void feed(std::string_view chunk);
  /// Throws LogError::Truncated unless the batch is complete.
  LogBatch finish();

  bool header_done() const { return header_done_; }
  std::size_t records_decoded() const { return batch_.records.size(); }

 private:
  void parse();
  bool parse_record();

  std::string buffer_;
  std::size_t pos_ = 0;
  bool header_done_ = false;
  std::uint64_t count_ = 0;
  LogBatch batch_;
};

LogBatch decode_batch(std::string_view bytes);

/// Absolute timestamps of each record: base + cumulative dt.
std::vector<std::int64_t> record_times(const LogBatch& b);

/// Human-readable payload, e.g. "business=42", "district=Bukoba;sector=2",
/// "query=duka". Pool indices are resolved through `pool` when given.
std::string render_payload(const UsageLogRecord& r,
                           const std::vector<std::string>* pool = nullptr);

}  // namespace ekichabi
