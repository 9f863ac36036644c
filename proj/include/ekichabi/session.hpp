#pragma once

/// @file ekichabi/session.hpp
/// @brief USSD session state, screens and the compact session string.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ekichabi/directory.hpp"
#include "ekichabi/filter.hpp"
#include "ekichabi/keywords.hpp"

namespace ekichabi {

inline constexpr std::size_t kScreenLimit = 160;
inline constexpr std::size_t kSessionStringLimit = 256;
inline constexpr std::size_t kQueryLimitBytes = 32;
inline constexpr std::size_t kJumpThreshold = 10;

enum class Node : std::uint8_t {
  Welcome,
  SectorList,
  SubsectorList,
  DistrictList,
  VillageList,
  SubvillageList,
  TextTypeMenu,
  TextInput,
  KeywordSelect,
  BusinessList,
  Disclaimer,
  BusinessDetail,
  Help,
};

/// Two-letter tag used in session strings and hit logs.
const char* node_tag(Node n);
std::optional<Node> node_from_tag(std::string_view tag);

/// The facet list node for `f` and back.
Node list_node(Facet f);
std::optional<Facet> facet_of(Node n);
bool is_filter_node(Node n);

enum class EntryPath : std::uint8_t { None, Category, Location, Text };

enum class TextType : std::uint8_t { None, BusinessName, Location, Products, OwnerName };

KindMask kinds_for(TextType t);

struct TrailEntry {
  Node node;
  std::uint32_t page;
  bool operator==(const TrailEntry&) const = default;
};

struct SessionState {
  std::string msisdn;
  Node node = Node::Welcome;
  EntryPath entry_path = EntryPath::None;
  FilterState filters;
  std::uint32_t page = 0;
  TextType text_type = TextType::None;
  std::string query;                       // text path, <= 32 bytes
  std::optional<KeywordRef> keyword;       // text path, after selection
  std::optional<BusinessId> selected_business;
  bool disclaimer_seen = false;
  std::vector<TrailEntry> trail;           // back stack
  std::int64_t last_active = 0;

  bool operator==(const SessionState&) const = default;

  /// Fields that determine the rendered screen; used as the cache key.
  std::string view_key() const;
  std::size_t depth() const { return trail.size(); }
};

enum class ScreenKind : std::uint8_t { Continue, End };

struct Screen {
  ScreenKind kind = ScreenKind::Continue;
  std::string body;
  bool operator==(const Screen&) const = default;
};

class SessionFormatError : public std::runtime_error {
 public:
  enum class Kind { Version, FieldCount, Malformed };
  SessionFormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// "v1|" followed by '|'-separated fields, no whitespace. See docs/formats.md.
std::string serialize_session(const SessionState& s);
SessionState deserialize_session(std::string_view s);

}  // namespace ekichabi
