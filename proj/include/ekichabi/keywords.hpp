#pragma once

/// @file ekichabi/keywords.hpp
/// @brief Keyword vocabulary over a directory and fuzzy candidate lookup.
///
/// Misspelt place and product names are the main failure of typed search on
/// feature phones, so a typed query is matched against the vocabulary with a
/// Damerau-Levenshtein distance (optimal string alignment: insert, delete,
/// substitute, swap two adjacent characters) and the user picks from the
/// closest keywords.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ekichabi/directory.hpp"
#include "ekichabi/filter.hpp"

namespace ekichabi {

enum class KeywordKind : std::uint8_t {
  Sector,
  Subsector,
  Product,
  District,
  Village,
  Subvillage,
  OwnerName,
  BusinessName,
};

inline constexpr int kKeywordKindCount = 8;

const char* to_string(KeywordKind k);
std::optional<KeywordKind> parse_keyword_kind(std::string_view s);

/// Ranking priority: sector < subsector < product < location < owner < name.
int kind_priority(KeywordKind k);

/// Bit set over KeywordKind.
class KindMask {
 public:
  constexpr KindMask() = default;
  constexpr KindMask(std::initializer_list<KeywordKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }
  static constexpr KindMask all() {
    KindMask m;
    m.bits_ = (1u << kKeywordKindCount) - 1;
    return m;
  }
  constexpr bool contains(KeywordKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool operator==(const KindMask&) const = default;

 private:
  static constexpr std::uint32_t bit(KeywordKind k) {
    return 1u << static_cast<unsigned>(k);
  }
  std::uint32_t bits_ = 0;
};

struct Keyword {
  std::string text;  // lowercase
  KeywordKind kind;
  /// Businesses the keyword refers to, in canonical order. Never empty.
  std::vector<BusinessId> referents;
  /// Set when every referent shares one facet path (sector keyword, a village
  /// name unique to one district, ...).
  std::optional<FilterState> facet;
};

struct KeywordRef {
  std::string text;
  KeywordKind kind;
  bool operator==(const KeywordRef&) const = default;
};

struct Candidate {
  std::string text;
  KeywordKind kind;
  std::size_t distance;
  bool operator==(const Candidate&) const = default;
  KeywordRef ref() const { return {text, kind}; }
};

class SearchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Restricted Damerau-Levenshtein (optimal string alignment) distance over
/// code points.
std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t damerau_levenshtein(std::string_view a, std::string_view b);

/// Same distance, but gives up early: returns nullopt once the distance is
/// certain to exceed `limit`.
std::optional<std::size_t> damerau_levenshtein_within(std::u32string_view a,
                                                      std::u32string_view b,
                                                      std::size_t limit);

/// Largest distance at which a keyword of `chars` code points still matches:
/// max(1, ceil(chars / 4)).
std::size_t match_threshold(std::size_t chars);

/// Total order used for candidates: distance, kind priority, text, kind.
bool candidate_less(const Candidate& a, const Candidate& b);

inline constexpr std::size_t kDefaultCandidates = 8;

class KeywordIndex {
 public:
  KeywordIndex() = default;
  /// Vocabulary: sector/subsector labels, product terms and geo names (whole
  /// label and per token) plus business-name and owner-name tokens.
  explicit KeywordIndex(const Directory& d);

  std::span<const Keyword> keywords() const { return keywords_; }
  std::size_t size() const { return keywords_.size(); }
  const Keyword* find(std::string_view text, KeywordKind kind) const;
  const Keyword* find(const KeywordRef& ref) const { return find(ref.text, ref.kind); }

  /// Ranked candidates within each keyword's match threshold; at most `k`.
  /// Throws SearchError on an empty query or k == 0.
  std::vector<Candidate> fuzzy_candidates(std::string_view query, std::size_t k,
                                          KindMask kinds = KindMask::all()) const;

  /// Businesses referred to by `ref`, canonical order. Throws SearchError for
  /// a keyword not in the index.
  std::vector<BusinessId> resolve(const KeywordRef& ref) const;

 private:
  std::vector<Keyword> keywords_;  // sorted by (text, kind)
  std::vector<std::u32string> decoded_;
  // keyword indices bucketed by code-point length
  std::map<std::size_t, std::vector<std::size_t>> by_length_;
};

KeywordIndex build_keyword_index(const Directory& d);

std::vector<Candidate> fuzzy_candidates(const KeywordIndex& ix,
                                        std::string_view query, std::size_t k,
                                        KindMask kinds = KindMask::all());

}  // namespace ekichabi
