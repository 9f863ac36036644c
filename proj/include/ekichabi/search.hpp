#pragma once

/// @file ekichabi/search.hpp
/// @brief Faceted filtering and keyword resolution over a directory.
///
/// Two interchangeable backends answer the same questions:
///   - IndexedSearch: posting lists per facet value, memoised counts and
///     option lists. Used when serving.
///   - ScanSearch: a linear scan of every record per call, the way an
///     unindexed store would. Used as the benchmark baseline and as a
///     cross-check of the indexed path.

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ekichabi/directory.hpp"
#include "ekichabi/filter.hpp"
#include "ekichabi/keywords.hpp"
#include "ekichabi/lru_cache.hpp"

namespace ekichabi {

struct ResultSet {
  std::vector<BusinessId> ids;  // canonical order, no duplicates
  std::size_t total() const { return ids.size(); }
  bool operator==(const ResultSet&) const = default;
};

/// What a list screen is showing: optional keyword referents narrowed by
/// filters.
struct Query {
  std::optional<KeywordRef> keyword;
  FilterState filters;
  bool operator==(const Query&) const = default;
  std::string key() const;
};

class SearchBackend {
 public:
  virtual ~SearchBackend() = default;

  virtual const Directory& directory() const = 0;
  virtual const KeywordIndex& keywords() const = 0;

  /// Throws FilterError when the filters are invalid for this directory and
  /// SearchError for an unknown keyword.
  virtual ResultSet results(const Query& q) const = 0;
  virtual std::size_t count(const Query& q) const = 0;

  /// Distinct labels along `dim` with at least one match, alphabetical
  /// (sectors in taxonomy order). Throws FilterError when `dim` is already
  /// set or its parent facet is unset.
  virtual std::vector<std::string> options(const Query& q, Facet dim) const = 0;

  virtual std::vector<Candidate> fuzzy_candidates(std::string_view query,
                                                  std::size_t k,
                                                  KindMask kinds) const = 0;

  ResultSet apply_filters(const FilterState& f) const { return results({std::nullopt, f}); }
  std::vector<std::string> options_for(const FilterState& f, Facet dim) const {
    return options({std::nullopt, f}, dim);
  }
  ResultSet resolve_keyword(const KeywordRef& kw) const;
};

/// Throws FilterError if `dim` is not the next choosable facet under `f`.
void check_option_dimension(const FilterState& f, Facet dim);

class IndexedSearch final : public SearchBackend {
 public:
  IndexedSearch(std::shared_ptr<const Directory> directory,
                std::shared_ptr<const KeywordIndex> keywords,
                std::size_t memo_capacity = 4096);

  const Directory& directory() const override { return *directory_; }
  const KeywordIndex& keywords() const override { return *keywords_; }
  ResultSet results(const Query& q) const override;
  std::size_t count(const Query& q) const override;
  std::vector<std::string> options(const Query& q, Facet dim) const override;
  std::vector<Candidate> fuzzy_candidates(std::string_view query, std::size_t k,
                                          KindMask kinds) const override;

 private:
  using Ranks = std::vector<std::uint32_t>;

  Ranks matching_ranks(const Query& q) const;
  const Ranks* posting(const std::string& key) const;

  std::shared_ptr<const Directory> directory_;
  std::shared_ptr<const KeywordIndex> keywords_;
  std::vector<BusinessId> id_by_rank_;
  std::vector<std::uint32_t> rank_by_id_;  // index = id
  std::unordered_map<std::string, Ranks> postings_;
  mutable LruCache<std::string, std::size_t> count_memo_;
  mutable LruCache<std::string, std::vector<std::string>> option_memo_;
};

class ScanSearch final : public SearchBackend {
 public:
  ScanSearch(std::shared_ptr<const Directory> directory,
             std::shared_ptr<const KeywordIndex> keywords);

  const Directory& directory() const override { return *directory_; }
  const KeywordIndex& keywords() const override { return *keywords_; }
  ResultSet results(const Query& q) const override;
  std::size_t count(const Query& q) const override;
  std::vector<std::string> options(const Query& q, Facet dim) const override;
  std::vector<Candidate> fuzzy_candidates(std::string_view query, std::size_t k,
                                          KindMask kinds) const override;

 private:
  std::shared_ptr<const Directory> directory_;
  std::shared_ptr<const KeywordIndex> keywords_;
};

/// Does business `b` carry keyword `kw`? Recomputed from the record's fields.
bool business_has_keyword(const Business& b, const KeywordRef& kw);

}  // namespace ekichabi
