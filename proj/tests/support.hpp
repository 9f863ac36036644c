#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ekichabi/catalog.hpp"
#include "ekichabi/directory.hpp"
#include "ekichabi/keywords.hpp"
#include "ekichabi/navigator.hpp"

namespace ekichabi::testing {

/// 50 businesses laid out so that category and location paths keep more
/// than 10 matches through the first three facets on some branches and fall
/// to 10 or fewer on others. See fixture.cpp for the table.
Directory fixture_directory();
std::shared_ptr<const Catalog> fixture_catalog();

/// Synthetic (seed 7, n 10000), built once per process.
std::shared_ptr<const Catalog> big_catalog();

/// Plain recursive restricted Damerau-Levenshtein with a memo table.
std::size_t osa_oracle(const std::u32string& a, const std::u32string& b);

/// Every vocabulary keyword within max(1, ceil(len/4)) of `query`, sorted by
/// distance, kind priority, text, kind. Computed with osa_oracle.
std::vector<Candidate> brute_force_candidates(const KeywordIndex& ix, const std::string& query,
                                              std::size_t k, KindMask kinds = KindMask::all());

/// Count of businesses matching every set facet, by direct field comparison.
std::size_t brute_count(const Directory& d, const FilterState& f,
                        const std::vector<BusinessId>* within = nullptr);

/// Drives a machine through `inputs`, returning every screen shown
/// (including the opening one).
struct Walk {
  std::vector<SessionState> states;
  std::vector<Screen> screens;
  std::vector<bool> invalid;
};
Walk walk(const SessionMachine& m, const std::vector<std::string>& inputs,
          bool disclaimer_seen = true, const std::string& msisdn = "255700000001");

std::string utf8(const std::u32string& s);

}  // namespace ekichabi::testing
