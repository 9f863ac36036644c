#pragma once

/// @file ekichabi/navigator.hpp
/// @brief The USSD navigation tree: transitions and screen rendering.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ekichabi/search.hpp"
#include "ekichabi/session.hpp"
#include "ekichabi/strings.hpp"

namespace ekichabi {

/// Reserved inputs. Item ordinals never take these values.
inline constexpr std::string_view kInputNext = "0";
inline constexpr std::string_view kInputBack = "99";
inline constexpr std::string_view kInputHome = "98";
inline constexpr std::string_view kInputShow = "96";

/// Ordinal shown for the item at zero-based `index`: 1..95, then 100, 101, ...
std::uint32_t ordinal_for(std::size_t index);
/// Inverse of ordinal_for; nullopt for 0 and 96..99.
std::optional<std::size_t> index_for(std::uint32_t ordinal);

/// Facet visiting order for an entry path. Text paths refine by district
/// and village only, so a text search never takes more than 8 screens.
std::span<const Facet> facet_order(EntryPath p);

/// Rendered screens keyed by directory version and view key.
class ScreenMemo {
 public:
  virtual ~ScreenMemo() = default;
  virtual std::optional<Screen> lookup(const std::string& key) = 0;
  virtual void store(const std::string& key, const Screen& screen) = 0;
};

struct StepResult {
  SessionState state;
  Screen screen;
  bool invalid = false;  // input was rejected and the screen re-rendered
};

/// Stateless apart from the optional memo: every call is a function of its
/// arguments and the directory behind `search`.
class SessionMachine {
 public:
  SessionMachine(const SearchBackend& search, const Strings& strings,
                 std::string version = {}, ScreenMemo* memo = nullptr);

  StepResult start(std::string msisdn, bool disclaimer_seen = false,
                   std::int64_t now = 0) const;
  StepResult step(SessionState s, std::string_view input, std::int64_t now = 0) const;

  /// Screen for `s`; with `invalid` the title line is replaced by the error
  /// line.
  Screen render(const SessionState& s, bool invalid = false) const;

  /// Labels of the numbered items at the state's node, all pages.
  std::vector<std::string> items(const SessionState& s) const;
  /// Zero-based [first, last) item ranges per page.
  std::vector<std::pair<std::size_t, std::size_t>> pages(const SessionState& s) const;

  const SearchBackend& search() const { return search_; }

 private:
  struct Layout;

  Screen render_fresh(const SessionState& s, bool invalid) const;
  Layout layout(const SessionState& s) const;
  Query query_of(const SessionState& s) const;
  std::vector<Candidate> candidates(const SessionState& s) const;

  void go(SessionState& s, Node next) const;
  void advance(SessionState& s) const;
  void back(SessionState& s) const;
  void home(SessionState& s) const;
  bool choose(SessionState& s, std::size_t index) const;
  bool submit_query(SessionState& s, std::string_view input) const;

  const SearchBackend& search_;
  const Strings& strings_;
  std::string version_;
  ScreenMemo* memo_;
};

}  // namespace ekichabi
