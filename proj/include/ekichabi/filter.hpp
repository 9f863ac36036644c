#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ekichabi/directory.hpp"

namespace ekichabi {

enum class Facet : std::uint8_t { Sector, Subsector, District, Village, Subvillage };

inline constexpr Facet kAllFacets[] = {Facet::Sector, Facet::Subsector,
                                       Facet::District, Facet::Village,
                                       Facet::Subvillage};

const char* to_string(Facet f);

/// Raised when a filter state breaks its structural invariants or names a
/// facet value that does not exist in the directory.
class FilterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FilterState {
  std::optional<Sector> sector;
  std::optional<std::string> subsector;
  std::optional<std::string> district;
  std::optional<std::string> village;
  std::optional<std::string> subvillage;

  bool operator==(const FilterState&) const = default;

  bool is_set(Facet f) const;
  /// Sector is stored as its taxonomy label for uniform handling.
  std::optional<std::string> value(Facet f) const;
  void set(Facet f, const std::string& value);
  void clear(Facet f);

  /// subsector needs sector, village needs district, subvillage needs village.
  bool structurally_valid() const;
  bool empty() const;

  /// Does `b` satisfy every set facet?
  bool matches(const Business& b) const;

  /// Stable text key for memo tables.
  std::string key() const;
};

/// The facet that must be set before `f` may be chosen, if any.
std::optional<Facet> parent_of(Facet f);

/// Throws FilterError unless `f` is structurally valid and every set value
/// exists in `d`'s taxonomy and geography.
void validate_filter(const Directory& d, const FilterState& f);

/// Label of business `b` along facet `f`.
const std::string& facet_value(const Business& b, Facet f);

}  // namespace ekichabi
