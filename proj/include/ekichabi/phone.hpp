#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ekichabi {

class InvalidNumberError : public std::invalid_argument {
 public:
  explicit InvalidNumberError(const std::string& raw)
      : std::invalid_argument("invalid phone number: '" + raw + "'") {}
};

/// Canonical MSISDN: 12 digits starting with the Tanzanian country code 255.
///
/// All non-digits are dropped first. "255XXXXXXXXX" is kept, "0XXXXXXXXX"
/// has its trunk zero replaced by 255 and a bare 9-digit subscriber number is
/// prefixed with 255. Anything else is rejected.
std::string normalize_msisdn(std::string_view raw);

std::optional<std::string> try_normalize_msisdn(std::string_view raw);

bool is_canonical_msisdn(std::string_view s);

}  // namespace ekichabi
