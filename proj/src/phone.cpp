#include "ekichabi/phone.hpp"

#include <algorithm>

namespace ekichabi {

std::optional<std::string> try_normalize_msisdn(std::string_view raw) {
  std::string digits;
  for (char c : raw) {
    if (c >= '0' && c <= '9') digits.push_back(c);
  }
  std::string out;
  if (digits.size() == 12 && digits.starts_with("255")) {
    out = digits;
  } else if (digits.size() == 10 && digits.front() == '0') {
    out = "255" + digits.substr(1);
  } else if (digits.size() == 9) {
    out = "255" + digits;
  } else {
    return std::nullopt;
  }
  return out;
}

std::string normalize_msisdn(std::string_view raw) {
  auto n = try_normalize_msisdn(raw);
  if (!n) throw InvalidNumberError(std::string(raw));
  return *n;
}

bool is_canonical_msisdn(std::string_view s) {
  return s.size() == 12 && s.starts_with("255") &&
         std::all_of(s.begin(), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace ekichabi
