#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace ekichabi {

/// Screen text by key. Built-in defaults are Swahili where the deployed
/// service's wording is known and English otherwise; a key=value file
/// (UTF-8, '#' comments, "\n" escapes) overrides individual keys.
class Strings {
 public:
  Strings();

  static const Strings& defaults();

  /// Throws std::runtime_error if the file cannot be read or a line is not
  /// key=value.
  static Strings from_file(const std::filesystem::path& path);
  void merge(std::string_view text);

  /// Throws std::out_of_range for an unknown key.
  const std::string& get(std::string_view key) const;
  std::string_view operator[](std::string_view key) const { return get(key); }

  const std::map<std::string, std::string, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace ekichabi
