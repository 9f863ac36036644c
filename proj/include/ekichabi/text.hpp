#pragma once

/// @file ekichabi/text.hpp
/// @brief UTF-8 helpers and the tokenizer shared by search and rendering.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ekichabi {

/// Number of Unicode code points in a UTF-8 string. Invalid lead bytes count
/// as one character each.
std::size_t char_count(std::string_view utf8);

/// Splits a UTF-8 string into code points.
std::u32string decode_utf8(std::string_view utf8);

/// Truncates to at most `max_chars` code points; longer strings keep
/// `max_chars - 1` characters followed by "…" when `ellipsis` is set.
std::string truncate_chars(std::string_view utf8, std::size_t max_chars,
                           bool ellipsis = true);

/// Cuts to at most `max_bytes` bytes without splitting a UTF-8 sequence.
std::string truncate_bytes(std::string_view utf8, std::size_t max_bytes);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

/// Lowercases, trims and collapses runs of whitespace to one space.
std::string normalize_phrase(std::string_view s);

/// Lowercase tokens split on ASCII whitespace and punctuation. Bytes >= 0x80
/// are kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view s);

/// Case-insensitive ASCII ordering with bytewise tie-break.
bool label_less(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace ekichabi
