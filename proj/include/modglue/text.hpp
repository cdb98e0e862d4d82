#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the plan, key-file and DOT writers.
namespace modglue::text {

/// `[a-z_][a-z0-9_]*`
bool is_identifier(std::string_view s);

/// Escapes backslash, tab, newline, carriage return and comma so a field
/// can sit inside a tab-separated, comma-listed record.
std::string escape(std::string_view s);
std::string unescape(std::string_view s);

/// Splits on `sep` occurrences that are not preceded by an escape.
/// Items are returned still escaped.
std::vector<std::string> split_escaped(std::string_view s, char sep);

std::string join_escaped(const std::vector<std::string>& items, char sep);

/// Quotes for DOT labels and glue string literals.
std::string quote(std::string_view s);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace modglue::text
