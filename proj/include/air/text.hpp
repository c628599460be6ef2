#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace air::text {

// Strips leading/trailing ASCII whitespace.
std::string trim(std::string_view s);

// Lowercases ASCII and collapses every internal whitespace run to a single
// space; outer whitespace is removed. This is the normal form used by the
// string-equality metrics and by discrete output-group detection.
std::string normalize(std::string_view s);

// Replaces newlines (and surrounding whitespace runs) with single spaces so
// multi-line rule text renders as one logical line.
std::string fold_to_line(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

// Splits on any of the given delimiter characters, trims each piece and
// drops empties.
std::vector<std::string> split_items(std::string_view s, std::string_view delims);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_icase(std::string_view s, std::string_view prefix);

std::string to_lower(std::string_view s);

// FNV-1a, stable across platforms (std::hash is not).
std::uint64_t fnv1a64(std::string_view s);

// Count of whitespace-separated words; the mock backend's token measure.
int word_count(std::string_view s);

}  // namespace air::text
