#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "air/corpus.hpp"

namespace air::corpus {

// RFC 4180 style: header row, quoted fields, doubled quotes, newlines allowed
// inside quotes.
std::vector<RawRecord> load_csv(const std::filesystem::path& path);

// One flat JSON object per line; values are strings (numbers/bools are
// stringified).
std::vector<RawRecord> load_jsonl(const std::filesystem::path& path);

// Dispatches on extension: .csv or .jsonl/.ndjson.
std::vector<RawRecord> load_records(const std::filesystem::path& path);

// One {"id": ...} object per line.
void write_id_manifest(const std::filesystem::path& path, const Dataset& dataset);
std::vector<std::string> read_id_manifest(const std::filesystem::path& path);

}  // namespace air::corpus
