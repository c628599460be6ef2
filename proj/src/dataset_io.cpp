#include "air/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace air::corpus {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Splits CSV content into rows of cells, honoring quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool cell_started = false;

    auto end_cell = [&]() {
        row.push_back(std::move(cell));
        cell.clear();
        cell_started = false;
    };
    auto end_row = [&]() {
        end_cell();
        // Skip rows that are entirely empty (e.g. trailing newline).
        if (row.size() > 1 || !row[0].empty()) rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"' && !cell_started) {
            quoted = true;
            cell_started = true;
        } else if (c == ',') {
            end_cell();
        } else if (c == '\n') {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            end_row();
        } else {
            cell.push_back(c);
            cell_started = true;
        }
    }
    if (!cell.empty() || !row.empty()) end_row();
    return rows;
}

}  // namespace

std::vector<RawRecord> load_csv(const std::filesystem::path& path) {
    const auto rows = parse_csv(read_file(path));
    if (rows.empty()) throw std::runtime_error("CSV has no header row: " + path.string());
    const auto& header = rows.front();

    std::vector<RawRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw std::runtime_error("CSV row " + std::to_string(r) + " has " +
                                     std::to_string(rows[r].size()) + " cells, expected " +
                                     std::to_string(header.size()) + ": " + path.string());
        }
        RawRecord rec;
        for (std::size_t c = 0; c < header.size(); ++c) rec[header[c]] = rows[r][c];
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RawRecord> load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());

    std::vector<RawRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("bad JSON at " + path.string() + ":" +
                                     std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object()) {
            throw std::runtime_error("expected JSON object at " + path.string() + ":" +
                                     std::to_string(line_no));
        }
        RawRecord rec;
        for (const auto& [key, value] : obj.items()) {
            if (value.is_string()) {
                rec[key] = value.get<std::string>();
            } else {
                rec[key] = value.dump();
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RawRecord> load_records(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return load_csv(path);
    if (ext == ".jsonl" || ext == ".ndjson") return load_jsonl(path);
    throw std::runtime_error("unsupported dataset format (want .csv or .jsonl): " + path.string());
}

void write_id_manifest(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    for (const auto& ex : dataset.examples) {
        nlohmann::json line = {{"id", ex.id}};
        out << line.dump() << "\n";
    }
}

std::vector<std::string> read_id_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ids.push_back(nlohmann::json::parse(line).at("id").get<std::string>());
    }
    return ids;
}

}  // namespace air::corpus
