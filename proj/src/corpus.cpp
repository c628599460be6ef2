#include "air/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "air/random.hpp"
#include "air/text.hpp"

namespace air::corpus {

const char* metric_kind_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::exact_match: return "exact_match";
        case MetricKind::mean_per_field: return "mean_per_field";
        case MetricKind::entity_f1: return "entity_f1";
        case MetricKind::judge_rubric: return "judge_rubric";
    }
    return "exact_match";
}

MetricKind metric_kind_from_name(const std::string& name) {
    if (name == "exact_match") return MetricKind::exact_match;
    if (name == "mean_per_field") return MetricKind::mean_per_field;
    if (name == "entity_f1") return MetricKind::entity_f1;
    if (name == "judge_rubric") return MetricKind::judge_rubric;
    throw std::invalid_argument("unknown metric_kind: " + name);
}

namespace {

std::string ordinal_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", index);
    return buf;
}

std::string join_columns(const RawRecord& record, const std::vector<std::string>& columns,
                         const std::string& joiner, std::size_t record_index) {
    std::vector<std::string> parts;
    parts.reserve(columns.size());
    for (const auto& col : columns) {
        auto it = record.find(col);
        if (it == record.end()) {
            throw std::invalid_argument("standardize: record " + std::to_string(record_index) +
                                        " is missing column \"" + col + "\"");
        }
        parts.push_back(it->second);
    }
    return text::join(parts, joiner);
}

}  // namespace

Dataset standardize(const std::vector<RawRecord>& raw_records, const ColumnMap& column_map,
                    std::string task_description, MetricKind metric_kind) {
    if (raw_records.empty()) throw std::invalid_argument("standardize: no records");
    if (column_map.input_columns.empty() || column_map.output_columns.empty())
        throw std::invalid_argument("standardize: column map must name input and output columns");

    Dataset ds;
    ds.task_description = std::move(task_description);
    ds.metric_kind = metric_kind;
    ds.examples.reserve(raw_records.size());

    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 0; i < raw_records.size(); ++i) {
        const auto& rec = raw_records[i];
        Example ex;
        auto id_it = rec.find("id");
        ex.id = (id_it != rec.end() && !id_it->second.empty()) ? id_it->second : ordinal_id(i);
        ex.input = join_columns(rec, column_map.input_columns, column_map.input_joiner, i);
        ex.output = join_columns(rec, column_map.output_columns, column_map.output_joiner, i);
        if (text::trim(ex.input).empty())
            throw std::invalid_argument("standardize: record " + std::to_string(i) +
                                        " produced empty input text");
        if (text::trim(ex.output).empty())
            throw std::invalid_argument("standardize: record " + std::to_string(i) +
                                        " produced empty output text");
        if (!seen_ids.insert(ex.id).second)
            throw std::invalid_argument("standardize: duplicate example id \"" + ex.id + "\"");
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

Split split(const Dataset& dataset, const SplitCounts& counts, std::uint64_t seed) {
    const std::size_t total = counts.train + counts.dev + counts.test;
    if (total != dataset.size()) {
        throw std::invalid_argument("split: counts sum to " + std::to_string(total) +
                                    " but dataset has " + std::to_string(dataset.size()) +
                                    " examples");
    }

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng::Rng r(seed);
    r.shuffle(order);

    auto take = [&](std::size_t begin, std::size_t count) {
        Dataset part;
        part.task_description = dataset.task_description;
        part.metric_kind = dataset.metric_kind;
        part.examples.reserve(count);
        for (std::size_t i = begin; i < begin + count; ++i)
            part.examples.push_back(dataset.examples[order[i]]);
        return part;
    };

    Split s;
    s.train = take(0, counts.train);
    s.dev = take(counts.train, counts.dev);
    s.test = take(counts.train + counts.dev, counts.test);
    return s;
}

double exact_match(const std::string& prediction, const std::string& gold) {
    return text::normalize(prediction) == text::normalize(gold) ? 1.0 : 0.0;
}

double mean_per_field(const std::map<std::string, std::string>& prediction_fields,
                      const std::map<std::string, std::string>& gold_fields) {
    if (gold_fields.empty()) throw std::invalid_argument("mean_per_field: gold fields empty");
    double sum = 0;
    for (const auto& [name, gold_value] : gold_fields) {
        auto it = prediction_fields.find(name);
        if (it != prediction_fields.end()) sum += exact_match(it->second, gold_value);
    }
    return sum / static_cast<double>(gold_fields.size());
}

double entity_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
    if (predicted.empty() && gold.empty()) return 1.0;
    if (predicted.empty() || gold.empty()) return 0.0;

    std::unordered_map<std::string, int> gold_counts;
    for (const auto& g : gold) ++gold_counts[text::normalize(g)];

    int matches = 0;
    for (const auto& p : predicted) {
        auto it = gold_counts.find(text::normalize(p));
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++matches;
        }
    }
    if (matches == 0) return 0.0;
    const double precision = static_cast<double>(matches) / static_cast<double>(predicted.size());
    const double recall = static_cast<double>(matches) / static_cast<double>(gold.size());
    return 2.0 * precision * recall / (precision + recall);
}

namespace {
bool valid_subscore(double v) { return v == 0.0 || v == 0.5 || v == 1.0; }
}  // namespace

RubricScore judge_rubric(double correctness, double completeness, double no_hallucination,
                         double focus) {
    for (double v : {correctness, completeness, no_hallucination, focus}) {
        if (!valid_subscore(v))
            throw std::invalid_argument("judge_rubric: subscore must be 0, 0.5 or 1");
    }
    RubricScore s;
    s.correctness = correctness;
    s.completeness = completeness;
    s.no_hallucination = no_hallucination;
    s.focus = focus;
    s.total = (correctness + completeness + no_hallucination + focus) / 4.0;
    return s;
}

std::map<std::string, std::string> parse_fields(const std::string& text_in) {
    std::map<std::string, std::string> fields;
    std::string block_key;
    std::vector<std::string> block_lines;

    auto flush_block = [&]() {
        if (block_key.empty()) return;
        while (!block_lines.empty() && block_lines.back().empty()) block_lines.pop_back();
        fields[block_key] = text::join(block_lines, "\n");
        block_key.clear();
        block_lines.clear();
    };

    for (const auto& raw_line : text::split_lines(text_in)) {
        const std::string line = text::trim(raw_line);
        const std::size_t colon = line.find(':');
        if (colon != std::string::npos && colon > 0) {
            const std::string key = text::normalize(line.substr(0, colon));
            // Keys are single identifiers or short phrases; a colon deep in a
            // sentence is treated as content, not a field label.
            if (!key.empty() && key.size() <= 64) {
                flush_block();
                const std::string value = text::trim(line.substr(colon + 1));
                if (value.empty()) {
                    block_key = key;  // labeled block: value on following lines
                } else {
                    fields[key] = value;
                }
                continue;
            }
        }
        if (!block_key.empty()) block_lines.push_back(line);
    }
    flush_block();
    return fields;
}

std::vector<std::string> parse_entities(const std::string& text_in) {
    return text::split_items(text_in, "\n;");
}

std::optional<RubricScore> parse_judge_scores(const std::string& completion) {
    auto find_score = [&](std::initializer_list<const char*> labels) -> std::optional<double> {
        for (const auto& raw_line : text::split_lines(completion)) {
            const std::string line = text::to_lower(text::trim(raw_line));
            for (const char* label : labels) {
                if (!text::starts_with_icase(line, label)) continue;
                std::string rest = line.substr(std::string(label).size());
                const std::size_t sep = rest.find_first_of(":=");
                if (sep == std::string::npos) continue;
                rest = text::trim(rest.substr(sep + 1));
                if (rest == "0" || rest == "0.0") return 0.0;
                if (rest == "0.5") return 0.5;
                if (rest == "1" || rest == "1.0") return 1.0;
                return std::nullopt;  // labeled but out of range
            }
        }
        return std::nullopt;
    };

    auto correctness = find_score({"correctness"});
    auto completeness = find_score({"completeness"});
    auto no_hallucination = find_score({"no_hallucination", "no hallucination",
                                        "absence of hallucination", "hallucination"});
    auto focus = find_score({"focus"});
    if (!correctness || !completeness || !no_hallucination || !focus) return std::nullopt;
    return judge_rubric(*correctness, *completeness, *no_hallucination, *focus);
}

}  // namespace air::corpus
