#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace air::corpus {

enum class MetricKind { exact_match, mean_per_field, entity_f1, judge_rubric };

const char* metric_kind_name(MetricKind kind);
MetricKind metric_kind_from_name(const std::string& name);

// One supervised case: canonical input/output text plus optional embeddings
// and the output-group id assigned during clustering.
struct Example {
    std::string id;
    std::string input;
    std::string output;
    std::optional<std::vector<double>> input_embedding;
    std::optional<std::vector<double>> output_embedding;
    std::optional<int> group_id;
};

struct Dataset {
    std::vector<Example> examples;
    std::string task_description;
    MetricKind metric_kind = MetricKind::exact_match;

    std::size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

struct Split {
    Dataset train;
    Dataset dev;
    Dataset test;
};

struct RubricScore {
    double correctness = 0;
    double completeness = 0;
    double no_hallucination = 0;
    double focus = 0;
    double total = 0;
};

// A raw record is one row of the source file: field name -> text.
using RawRecord = std::map<std::string, std::string>;

struct ColumnMap {
    std::vector<std::string> input_columns;
    std::vector<std::string> output_columns;
    std::string input_joiner = "\n";
    std::string output_joiner = "\n";
};

struct SplitCounts {
    std::size_t train = 0;
    std::size_t dev = 0;
    std::size_t test = 0;
};

// Joins the mapped columns of each record into canonical input/output text.
// Records missing a mapped column are rejected with the record index and the
// column name; empty joined text is rejected as well. Records without an "id"
// field get zero-padded ordinal ids.
Dataset standardize(const std::vector<RawRecord>& raw_records, const ColumnMap& column_map,
                    std::string task_description, MetricKind metric_kind);

// Seeded shuffle followed by contiguous train/dev/test partition. The counts
// must sum to the dataset size. Identical inputs and seed give an identical
// split.
Split split(const Dataset& dataset, const SplitCounts& counts, std::uint64_t seed);

// ---- Metrics. All results are in [0, 1]. ----

// 1 iff both sides are equal after trim / whitespace-collapse / casefold.
double exact_match(const std::string& prediction, const std::string& gold);

// Mean of exact_match over the gold field names; a field missing from the
// prediction scores 0.
double mean_per_field(const std::map<std::string, std::string>& prediction_fields,
                      const std::map<std::string, std::string>& gold_fields);

// Entity-level exact-match F1 over normalized multisets. Both empty -> 1;
// exactly one empty -> 0.
double entity_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

// Validates that each subscore is one of {0, 0.5, 1} and averages them.
RubricScore judge_rubric(double correctness, double completeness, double no_hallucination,
                         double focus);

// ---- Output-format helpers (the wire formats the metrics consume). ----

// Parses "name: value" lines into a field map (keys casefolded). A line that
// is just "name:" starts a labeled block: subsequent lines up to the next
// labeled line become that field's value.
std::map<std::string, std::string> parse_fields(const std::string& text);

// Entity list items separated by newlines or semicolons.
std::vector<std::string> parse_entities(const std::string& text);

// Extracts the four rubric subscores from judge output ("correctness: 1" ...).
// Returns nullopt if any of the four labels is missing or carries a value
// outside {0, 0.5, 1}.
std::optional<RubricScore> parse_judge_scores(const std::string& completion);

}  // namespace air::corpus
