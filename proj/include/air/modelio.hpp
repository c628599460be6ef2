#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace air::modelio {

enum class ModelRole { embed, base, reflection, judge };
enum class Phase { train, inference };

constexpr std::array<ModelRole, 4> kAllRoles = {ModelRole::embed, ModelRole::base,
                                                ModelRole::reflection, ModelRole::judge};
constexpr std::array<Phase, 2> kAllPhases = {Phase::train, Phase::inference};

const char* role_name(ModelRole role);
ModelRole role_from_name(const std::string& name);
const char* phase_name(Phase phase);

struct ChatRequest {
    std::string system;
    std::string user;
    ModelRole role = ModelRole::base;
    double temperature = 0.0;
    int max_output = 2048;
};

struct Usage {
    long long input_tokens = 0;
    long long output_tokens = 0;
    ModelRole role = ModelRole::base;
};

struct ChatResult {
    std::string content;
    Usage usage;
};

struct EmbedResult {
    std::vector<std::vector<double>> vectors;
    Usage usage;
};

// A model call that failed after its retry budget.
class CallError : public std::runtime_error {
public:
    CallError(const std::string& what, int attempts_made)
        : std::runtime_error(what), attempts(attempts_made) {}
    int attempts = 0;
};

// The backend answered but the completion text was empty.
class EmptyCompletionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by backends for individual call failures; the client decides whether
// to retry based on `retryable` (transport errors, 5xx, 429).
class BackendError : public std::runtime_error {
public:
    BackendError(const std::string& what, bool retryable_)
        : std::runtime_error(what), retryable(retryable_) {}
    bool retryable = false;
};

struct BackendReply {
    std::string content;
    long long input_tokens = 0;
    long long output_tokens = 0;
};

struct BackendEmbedReply {
    std::vector<std::vector<double>> vectors;
    long long input_tokens = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendReply chat(const std::string& model, const ChatRequest& request) = 0;
    virtual BackendEmbedReply embed(const std::string& model,
                                    const std::vector<std::string>& texts) = 0;
};

struct UsageRow {
    Phase phase = Phase::train;
    ModelRole role = ModelRole::embed;
    long long input_tokens = 0;
    long long output_tokens = 0;
};

// Phase x role table of (input, output) totals. Rows come back in stable
// order (train then inference; embed, base, reflection, judge) and include
// zero rows for unused roles.
struct UsageReport {
    std::vector<UsageRow> rows;

    const UsageRow& at(Phase phase, ModelRole role) const;
    long long total_input() const;
    long long total_output() const;
};

// Shared tally of per-call usages, partitioned by phase and role.
class UsageLedger {
public:
    void record(Phase phase, const Usage& usage);
    UsageReport report() const;

private:
    mutable std::mutex mutex_;
    long long input_[2][4] = {};
    long long output_[2][4] = {};
};

}  // namespace air::modelio
