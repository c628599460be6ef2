#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "air/modelio.hpp"

namespace air::modelio {

// One scripted response. The first entry whose matchers all hold serves the
// call. `max_uses` makes an entry expire after N serves, which lets a script
// stage different answers for successive calls with the same prompt shape.
// `fail_times` throws a retryable backend error for the first N matches
// (simulated 5xx).
struct MockScriptEntry {
    std::optional<ModelRole> role;
    std::vector<std::string> system_contains;
    std::vector<std::string> user_contains;
    std::vector<std::string> system_not_contains;
    std::vector<std::string> user_not_contains;
    std::optional<std::string> system_regex;
    std::optional<std::string> user_regex;
    int max_uses = -1;   // -1: unlimited
    int fail_times = 0;
    std::string response;
    std::string behavior;  // "" (literal response), "apply_rules", "echo_user"
    std::string default_answer = "unknown";
};

struct MockEmbeddingConfig {
    int dimensions = 8;
    std::uint64_t seed = 0;
    // Exact-text overrides, for tests that need planted geometry.
    std::map<std::string, std::vector<double>> planted;
};

struct MockScript {
    std::vector<MockScriptEntry> entries;
    std::string on_no_match = "error";  // or "echo"
    MockEmbeddingConfig embedding;

    static MockScript from_json_text(const std::string& json_text);
    static MockScript from_file(const std::filesystem::path& path);
};

// Deterministic in-process backend. Chat responses come from the script;
// embeddings are seeded unit vectors that depend only on the text (plus any
// planted vectors). Token counts are whitespace word counts, so repeated runs
// produce identical ledgers.
class MockBackend : public Backend {
public:
    explicit MockBackend(MockScript script);

    BackendReply chat(const std::string& model, const ChatRequest& request) override;
    BackendEmbedReply embed(const std::string& model,
                            const std::vector<std::string>& texts) override;

    // Test hook: every served call in order, for ledger-exactness checks.
    struct CallRecord {
        ModelRole role;
        std::string system, user, content;
        long long input_tokens = 0, output_tokens = 0;
    };
    std::vector<CallRecord> call_log() const;

    // The deterministic vector the mock would produce for `text` (ignoring
    // planted overrides); exposed so tests can precompute geometry.
    static std::vector<double> seeded_vector(const std::string& text, int dimensions,
                                             std::uint64_t seed);

private:
    const MockScriptEntry* match(const ChatRequest& request);
    std::string run_behavior(const MockScriptEntry& entry, const ChatRequest& request) const;

    MockScript script_;
    mutable std::mutex mutex_;
    std::vector<CallRecord> log_;
};

// Renders a completion for a rule-following chat: parses "R<k>. IF ... THEN ..."
// lines out of the system prompt, answers with the action of the first rule
// whose quoted condition keyword appears in the user text, and emits the
// RULES/ANSWER trace when the system prompt demands one. Exposed for direct
// unit testing.
std::string apply_rules_completion(const std::string& system, const std::string& user,
                                   const std::string& default_answer);

}  // namespace air::modelio
