#include "air/mock_backend.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "air/random.hpp"
#include "air/text.hpp"

namespace air::modelio {

namespace {

std::vector<std::string> string_or_array(const nlohmann::json& v) {
    if (v.is_string()) return {v.get<std::string>()};
    std::vector<std::string> out;
    for (const auto& item : v) out.push_back(item.get<std::string>());
    return out;
}

bool contains_all(const std::string& haystack, const std::vector<std::string>& needles) {
    for (const auto& n : needles) {
        if (haystack.find(n) == std::string::npos) return false;
    }
    return true;
}

bool contains_none(const std::string& haystack, const std::vector<std::string>& needles) {
    for (const auto& n : needles) {
        if (haystack.find(n) != std::string::npos) return false;
    }
    return true;
}

bool regex_hits(const std::string& haystack, const std::optional<std::string>& pattern) {
    if (!pattern) return true;
    return std::regex_search(haystack, std::regex(*pattern));
}

// Last "double-quoted" span in a string, or the trimmed whole string.
std::string quoted_or_whole(const std::string& s) {
    std::size_t close = s.rfind('"');
    if (close != std::string::npos && close > 0) {
        std::size_t open = s.rfind('"', close - 1);
        if (open != std::string::npos) return s.substr(open + 1, close - open - 1);
    }
    return text::trim(s);
}

}  // namespace

MockScript MockScript::from_json_text(const std::string& json_text) {
    const auto doc = nlohmann::json::parse(json_text);
    MockScript script;
    script.on_no_match = doc.value("on_no_match", std::string("error"));
    if (doc.contains("embedding")) {
        const auto& emb = doc["embedding"];
        script.embedding.dimensions = emb.value("dimensions", 8);
        script.embedding.seed = emb.value("seed", 0ull);
        if (emb.contains("planted")) {
            for (const auto& [k, v] : emb["planted"].items())
                script.embedding.planted[k] = v.get<std::vector<double>>();
        }
    }
    for (const auto& e : doc.value("entries", nlohmann::json::array())) {
        MockScriptEntry entry;
        if (e.contains("role")) entry.role = role_from_name(e["role"].get<std::string>());
        if (e.contains("system_contains")) entry.system_contains = string_or_array(e["system_contains"]);
        if (e.contains("user_contains")) entry.user_contains = string_or_array(e["user_contains"]);
        if (e.contains("system_not_contains"))
            entry.system_not_contains = string_or_array(e["system_not_contains"]);
        if (e.contains("user_not_contains"))
            entry.user_not_contains = string_or_array(e["user_not_contains"]);
        if (e.contains("system_regex")) entry.system_regex = e["system_regex"].get<std::string>();
        if (e.contains("user_regex")) entry.user_regex = e["user_regex"].get<std::string>();
        entry.max_uses = e.value("max_uses", -1);
        entry.fail_times = e.value("fail_times", 0);
        entry.response = e.value("response", std::string());
        entry.behavior = e.value("behavior", std::string());
        entry.default_answer = e.value("default_answer", std::string("unknown"));
        script.entries.push_back(std::move(entry));
    }
    return script;
}

MockScript MockScript::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mock script: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {
    for (const auto& [unused_text, vec] : script_.embedding.planted) {
        if (static_cast<int>(vec.size()) != script_.embedding.dimensions)
            throw std::invalid_argument("planted mock embedding has wrong dimensionality");
    }
}

const MockScriptEntry* MockBackend::match(const ChatRequest& request) {
    for (auto& entry : script_.entries) {
        if (entry.max_uses == 0) continue;
        if (entry.role && *entry.role != request.role) continue;
        if (!contains_all(request.system, entry.system_contains)) continue;
        if (!contains_all(request.user, entry.user_contains)) continue;
        if (!contains_none(request.system, entry.system_not_contains)) continue;
        if (!contains_none(request.user, entry.user_not_contains)) continue;
        if (!regex_hits(request.system, entry.system_regex)) continue;
        if (!regex_hits(request.user, entry.user_regex)) continue;
        if (entry.fail_times > 0) {
            --entry.fail_times;
            throw BackendError("mock backend: scripted failure", /*retryable=*/true);
        }
        if (entry.max_uses > 0) --entry.max_uses;
        return &entry;
    }
    return nullptr;
}

std::string MockBackend::run_behavior(const MockScriptEntry& entry,
                                      const ChatRequest& request) const {
    if (entry.behavior.empty()) return entry.response;
    if (entry.behavior == "echo_user") return request.user;
    if (entry.behavior == "apply_rules")
        return apply_rules_completion(request.system, request.user, entry.default_answer);
    throw std::invalid_argument("unknown mock behavior: " + entry.behavior);
}

BackendReply MockBackend::chat(const std::string& /*model*/, const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    const MockScriptEntry* entry = match(request);
    std::string content;
    if (entry) {
        content = run_behavior(*entry, request);
    } else if (script_.on_no_match == "echo") {
        content = request.user;
    } else {
        throw BackendError("mock backend: no script entry matches " +
                               std::string(role_name(request.role)) + " call",
                           /*retryable=*/false);
    }

    BackendReply reply;
    reply.content = content;
    reply.input_tokens = text::word_count(request.system) + text::word_count(request.user);
    reply.output_tokens = text::word_count(content);
    log_.push_back({request.role, request.system, request.user, content, reply.input_tokens,
                    reply.output_tokens});
    return reply;
}

BackendEmbedReply MockBackend::embed(const std::string& /*model*/,
                                     const std::vector<std::string>& texts) {
    std::lock_guard lock(mutex_);
    BackendEmbedReply reply;
    reply.vectors.reserve(texts.size());
    for (const auto& t : texts) {
        auto it = script_.embedding.planted.find(t);
        if (it != script_.embedding.planted.end()) {
            reply.vectors.push_back(it->second);
        } else {
            reply.vectors.push_back(
                seeded_vector(t, script_.embedding.dimensions, script_.embedding.seed));
        }
        reply.input_tokens += text::word_count(t);
    }
    log_.push_back({ModelRole::embed, "", "", "<" + std::to_string(texts.size()) + " embeddings>",
                    reply.input_tokens, 0});
    return reply;
}

std::vector<MockBackend::CallRecord> MockBackend::call_log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::vector<double> MockBackend::seeded_vector(const std::string& text_in, int dimensions,
                                               std::uint64_t seed) {
    rng::Rng r(rng::derive_seed(seed, text::fnv1a64(text_in)));
    std::vector<double> v(dimensions);
    double norm_sq = 0;
    for (auto& x : v) {
        x = r.next_normal();
        norm_sq += x * x;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > 0) {
        for (auto& x : v) x /= norm;
    } else {
        v[0] = 1.0;
    }
    return v;
}

std::string apply_rules_completion(const std::string& system, const std::string& user,
                                   const std::string& default_answer) {
    static const std::regex rule_line(R"(^\s*(R\d+)[.:]\s*IF\s+(.*?)\s+THEN\s+(.*?)\s*$)",
                                      std::regex::icase);
    std::vector<std::string> applied_ids;
    std::string answer;
    for (const auto& line : text::split_lines(system)) {
        std::smatch m;
        if (!std::regex_match(line, m, rule_line)) continue;
        const std::string keyword = quoted_or_whole(m[2].str());
        if (keyword.empty() || user.find(keyword) == std::string::npos) continue;
        applied_ids.push_back(m[1].str());
        if (answer.empty()) answer = quoted_or_whole(m[3].str());
    }
    if (answer.empty()) answer = default_answer;

    const bool traced = system.find("RULES:") != std::string::npos;
    if (!traced) return answer;
    const std::string ids = applied_ids.empty() ? "NONE" : text::join(applied_ids, ",");
    return "RULES: " + ids + "\nANSWER: " + answer;
}

}  // namespace air::modelio
