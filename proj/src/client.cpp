#include "air/client.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "air/text.hpp"

namespace air::modelio {

namespace {
std::string cache_key(const std::string& model, const std::string& text) {
    return model + '\x1f' + text;
}
}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path file) : file_(std::move(file)) {
    std::ifstream in(file_);
    if (!in) return;  // fresh cache
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            auto obj = nlohmann::json::parse(line);
            entries_[cache_key(obj.at("model"), obj.at("text"))] =
                obj.at("vector").get<std::vector<double>>();
        } catch (const nlohmann::json::exception&) {
            // Ignore truncated trailing lines from an interrupted run.
        }
    }
}

std::optional<std::vector<double>> EmbeddingCache::get(const std::string& model,
                                                       const std::string& text) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(cache_key(model, text));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::put(const std::string& model, const std::string& text,
                         const std::vector<double>& vector) {
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.emplace(cache_key(model, text), vector);
    if (!inserted || file_.empty()) return;
    std::ofstream out(file_, std::ios::app | std::ios::binary);
    if (!out) return;  // cache persistence is best-effort
    nlohmann::json obj = {{"model", model}, {"text", text}, {"vector", vector}};
    out << obj.dump() << "\n";
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

Client::Client(ClientConfig config)
    : config_(std::move(config)), gate_(std::max(1, config_.max_in_flight)) {
    if (config_.cache_embeddings) {
        cache_ = config_.cache_file.empty()
                     ? std::make_unique<EmbeddingCache>()
                     : std::make_unique<EmbeddingCache>(config_.cache_file);
    }
}

const RoleEndpoint& Client::endpoint(ModelRole role) const {
    auto it = config_.endpoints.find(role);
    if (it == config_.endpoints.end() || !it->second.backend)
        throw std::invalid_argument(std::string("no endpoint configured for role ") +
                                    role_name(role));
    return it->second;
}

std::string Client::describe(ModelRole role) const { return role_name(role); }

namespace {

// Retries retryable backend errors with exponential backoff; rethrows the
// final failure as CallError carrying the attempt count.
template <typename Fn>
auto call_with_retries(const RetryPolicy& policy, const std::string& what, Fn&& fn)
    -> decltype(fn()) {
    int delay_ms = policy.base_delay_ms;
    for (int attempt = 1;; ++attempt) {
        try {
            return fn();
        } catch (const BackendError& e) {
            if (!e.retryable || attempt >= policy.attempts)
                throw CallError(what + " failed after " + std::to_string(attempt) +
                                    " attempt(s): " + e.what(),
                                attempt);
            if (delay_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            delay_ms *= 2;
        }
    }
}

}  // namespace

ChatResult Client::chat(const ChatRequest& request) {
    if (request.system.empty() && request.user.empty())
        throw std::invalid_argument("chat: system and user are both empty");
    if (request.temperature < 0) throw std::invalid_argument("chat: negative temperature");
    if (request.max_output <= 0) throw std::invalid_argument("chat: max_output must be positive");

    const auto& ep = endpoint(request.role);
    BackendReply reply = call_with_retries(config_.retry, describe(request.role) + " chat", [&] {
        InflightGate* gate = &gate_;
        gate->acquire();
        struct Release {
            InflightGate* g;
            ~Release() { g->release(); }
        } release{gate};
        return ep.backend->chat(ep.model, request);
    });

    if (text::trim(reply.content).empty())
        throw EmptyCompletionError(describe(request.role) + " chat returned an empty completion");

    ChatResult result;
    result.content = std::move(reply.content);
    result.usage = {reply.input_tokens, reply.output_tokens, request.role};
    ledger_.record(phase_, result.usage);
    return result;
}

EmbedResult Client::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw std::invalid_argument("embed: no texts");
    for (const auto& t : texts)
        if (t.empty()) throw std::invalid_argument("embed: empty text");

    const auto& ep = endpoint(ModelRole::embed);

    EmbedResult result;
    result.vectors.resize(texts.size());
    result.usage.role = ModelRole::embed;

    std::vector<std::size_t> misses;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (cache_) {
            if (auto hit = cache_->get(ep.model, texts[i])) {
                result.vectors[i] = std::move(*hit);
                continue;
            }
        }
        misses.push_back(i);
    }

    if (!misses.empty()) {
        std::vector<std::string> miss_texts;
        miss_texts.reserve(misses.size());
        for (auto i : misses) miss_texts.push_back(texts[i]);

        BackendEmbedReply reply = call_with_retries(config_.retry, "embed", [&] {
            InflightGate* gate = &gate_;
            gate->acquire();
            struct Release {
                InflightGate* g;
                ~Release() { g->release(); }
            } release{gate};
            return ep.backend->embed(ep.model, miss_texts);
        });
        if (reply.vectors.size() != miss_texts.size())
            throw std::runtime_error("embed: backend returned wrong vector count");

        for (std::size_t k = 0; k < misses.size(); ++k) {
            result.vectors[misses[k]] = std::move(reply.vectors[k]);
            if (cache_) cache_->put(ep.model, miss_texts[k], result.vectors[misses[k]]);
        }
        result.usage.input_tokens = reply.input_tokens;
        ledger_.record(phase_, result.usage);
    }

    // All vectors in a run must share one dimensionality, whether they came
    // from the backend or the cache.
    for (const auto& v : result.vectors) {
        if (v.empty()) throw std::runtime_error("embed: backend returned an empty vector");
        int expected = embed_dimensions_.load();
        const int dim = static_cast<int>(v.size());
        if (expected == 0) {
            embed_dimensions_.compare_exchange_strong(expected, dim);
            expected = embed_dimensions_.load();
        }
        if (dim != expected)
            throw std::runtime_error("embed: dimension drift (" + std::to_string(dim) + " vs " +
                                     std::to_string(expected) + ")");
    }
    return result;
}

}  // namespace air::modelio
