#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "air/modelio.hpp"

namespace air::modelio {

// Disk-backed embedding cache keyed by (model name, exact text). Reads take a
// shared lock; writes are exclusive and append straight to the backing file.
class EmbeddingCache {
public:
    EmbeddingCache() = default;  // in-memory only
    explicit EmbeddingCache(std::filesystem::path file);

    std::optional<std::vector<double>> get(const std::string& model, const std::string& text) const;
    void put(const std::string& model, const std::string& text, const std::vector<double>& vector);
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::vector<double>> entries_;
    std::filesystem::path file_;
};

struct RetryPolicy {
    int attempts = 3;
    int base_delay_ms = 200;  // doubled per retry
};

struct RoleEndpoint {
    std::shared_ptr<Backend> backend;
    std::string model;
};

struct ClientConfig {
    std::map<ModelRole, RoleEndpoint> endpoints;
    RetryPolicy retry;
    int max_in_flight = 4;
    bool cache_embeddings = true;
    std::filesystem::path cache_file;  // empty: in-memory cache only
};

// Bounds the number of concurrent backend calls.
class InflightGate {
public:
    explicit InflightGate(int limit) : available_(limit) {}
    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
    }
    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

// Uniform front door for every model call. Owns the usage ledger, the retry
// loop, the embedding cache and the in-flight bound; safe for concurrent use.
class Client {
public:
    explicit Client(ClientConfig config);

    // Completion under request.role. Empty completions raise
    // EmptyCompletionError; transport failures exhaust the retry budget and
    // raise CallError with the attempt count.
    ChatResult chat(const ChatRequest& request);

    // One vector per text, uniform dimensionality per run. Cache hits bypass
    // the backend and record zero usage.
    EmbedResult embed(const std::vector<std::string>& texts);

    void set_phase(Phase phase) { phase_ = phase; }
    Phase phase() const { return phase_; }

    const UsageLedger& ledger() const { return ledger_; }
    UsageReport usage_report() const { return ledger_.report(); }

    int max_in_flight() const { return config_.max_in_flight; }

private:
    const RoleEndpoint& endpoint(ModelRole role) const;
    std::string describe(ModelRole role) const;

    ClientConfig config_;
    std::unique_ptr<EmbeddingCache> cache_;
    UsageLedger ledger_;
    std::atomic<Phase> phase_ = Phase::train;
    std::atomic<int> embed_dimensions_ = 0;  // 0 until the first embedding arrives
    InflightGate gate_;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads and returns results
// in index order; the first exception is rethrown after join.
template <typename Result>
std::vector<Result> parallel_map(std::size_t n, int workers,
                                 const std::function<Result(std::size_t)>& fn) {
    std::vector<Result> results(n);
    if (n == 0) return results;
    const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (thread_count == 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) {
        threads.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    results[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace air::modelio
