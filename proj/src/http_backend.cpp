#ifdef AIR_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include "air/http_backend.hpp"

#include <httplib.h>
#include <json.hpp>

namespace air::modelio {

struct HttpBackend::Impl {
    std::unique_ptr<httplib::Client> client;
    std::string path_prefix;
    std::string api_key;
};

namespace {

// Splits "scheme://host[:port][/prefix]" into the httplib origin and the
// path prefix.
std::pair<std::string, std::string> split_origin(const std::string& base_url) {
    std::size_t scheme_end = base_url.find("://");
    std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    std::size_t path_begin = base_url.find('/', host_begin);
    if (path_begin == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_begin);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_begin), prefix};
}

httplib::Headers make_headers(const std::string& api_key) {
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    return headers;
}

nlohmann::json post_json(HttpBackend::Impl& impl, const std::string& path,
                         const nlohmann::json& body) {
    auto res = impl.client->Post(impl.path_prefix + path, make_headers(impl.api_key),
                                 body.dump(), "application/json");
    if (!res) {
        throw BackendError("transport error calling " + path + ": " +
                               httplib::to_string(res.error()),
                           /*retryable=*/true);
    }
    if (res->status == 429 || res->status >= 500) {
        throw BackendError("HTTP " + std::to_string(res->status) + " from " + path,
                           /*retryable=*/true);
    }
    if (res->status < 200 || res->status >= 300) {
        throw BackendError("HTTP " + std::to_string(res->status) + " from " + path + ": " +
                               res->body,
                           /*retryable=*/false);
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("bad JSON from ") + path + ": " + e.what(),
                           /*retryable=*/false);
    }
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url, std::string api_key, int timeout_seconds)
    : impl_(std::make_unique<Impl>()) {
    auto [origin, prefix] = split_origin(base_url);
#ifndef AIR_WITH_TLS
    if (origin.rfind("https://", 0) == 0)
        throw std::invalid_argument("built without TLS support; use an http:// endpoint");
#endif
    impl_->client = std::make_unique<httplib::Client>(origin);
    impl_->client->set_connection_timeout(timeout_seconds);
    impl_->client->set_read_timeout(timeout_seconds);
    impl_->path_prefix = prefix;
    impl_->api_key = std::move(api_key);
}

HttpBackend::~HttpBackend() = default;

BackendReply HttpBackend::chat(const std::string& model, const ChatRequest& request) {
    nlohmann::json body = {
        {"model", model},
        {"messages",
         {{{"role", "system"}, {"content", request.system}},
          {{"role", "user"}, {"content", request.user}}}},
        {"temperature", request.temperature},
        {"max_tokens", request.max_output},
    };
    const auto doc = post_json(*impl_, "/v1/chat/completions", body);

    BackendReply reply;
    try {
        reply.content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (doc.contains("usage")) {
            reply.input_tokens = doc["usage"].value("prompt_tokens", 0ll);
            reply.output_tokens = doc["usage"].value("completion_tokens", 0ll);
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unexpected chat completion shape: ") + e.what(),
                           /*retryable=*/false);
    }
    return reply;
}

BackendEmbedReply HttpBackend::embed(const std::string& model,
                                     const std::vector<std::string>& texts) {
    nlohmann::json body = {{"model", model}, {"input", texts}};
    const auto doc = post_json(*impl_, "/v1/embeddings", body);

    BackendEmbedReply reply;
    try {
        reply.vectors.resize(texts.size());
        for (const auto& item : doc.at("data")) {
            const auto index = item.at("index").get<std::size_t>();
            if (index >= reply.vectors.size())
                throw BackendError("embedding index out of range", /*retryable=*/false);
            reply.vectors[index] = item.at("embedding").get<std::vector<double>>();
        }
        if (doc.contains("usage")) reply.input_tokens = doc["usage"].value("prompt_tokens", 0ll);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unexpected embeddings shape: ") + e.what(),
                           /*retryable=*/false);
    }
    return reply;
}

}  // namespace air::modelio
