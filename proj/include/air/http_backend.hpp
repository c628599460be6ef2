#pragma once

#include <memory>
#include <string>
#include <vector>

#include "air/modelio.hpp"

namespace air::modelio {

// OpenAI-compatible HTTP client: POST {base_url}/v1/chat/completions and
// {base_url}/v1/embeddings. Usage comes from the response `usage` fields.
// 429 and 5xx responses and transport failures surface as retryable backend
// errors; other non-2xx statuses are fatal.
class HttpBackend : public Backend {
public:
    // `base_url` like "https://api.openai.com" or "http://localhost:8080/proxy".
    // `api_key` may be empty for unauthenticated local endpoints.
    HttpBackend(std::string base_url, std::string api_key, int timeout_seconds = 120);
    ~HttpBackend() override;

    BackendReply chat(const std::string& model, const ChatRequest& request) override;
    BackendEmbedReply embed(const std::string& model,
                            const std::vector<std::string>& texts) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace air::modelio
