#pragma once
// OpenAI-compatible chat-completions client. The transport is a small
// interface so tests can script replies and count requests; the HTTP
// implementation adds retries with exponential backoff on 429/5xx and a
// simple requests-per-minute limiter.

#include <chrono>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "kgfpq/core.hpp"

namespace kgfpq {

struct ChatBackendConfig {
    std::string base_url = "http://localhost:8000";
    std::string model = "gpt-3.5-turbo";
    std::string api_key_env = "OPENAI_API_KEY";  // env var name, never the key itself
    double temperature = 0.0;
    double top_p = 1.0;
    int max_retries = 3;
    int timeout_seconds = 60;
    int rate_limit_rpm = 60;

    static ChatBackendConfig from_json(const json& j) {
        ChatBackendConfig c;
        if (j.contains("base_url")) c.base_url = j.at("base_url");
        if (j.contains("model")) c.model = j.at("model");
        if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env");
        if (j.contains("temperature")) c.temperature = j.at("temperature");
        if (j.contains("top_p")) c.top_p = j.at("top_p");
        if (j.contains("max_retries")) c.max_retries = j.at("max_retries");
        if (j.contains("timeout_seconds")) c.timeout_seconds = j.at("timeout_seconds");
        if (j.contains("rate_limit_rpm")) c.rate_limit_rpm = j.at("rate_limit_rpm");
        if (c.temperature < 0) throw std::runtime_error("temperature must be >= 0");
        if (c.rate_limit_rpm < 1) throw std::runtime_error("rate_limit_rpm must be >= 1");
        return c;
    }
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Serialized chat-completions request body. Kept as a free function so
// the golden-file tests can check the exact bytes sent.
inline std::string chat_request_body(const ChatBackendConfig& cfg, const std::string& prompt) {
    json body{{"model", cfg.model},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", cfg.temperature},
              {"top_p", cfg.top_p}};
    return body.dump();
}

// One user-turn completion request; returns the assistant text.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual std::string complete(const ChatBackendConfig& cfg, const std::string& prompt) = 0;
};

// Parses {"choices":[{"message":{"content": ...}}]}.
inline std::string parse_chat_response(const std::string& body) {
    json j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
}

class HttpChatTransport : public ChatTransport {
public:
    std::string complete(const ChatBackendConfig& cfg, const std::string& prompt) override;

private:
    void throttle(int rpm) {
        using clock = std::chrono::steady_clock;
        const auto min_gap = std::chrono::milliseconds(60'000 / rpm);
        const auto now = clock::now();
        if (last_request_ != clock::time_point{} && now - last_request_ < min_gap)
            std::this_thread::sleep_for(min_gap - (now - last_request_));
        last_request_ = clock::now();
    }

    std::chrono::steady_clock::time_point last_request_{};
};

}  // namespace kgfpq

// httplib pulls in a lot; keep it out of translation units that only
// need the config/transport types.
#ifdef KGFPQ_ENABLE_HTTP
#include <httplib.h>

namespace kgfpq {

inline std::string HttpChatTransport::complete(const ChatBackendConfig& cfg,
                                               const std::string& prompt) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    httplib::Client client(cfg.base_url);
    client.set_read_timeout(cfg.timeout_seconds, 0);
    httplib::Headers headers;
    if (key) headers.emplace("Authorization", std::string("Bearer ") + key);

    const std::string body = chat_request_body(cfg, prompt);
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(500 << (attempt - 1)));
        throttle(cfg.rate_limit_rpm);
        auto res = client.Post("/v1/chat/completions", headers, body, "application/json");
        if (!res) {
            last_error = "connection failure";
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("chat endpoint returned HTTP " + std::to_string(res->status) +
                                 ": " + res->body);
        try {
            return parse_chat_response(res->body);
        } catch (const std::exception& e) {
            throw TransportError(std::string("malformed chat response: ") + e.what());
        }
    }
    throw TransportError("chat request failed after " + std::to_string(cfg.max_retries + 1) +
                         " attempts: " + last_error);
}

}  // namespace kgfpq
#else
namespace kgfpq {
inline std::string HttpChatTransport::complete(const ChatBackendConfig&, const std::string&) {
    throw TransportError("HTTP transport not compiled in (define KGFPQ_ENABLE_HTTP)");
}
}  // namespace kgfpq
#endif
