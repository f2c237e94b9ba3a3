#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankforge/errors.hpp"

namespace rankforge {

struct ChatRequest {
    std::string endpoint_id;
    std::string stage;  // pipeline stage tag ("persona", "judge", ...); mock rules match on it
    std::optional<std::string> system;
    std::string user;
    double temperature = 0.0;
    int max_tokens = 1024;
    bool want_logprobs = false;
    int logprob_top_k = 5;
};

struct ChatExchange {
    ChatRequest request;
    std::string raw_text;
    std::optional<std::string> reasoning_trace;
    std::string final_text;
    std::optional<std::map<std::string, double>> first_token_logprobs;  // values <= 0
    int attempt_count = 1;
};

/// Splits a leading <think>...</think> block off raw model output. Returns
/// (trace, final); no block at the start means no trace and final == raw.
/// An opening delimiter at the start with no close raises UnterminatedTrace.
std::pair<std::optional<std::string>, std::string> split_reasoning(const std::string& raw_text);

/// One scripted response rule. A rule applies when its stage matches the
/// request stage (empty stage matches any) and `contains` occurs in the
/// request's user text (empty matches any). First applicable rule wins.
struct MockRule {
    std::string stage;
    std::string contains;
    std::string text;
    std::optional<std::map<std::string, double>> logprobs;
};

struct EndpointConfig {
    std::string id;
    std::string base_url;  // "mock:" selects the scripted endpoint
    std::string model;
    std::string api_key_env;          // env var holding the credential, empty = none
    std::string mock_script_path;     // JSON list of MockRule, for mock endpoints
    int max_attempts = 4;
    double backoff_base_ms = 200.0;   // doubles per retry
    int max_concurrent = 4;           // in-flight request cap
};

/// Single choke point for model calls. Endpoints are either HTTP
/// (OpenAI-compatible POST /v1/chat/completions) or deterministic scripted
/// mocks; every completed exchange lands in an ordered transcript.
class Gateway {
public:
    explicit Gateway(std::vector<EndpointConfig> endpoints);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Replaces the endpoint's backend with an in-memory script; the
    /// endpoint id must already be configured or is added as a mock.
    void register_mock(const std::string& endpoint_id, std::vector<MockRule> script);

    ChatExchange chat(const ChatRequest& request);

    std::vector<ChatExchange> transcript() const;
    void write_transcript(const std::filesystem::path& path) const;
    void clear_transcript();

    /// Test hook: replaces the retry sleep (default std::this_thread::sleep_for).
    void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper);

    /// Delays requested so far (before 2nd, 3rd, ... attempts), for backoff tests.
    std::vector<double> backoff_delays_ms() const;

private:
    struct Endpoint;
    std::map<std::string, std::unique_ptr<Endpoint>> endpoints_;
    mutable std::mutex mutex_;
    std::vector<ChatExchange> transcript_;
    std::vector<double> delays_ms_;
    std::function<void(std::chrono::milliseconds)> sleeper_;

    Endpoint& resolve(const std::string& endpoint_id);
};

/// Loads a mock script file: a JSON array of
///   {"stage": "...", "contains": "...", "text": "...", "logprobs": {"true": -0.1, ...}?}
std::vector<MockRule> load_mock_script(const std::filesystem::path& path);

}  // namespace rankforge
