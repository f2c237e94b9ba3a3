#include "rankforge/gateway.hpp"

#include <condition_variable>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rankforge/jsonl.hpp"

namespace rankforge {

using nlohmann::json;

namespace {

constexpr const char* kThinkOpen = "<think>";
constexpr const char* kThinkClose = "</think>";

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool is_blank(const std::string& s) { return trim(s).empty(); }

void check_logprobs(const std::map<std::string, double>& logprobs, const std::string& where) {
    for (const auto& [token, lp] : logprobs) {
        if (lp > 0.0) {
            throw PreconditionError("ScriptInvalid", where + ": log-probability for token \"" +
                                                         token + "\" is positive (" +
                                                         std::to_string(lp) + ")");
        }
    }
}

}  // namespace

std::pair<std::optional<std::string>, std::string> split_reasoning(const std::string& raw_text) {
    const auto start = raw_text.find_first_not_of(" \t\r\n");
    if (start == std::string::npos || raw_text.compare(start, 7, kThinkOpen) != 0) {
        return {std::nullopt, raw_text};
    }
    const auto open_end = start + 7;
    const auto close = raw_text.find(kThinkClose, open_end);
    if (close == std::string::npos) {
        throw Error("UnterminatedTrace", "opening " + std::string(kThinkOpen) + " has no close");
    }
    std::string trace = raw_text.substr(open_end, close - open_end);
    std::string final_text = trim(raw_text.substr(close + 8));
    return {std::move(trace), std::move(final_text)};
}

std::vector<MockRule> load_mock_script(const std::filesystem::path& path) {
    const auto lines = detail::read_lines_checked(path);
    std::string body;
    for (const auto& line : lines) body += line + "\n";
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw PreconditionError("ScriptInvalid", path.string() + " must hold a JSON array of rules");
    }
    std::vector<MockRule> script;
    for (const json& entry : j) {
        MockRule rule;
        rule.stage = entry.value("stage", "");
        rule.contains = entry.value("contains", "");
        if (!entry.contains("text") || !entry["text"].is_string()) {
            throw PreconditionError("ScriptInvalid", path.string() + ": rule without a \"text\" string");
        }
        rule.text = entry["text"].get<std::string>();
        if (entry.contains("logprobs") && !entry["logprobs"].is_null()) {
            std::map<std::string, double> lps;
            for (const auto& [token, lp] : entry["logprobs"].items()) {
                lps.emplace(token, lp.get<double>());
            }
            check_logprobs(lps, path.string());
            rule.logprobs = std::move(lps);
        }
        script.push_back(std::move(rule));
    }
    if (script.empty()) {
        throw PreconditionError("ScriptInvalid", path.string() + " holds an empty script");
    }
    return script;
}

// ---------------------------------------------------------------------------
// Endpoint backends

struct Gateway::Endpoint {
    EndpointConfig config;
    std::vector<MockRule> script;  // non-empty selects the mock path
    bool is_mock = false;

    // In-flight cap. A token-bucket of request slots, default 4.
    std::mutex slots_mutex;
    std::condition_variable slots_cv;
    int slots_in_use = 0;

    std::unique_ptr<httplib::Client> client;

    void acquire_slot() {
        std::unique_lock lock(slots_mutex);
        slots_cv.wait(lock, [&] { return slots_in_use < config.max_concurrent; });
        ++slots_in_use;
    }
    void release_slot() {
        {
            std::lock_guard lock(slots_mutex);
            --slots_in_use;
        }
        slots_cv.notify_one();
    }
};

Gateway::Gateway(std::vector<EndpointConfig> endpoints)
    : sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
    for (EndpointConfig& config : endpoints) {
        auto endpoint = std::make_unique<Endpoint>();
        endpoint->is_mock = config.base_url.rfind("mock:", 0) == 0;
        if (endpoint->is_mock && !config.mock_script_path.empty()) {
            endpoint->script = load_mock_script(config.mock_script_path);
        }
        if (!endpoint->is_mock) {
            endpoint->client = std::make_unique<httplib::Client>(config.base_url);
            endpoint->client->set_connection_timeout(30);
            endpoint->client->set_read_timeout(120);
        }
        endpoint->config = std::move(config);
        const std::string id = endpoint->config.id;
        if (!endpoints_.emplace(id, std::move(endpoint)).second) {
            throw PreconditionError("ConfigError", "endpoint id \"" + id + "\" defined twice");
        }
    }
}

Gateway::~Gateway() = default;

void Gateway::register_mock(const std::string& endpoint_id, std::vector<MockRule> script) {
    if (script.empty()) {
        throw PreconditionError("ScriptInvalid", "mock script for \"" + endpoint_id + "\" is empty");
    }
    for (const MockRule& rule : script) {
        if (rule.logprobs) check_logprobs(*rule.logprobs, endpoint_id);
    }
    auto it = endpoints_.find(endpoint_id);
    if (it == endpoints_.end()) {
        auto endpoint = std::make_unique<Endpoint>();
        endpoint->config = EndpointConfig{endpoint_id, "mock:", "", "", "", 4, 200.0, 4};
        endpoint->is_mock = true;
        it = endpoints_.emplace(endpoint_id, std::move(endpoint)).first;
    }
    it->second->is_mock = true;
    it->second->script = std::move(script);
}

Gateway::Endpoint& Gateway::resolve(const std::string& endpoint_id) {
    auto it = endpoints_.find(endpoint_id);
    if (it == endpoints_.end()) {
        throw PreconditionError("EndpointUnknown", "no endpoint \"" + endpoint_id + "\" in config");
    }
    return *it->second;
}

void Gateway::set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
    sleeper_ = std::move(sleeper);
}

std::vector<double> Gateway::backoff_delays_ms() const {
    std::lock_guard lock(mutex_);
    return delays_ms_;
}

namespace {

ChatExchange respond_from_script(const std::vector<MockRule>& script, const ChatRequest& request) {
    for (const MockRule& rule : script) {
        if (!rule.stage.empty() && rule.stage != request.stage) continue;
        if (!rule.contains.empty() && request.user.find(rule.contains) == std::string::npos) continue;
        ChatExchange exchange;
        exchange.request = request;
        exchange.raw_text = rule.text;
        auto [trace, final_text] = split_reasoning(rule.text);
        exchange.reasoning_trace = std::move(trace);
        exchange.final_text = std::move(final_text);
        exchange.first_token_logprobs = rule.logprobs;
        exchange.attempt_count = 1;
        return exchange;
    }
    throw Error("ScriptMiss", "no rule matches stage=\"" + request.stage + "\" user=\"" +
                                  request.user.substr(0, 120) + "...\"");
}

json build_payload(const EndpointConfig& config, const ChatRequest& request) {
    json messages = json::array();
    if (request.system) {
        messages.push_back(json{{"role", "system"}, {"content", *request.system}});
    }
    messages.push_back(json{{"role", "user"}, {"content", request.user}});
    json payload{{"model", config.model},
                 {"messages", messages},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_tokens}};
    if (request.want_logprobs) {
        payload["logprobs"] = true;
        payload["top_logprobs"] = request.logprob_top_k;
    }
    return payload;
}

ChatExchange parse_completion(const ChatRequest& request, const std::string& body,
                              int attempt_count) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty()) {
        throw Error("ResponseUnparseable", "endpoint \"" + request.endpoint_id +
                                               "\" returned an unusable body: " + body.substr(0, 120));
    }
    const json& choice = j["choices"][0];
    const json& message = choice.value("message", json::object());
    if (!message.contains("content") || !message["content"].is_string()) {
        throw Error("ResponseUnparseable", "choice without message.content");
    }

    ChatExchange exchange;
    exchange.request = request;
    exchange.raw_text = message["content"].get<std::string>();
    auto [trace, final_text] = split_reasoning(exchange.raw_text);
    exchange.reasoning_trace = std::move(trace);
    exchange.final_text = std::move(final_text);
    // DeepSeek-style responses put the trace in a dedicated field; prefer it.
    if (message.contains("reasoning_content") && message["reasoning_content"].is_string()) {
        exchange.reasoning_trace = message["reasoning_content"].get<std::string>();
    }
    if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
        const json& content = choice["logprobs"].value("content", json::array());
        if (content.is_array() && !content.empty() && content[0].contains("top_logprobs")) {
            std::map<std::string, double> lps;
            for (const json& alt : content[0]["top_logprobs"]) {
                lps[alt.value("token", "")] = alt.value("logprob", 0.0);
            }
            exchange.first_token_logprobs = std::move(lps);
        }
    }
    exchange.attempt_count = attempt_count;
    return exchange;
}

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600) || status < 0;
}

}  // namespace

ChatExchange Gateway::chat(const ChatRequest& request) {
    if (is_blank(request.user)) {
        throw PreconditionError("ConfigError", "chat request with empty user text");
    }
    Endpoint& endpoint = resolve(request.endpoint_id);

    ChatExchange exchange;
    if (endpoint.is_mock) {
        exchange = respond_from_script(endpoint.script, request);
    } else {
        const json payload = build_payload(endpoint.config, request);
        httplib::Headers headers;
        if (!endpoint.config.api_key_env.empty()) {
            if (const char* key = std::getenv(endpoint.config.api_key_env.c_str())) {
                headers.emplace("Authorization", std::string("Bearer ") + key);
            }
        }

        int last_status = -1;
        std::optional<ChatExchange> done;
        for (int attempt = 1; attempt <= endpoint.config.max_attempts; ++attempt) {
            if (attempt > 1) {
                const double delay = endpoint.config.backoff_base_ms * (1 << (attempt - 2));
                {
                    std::lock_guard lock(mutex_);
                    delays_ms_.push_back(delay);
                }
                sleeper_(std::chrono::milliseconds(static_cast<long>(delay)));
            }
            endpoint.acquire_slot();
            auto res = endpoint.client->Post("/v1/chat/completions", headers, payload.dump(),
                                             "application/json");
            endpoint.release_slot();
            if (!res) {
                last_status = -1;
                continue;
            }
            last_status = res->status;
            if (res->status == 200) {
                done = parse_completion(request, res->body, attempt);
                break;
            }
            if (!retryable_status(res->status)) break;
        }
        if (!done) {
            throw Error("ExhaustedRetries", "endpoint \"" + request.endpoint_id + "\" failed after " +
                                                std::to_string(endpoint.config.max_attempts) +
                                                " attempts, last status " +
                                                std::to_string(last_status));
        }
        exchange = std::move(*done);
    }

    {
        std::lock_guard lock(mutex_);
        transcript_.push_back(exchange);
    }
    return exchange;
}

std::vector<ChatExchange> Gateway::transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
}

void Gateway::clear_transcript() {
    std::lock_guard lock(mutex_);
    transcript_.clear();
}

void Gateway::write_transcript(const std::filesystem::path& path) const {
    std::vector<std::string> lines;
    {
        std::lock_guard lock(mutex_);
        for (const ChatExchange& e : transcript_) {
            json j{{"stage", e.request.stage},
                   {"endpoint", e.request.endpoint_id},
                   {"user", e.request.user},
                   {"temperature", e.request.temperature},
                   {"max_tokens", e.request.max_tokens},
                   {"raw_text", e.raw_text},
                   {"final_text", e.final_text},
                   {"attempt_count", e.attempt_count}};
            if (e.request.system) j["system"] = *e.request.system;
            if (e.reasoning_trace) j["reasoning_trace"] = *e.reasoning_trace;
            if (e.first_token_logprobs) {
                json lps = json::object();
                for (const auto& [token, lp] : *e.first_token_logprobs) lps[token] = lp;
                j["first_token_logprobs"] = lps;
            }
            lines.push_back(j.dump());
        }
    }
    detail::write_lines(path, lines);
}

}  // namespace rankforge
