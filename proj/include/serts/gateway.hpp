#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

namespace serts {

struct ChatRequest {
    std::string prompt; // sent as a single user-role message
    double temperature = 0.7;
    int max_tokens = 4096;
    std::optional<std::int64_t> seed;
    std::string model;
};

struct ChatResponse {
    std::string text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

/// Role a call plays within one question's search. Part of the mock lookup
/// key so scripted outcomes are independent of call order.
enum class CallRole { propose, evaluate, answer };

const char* to_string(CallRole role);
CallRole call_role_from_string(const std::string& s);

/// Identifies one logical call: the question plus the tree path of the node
/// the call creates ("" for answer generation).
struct CallKey {
    std::string question_id;
    std::string node_path;
    CallRole role = CallRole::propose;

    std::string describe() const;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual ChatResponse complete(const ChatRequest& request, const CallKey& key) = 0;
};

/// Deterministic scripted backend. Replies are keyed by (question_id,
/// node_path, role); a missing key is a configuration error naming it. Token
/// counts come from the corpus tokenizer.
class MockBackend : public Backend {
public:
    static MockBackend from_file(const std::string& path);

    void add_reply(const CallKey& key, std::string reply);
    ChatResponse complete(const ChatRequest& request, const CallKey& key) override;
    std::size_t script_size() const { return replies_.size(); }

private:
    std::map<std::tuple<std::string, std::string, CallRole>, std::string> replies_;
};

/// OpenAI-compatible chat-completions client. Sends one user message per
/// request; retries transient failures with exponential backoff (attempts
/// capped at `max_attempts`), then throws TransportError.
class HttpBackend : public Backend {
public:
    struct Options {
        std::string base_url;  // e.g. http://host:port/v1
        std::string api_key;   // from SERTS_API_KEY
        int max_attempts = 3;
        std::chrono::milliseconds initial_backoff{500};
        std::chrono::milliseconds timeout{120000};
    };

    explicit HttpBackend(Options options);
    ChatResponse complete(const ChatRequest& request, const CallKey& key) override;

private:
    Options options_;
};

struct UsageStats {
    std::int64_t total_prompt_tokens = 0;
    std::int64_t total_completion_tokens = 0;
    std::int64_t calls = 0;
    std::int64_t questions = 0;
    double avg_prompt_tokens_per_question = 0.0;
    double avg_completion_tokens_per_question = 0.0;
};

/// Order-independent token accounting across concurrent per-question runs.
class UsageTracker {
public:
    void record(const std::string& question_id, const ChatResponse& response);
    UsageStats stats() const;

    /// (prompt, completion) token totals for one question.
    std::pair<std::int64_t, std::int64_t> question_tokens(const std::string& question_id) const;

private:
    struct PerQuestion {
        std::int64_t prompt_tokens = 0;
        std::int64_t completion_tokens = 0;
        std::int64_t calls = 0;
    };
    mutable std::mutex mutex_;
    std::map<std::string, PerQuestion> per_question_;
};

/// Wraps a backend and records every response against its question id.
class TrackingBackend : public Backend {
public:
    TrackingBackend(Backend& inner, UsageTracker& tracker) : inner_(inner), tracker_(tracker) {}
    ChatResponse complete(const ChatRequest& request, const CallKey& key) override {
        ChatResponse response = inner_.complete(request, key);
        tracker_.record(key.question_id, response);
        return response;
    }

private:
    Backend& inner_;
    UsageTracker& tracker_;
};

} // namespace serts
