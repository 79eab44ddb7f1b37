#include "serts/gateway.hpp"

#include <fstream>
#include <thread>
#include <tuple>

#include <httplib.h>
#include <json.hpp>

#include "serts/corpus.hpp"
#include "serts/error.hpp"

namespace serts {

const char* to_string(CallRole role) {
    switch (role) {
        case CallRole::propose: return "propose";
        case CallRole::evaluate: return "evaluate";
        case CallRole::answer: return "answer";
    }
    return "unknown";
}

CallRole call_role_from_string(const std::string& s) {
    if (s == "propose") return CallRole::propose;
    if (s == "evaluate") return CallRole::evaluate;
    if (s == "answer") return CallRole::answer;
    throw IoError("unknown call role: " + s);
}

std::string CallKey::describe() const {
    return "(question_id=" + question_id + ", node_path=" + node_path +
           ", role=" + to_string(role) + ")";
}

MockBackend MockBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script file: " + path);
    MockBackend backend;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw IoError(path + ": malformed record at line " + std::to_string(lineno));
        }
        try {
            CallKey key;
            key.question_id = rec.at("question_id").get<std::string>();
            key.node_path = rec.value("node_path", "");
            key.role = call_role_from_string(rec.at("role").get<std::string>());
            backend.add_reply(key, rec.at("reply").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path + ": bad record at line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return backend;
}

void MockBackend::add_reply(const CallKey& key, std::string reply) {
    replies_[{key.question_id, key.node_path, key.role}] = std::move(reply);
}

ChatResponse MockBackend::complete(const ChatRequest& request, const CallKey& key) {
    auto it = replies_.find({key.question_id, key.node_path, key.role});
    if (it == replies_.end()) {
        throw ConfigError("mock script has no reply for " + key.describe());
    }
    ChatResponse response;
    response.text = it->second;
    response.prompt_tokens = static_cast<std::int64_t>(tokenize(request.prompt).size());
    response.completion_tokens = static_cast<std::int64_t>(tokenize(response.text).size());
    return response;
}

HttpBackend::HttpBackend(Options options) : options_(std::move(options)) {
    if (options_.base_url.empty()) throw ConfigError("http backend requires a base url");
}

ChatResponse HttpBackend::complete(const ChatRequest& request, const CallKey&) {
    nlohmann::json body{
        {"model", request.model},
        {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                           {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    if (request.seed.has_value()) body["seed"] = *request.seed;
    const std::string payload = body.dump();

    // Split "scheme://host:port/prefix" into client target and path prefix.
    std::string url = options_.base_url;
    std::string prefix;
    const auto scheme_end = url.find("://");
    if (scheme_end != std::string::npos) {
        const auto path_start = url.find('/', scheme_end + 3);
        if (path_start != std::string::npos) {
            prefix = url.substr(path_start);
            url = url.substr(0, path_start);
        }
    }
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    const std::string endpoint = prefix + "/chat/completions";

    std::string last_error;
    auto backoff = options_.initial_backoff;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(url);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(options_.timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(options_.timeout));
        httplib::Headers headers;
        if (!options_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + options_.api_key);
        }
        auto res = client.Post(endpoint, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) {
            last_error = "unparseable response body";
            continue;
        }
        try {
            ChatResponse response;
            response.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
            if (auto usage = reply.find("usage"); usage != reply.end()) {
                response.prompt_tokens = usage->value("prompt_tokens", 0);
                response.completion_tokens = usage->value("completion_tokens", 0);
            }
            return response;
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("unexpected response shape: ") + e.what();
            continue;
        }
    }
    throw TransportError("chat completion failed after " + std::to_string(options_.max_attempts) +
                         " attempts: " + last_error);
}

void UsageTracker::record(const std::string& question_id, const ChatResponse& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& entry = per_question_[question_id];
    entry.prompt_tokens += response.prompt_tokens;
    entry.completion_tokens += response.completion_tokens;
    entry.calls += 1;
}

UsageStats UsageTracker::stats() const {
    std::lock_guard<std::mutex> lock(mutex_);
    UsageStats stats;
    for (const auto& [_, entry] : per_question_) {
        stats.total_prompt_tokens += entry.prompt_tokens;
        stats.total_completion_tokens += entry.completion_tokens;
        stats.calls += entry.calls;
    }
    stats.questions = static_cast<std::int64_t>(per_question_.size());
    if (stats.questions > 0) {
        stats.avg_prompt_tokens_per_question =
            static_cast<double>(stats.total_prompt_tokens) / static_cast<double>(stats.questions);
        stats.avg_completion_tokens_per_question =
            static_cast<double>(stats.total_completion_tokens) /
            static_cast<double>(stats.questions);
    }
    return stats;
}

std::pair<std::int64_t, std::int64_t> UsageTracker::question_tokens(
    const std::string& question_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = per_question_.find(question_id);
    if (it == per_question_.end()) return {0, 0};
    return {it->second.prompt_tokens, it->second.completion_tokens};
}

} // namespace serts
