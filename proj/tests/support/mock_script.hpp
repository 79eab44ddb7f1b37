#pragma once

// Helpers for scripting the mock gateway in orchestrator-level tests.

#include <string>
#include <utility>
#include <vector>

#include "serts/gateway.hpp"

namespace testutil {

/// Proposer reply carrying a tagged query plus an evaluator reply carrying a
/// tagged score, both keyed by the child path the expansion will create.
inline void script_expansion(serts::MockBackend& mock, const std::string& question_id,
                             const std::string& child_path, const std::string& query, int reward,
                             const std::string& feedback = "feedback") {
    mock.add_reply({question_id, child_path, serts::CallRole::propose},
                   "Reasoning for " + child_path + ".\n<query>" + query + "</query>");
    mock.add_reply({question_id, child_path, serts::CallRole::evaluate},
                   feedback + " <score>" + std::to_string(reward) + "</score>");
}

/// Records every call passing through, for budget and prompt-shape checks.
class RecordingBackend : public serts::Backend {
public:
    explicit RecordingBackend(serts::Backend& inner) : inner_(inner) {}

    serts::ChatResponse complete(const serts::ChatRequest& request,
                                 const serts::CallKey& key) override {
        calls.emplace_back(key, request.prompt);
        return inner_.complete(request, key);
    }

    std::size_t count(serts::CallRole role) const {
        std::size_t n = 0;
        for (const auto& [key, _] : calls) {
            if (key.role == role) ++n;
        }
        return n;
    }

    std::vector<std::pair<serts::CallKey, std::string>> calls;

private:
    serts::Backend& inner_;
};

} // namespace testutil
