#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "serts/gateway.hpp"
#include "serts/metrics.hpp"

namespace serts {

/// One question's stored outcome: enough to recompute every metric offline.
struct QuestionReport {
    std::string question_id;
    bool failed = false;
    std::string error; // non-empty only when failed
    std::vector<std::string> doc_ids;
    int best_reward = 0;
    int simulations_used = 0;
    std::optional<std::string> answer;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    RetrievalMetrics retrieval;
    std::optional<RougeScores> rouge2_scores;
    std::optional<RougeScores> rouge_su4_scores;
};

struct SeedReport {
    std::uint64_t seed = 0;
    std::vector<QuestionReport> questions; // question-file order
    AggregateReport aggregate;
    UsageStats usage;
};

struct RunReport {
    std::string method;
    std::string backend;
    std::string policy;
    double exploration_c = 0.1;
    int sim = 12;
    int branch = 3;
    int depth = 3;
    int top_k = 3;
    std::vector<std::uint64_t> seeds;
    std::vector<SeedReport> per_seed;
    AggregateReport aggregate; // mean of the per-seed aggregates
};

QuestionScores to_scores(const QuestionReport& report);

/// Deterministic single-file persistence (stable key order, stable float
/// formatting): byte-identical for identical runs.
void save_report(const RunReport& report, const std::string& path);
RunReport load_report(const std::string& path);
std::string report_to_string(const RunReport& report);

} // namespace serts
