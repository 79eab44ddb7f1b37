#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "serts/orchestrator.hpp"
#include "serts/report.hpp"
#include "serts/search_tree.hpp"

namespace serts {

enum class BackendKind { mock, http };

struct RunConfig {
    std::string corpus_path;
    std::string questions_path;
    Method method = Method::serts;
    BackendKind backend = BackendKind::mock;
    std::string mock_script_path;
    std::string base_url;
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.7;
    int max_tokens = 4096;
    double k1 = 1.2;
    double b = 0.75;
    int sim = 12;
    int branch = 3;
    int depth = 3;
    double exploration_c = 0.1;
    SelectionPolicy policy = SelectionPolicy::max_ucb;
    UcbForm ucb_form = UcbForm::log_ratio;
    double reward_scale = 1.0;
    int top_k = 3;
    std::vector<std::uint64_t> seeds{42, 43, 44};
    int workers = 1;
    bool generate_answers = false;
    std::string out_report;
    std::string out_trajectories;

    /// Throws ConfigError on any invariant violation (http without base
    /// url/credential, mock without a script, non-positive budgets, ...).
    void validate() const;

    SearchConfig search_config() const;
    ChatRequest chat_settings() const;
};

struct RunSummary {
    RunReport report;
    std::vector<TrajectoryRecord> trajectories; // seed-major, question order
    std::int64_t questions_total = 0;
    std::int64_t questions_failed = 0;
};

/// Builds the index and executes the configured method for every seed x
/// question, bounded by config.workers concurrent per-question runs. Writes
/// the report/trajectory files when paths are configured.
RunSummary cmd_run(const RunConfig& config, Backend* backend_override = nullptr);

struct IndexStats {
    std::size_t doc_count = 0;
    double avgdl = 0.0;
};

/// Builds the BM25 index, optionally persisting it to `index_out`.
IndexStats cmd_index(const std::string& corpus_path, const std::string& index_out, double k1,
                     double b);

/// Recomputes every metric from a stored report plus the questions file,
/// through the same aggregation code path as cmd_run.
RunReport cmd_eval(const std::string& report_path, const std::string& questions_path);

} // namespace serts
