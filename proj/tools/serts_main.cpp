#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "serts/error.hpp"
#include "serts/runner.hpp"

namespace {

serts::SelectionPolicy policy_from_string(const std::string& s) {
    if (s == "max_ucb") return serts::SelectionPolicy::max_ucb;
    if (s == "random") return serts::SelectionPolicy::random;
    throw serts::ConfigError("unknown policy: " + s);
}

serts::UcbForm ucb_form_from_string(const std::string& s) {
    if (s == "log_ratio") return serts::UcbForm::log_ratio;
    if (s == "standard") return serts::UcbForm::standard;
    throw serts::ConfigError("unknown ucb form: " + s);
}

void print_aggregate(const serts::AggregateReport& a) {
    std::cout << "questions=" << a.questions << " failed=" << a.failed
              << " precision=" << a.precision << " recall=" << a.recall << " f1=" << a.f1
              << " hit_rate=" << a.hit_rate;
    if (a.rouge2_f1.has_value()) {
        std::cout << " rouge2_f1=" << *a.rouge2_f1 << " rouge_su4_f1=" << *a.rouge_su4_f1;
    }
    std::cout << " tokens_per_question=" << a.tokens_per_question
              << " simulations_used=" << a.simulations_used << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tree-search query-rewriting retrieval engine over a BM25 index"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Config file (INI; put run options under a [run] section; flags win)");

    // --- index ---
    auto* index_cmd = app.add_subcommand("index", "Build (and optionally persist) the BM25 index");
    std::string index_corpus, index_out;
    double index_k1 = 1.2, index_b = 0.75;
    index_cmd->add_option("--corpus", index_corpus, "Corpus file (one {id,text} record per line)")
        ->required();
    index_cmd->add_option("--out", index_out, "Index output file");
    index_cmd->add_option("--k1", index_k1, "BM25 k1");
    index_cmd->add_option("--b", index_b, "BM25 b");

    // --- run ---
    auto* run_cmd = app.add_subcommand("run", "Run retrieval for every seed x question");
    serts::RunConfig config;
    std::string method = "serts", backend = "mock", policy = "max_ucb", ucb_form = "log_ratio";
    run_cmd->add_option("--corpus", config.corpus_path, "Corpus file")->required();
    run_cmd->add_option("--questions", config.questions_path, "Questions file")->required();
    run_cmd->add_option("--method", method, "bm25 | reflection | serts");
    run_cmd->add_option("--backend", backend, "mock | http");
    run_cmd->add_option("--mock-script", config.mock_script_path, "Scripted replies for the mock backend");
    run_cmd->add_option("--base-url", config.base_url, "Chat-completions base URL (http backend)");
    run_cmd->add_option("--model", config.model, "Model name sent to the backend");
    run_cmd->add_option("--temperature", config.temperature, "Sampling temperature");
    run_cmd->add_option("--max-tokens", config.max_tokens, "Completion token limit");
    run_cmd->add_option("--k1", config.k1, "BM25 k1");
    run_cmd->add_option("--b", config.b, "BM25 b");
    run_cmd->add_option("--sim", config.sim, "Maximum simulations per question");
    run_cmd->add_option("--branch", config.branch, "Maximum children per node");
    run_cmd->add_option("--depth", config.depth, "Maximum tree depth");
    run_cmd->add_option("--exploration-c", config.exploration_c, "UCB exploration constant");
    run_cmd->add_option("--policy", policy, "max_ucb | random");
    run_cmd->add_option("--ucb-form", ucb_form, "log_ratio | standard");
    run_cmd->add_option("--reward-scale", config.reward_scale, "Backpropagation reward scale");
    run_cmd->add_option("--top-k", config.top_k, "Documents per retrieval call");
    run_cmd->add_option("--seeds", config.seeds, "Run seeds")->delimiter(',');
    run_cmd->add_option("--workers", config.workers, "Concurrent per-question runs");
    run_cmd->add_flag("--answers", config.generate_answers, "Generate an answer per question");
    run_cmd->add_option("--out-report", config.out_report, "Report output file");
    run_cmd->add_option("--out-trajectories", config.out_trajectories, "Trajectory output file");

    // --- eval ---
    auto* eval_cmd = app.add_subcommand("eval", "Recompute metrics from a stored report");
    std::string eval_report, eval_questions, eval_out;
    eval_cmd->add_option("--report", eval_report, "Report produced by `run`")->required();
    eval_cmd->add_option("--questions", eval_questions, "Questions file")->required();
    eval_cmd->add_option("--out", eval_out, "Write the recomputed report here");

    // --- export-trajectories ---
    auto* export_cmd = app.add_subcommand("export-trajectories",
                                          "Validate and merge trajectory files");
    std::vector<std::string> export_in;
    std::string export_out;
    export_cmd->add_option("--in", export_in, "Input trajectory files")->required();
    export_cmd->add_option("--out", export_out, "Merged output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*index_cmd) {
            const serts::IndexStats stats = serts::cmd_index(index_corpus, index_out, index_k1, index_b);
            std::cout << "N=" << stats.doc_count << " avgdl=" << stats.avgdl << "\n";
            if (!index_out.empty()) std::cout << "index written to " << index_out << "\n";
        } else if (*run_cmd) {
            config.method = serts::method_from_string(method);
            if (backend == "mock") {
                config.backend = serts::BackendKind::mock;
            } else if (backend == "http") {
                config.backend = serts::BackendKind::http;
            } else {
                throw serts::ConfigError("unknown backend: " + backend);
            }
            config.policy = policy_from_string(policy);
            config.ucb_form = ucb_form_from_string(ucb_form);

            const serts::RunSummary summary = serts::cmd_run(config);
            for (const auto& seed : summary.report.per_seed) {
                std::cout << "seed " << seed.seed << ": ";
                print_aggregate(seed.aggregate);
            }
            std::cout << "overall: ";
            print_aggregate(summary.report.aggregate);
            if (summary.questions_total > 0 &&
                summary.questions_failed == summary.questions_total) {
                std::cerr << "all questions failed\n";
                return 3;
            }
        } else if (*eval_cmd) {
            const serts::RunReport report = serts::cmd_eval(eval_report, eval_questions);
            if (eval_out.empty()) {
                std::cout << serts::report_to_string(report);
            } else {
                serts::save_report(report, eval_out);
                std::cout << "overall: ";
                print_aggregate(report.aggregate);
            }
        } else if (*export_cmd) {
            std::vector<serts::TrajectoryRecord> merged;
            for (const auto& path : export_in) {
                auto records = serts::import_trajectories(path);
                merged.insert(merged.end(), std::make_move_iterator(records.begin()),
                              std::make_move_iterator(records.end()));
            }
            serts::export_trajectories(merged, export_out);
            std::cout << merged.size() << " records written to " << export_out << "\n";
        }
        return 0;
    } catch (const serts::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const serts::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const serts::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
