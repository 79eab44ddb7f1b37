#include "serts/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <memory>
#include <thread>

#include "serts/error.hpp"
#include "serts/metrics.hpp"

namespace serts {

namespace {

const char* to_string(BackendKind kind) {
    return kind == BackendKind::mock ? "mock" : "http";
}

const char* to_string(SelectionPolicy policy) {
    return policy == SelectionPolicy::max_ucb ? "max_ucb" : "random";
}

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
    if (config.backend == BackendKind::mock) {
        return std::make_unique<MockBackend>(MockBackend::from_file(config.mock_script_path));
    }
    HttpBackend::Options options;
    options.base_url = config.base_url;
    const char* key = std::getenv("SERTS_API_KEY");
    options.api_key = key == nullptr ? "" : key;
    return std::make_unique<HttpBackend>(std::move(options));
}

void score_question(QuestionReport& row, const Question& question) {
    row.retrieval = retrieval_metrics(row.doc_ids, question.gold_doc_ids);
    if (row.answer.has_value() && question.ideal_answer.has_value()) {
        row.rouge2_scores = rouge2(*row.answer, *question.ideal_answer);
        row.rouge_su4_scores = rouge_su4(*row.answer, *question.ideal_answer);
    }
}

struct SeedRun {
    SeedReport report;
    std::vector<std::vector<TrajectoryRecord>> trajectories; // per question
};

SeedRun run_seed(const RunConfig& config, const Corpus& corpus, const Bm25Index& index,
                 const std::vector<Question>& questions, Backend& backend, std::uint64_t seed) {
    UsageTracker tracker;
    TrackingBackend tracked(backend, tracker);
    const SearchConfig search = config.search_config();
    const ChatRequest chat = config.chat_settings();

    SeedRun result;
    result.report.seed = seed;
    result.report.questions.resize(questions.size());
    result.trajectories.resize(questions.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= questions.size()) break;
            const Question& question = questions[i];
            QuestionReport row;
            row.question_id = question.id;
            try {
                RetrievalOutcome outcome;
                if (config.method == Method::bm25) {
                    outcome = run_bm25(question, index, config.top_k);
                } else {
                    SearchResult search_result =
                        config.method == Method::serts
                            ? run_serts(question, index, corpus, tracked, search, chat, seed)
                            : run_reflection(question, index, corpus, tracked, search, chat, seed);
                    outcome = std::move(search_result.outcome);
                    result.trajectories[i] = std::move(search_result.trajectories);
                }
                if (config.generate_answers) {
                    outcome.answer =
                        generate_answer(question, outcome.doc_ids, corpus, tracked, chat);
                }
                row.doc_ids = std::move(outcome.doc_ids);
                row.best_reward = outcome.best_reward;
                row.simulations_used = outcome.simulations_used;
                row.answer = std::move(outcome.answer);
                score_question(row, question);
            } catch (const Error& e) {
                row.failed = true;
                row.error = e.what();
                result.trajectories[i].clear();
            }
            const auto [prompt_tokens, completion_tokens] = tracker.question_tokens(question.id);
            row.prompt_tokens = prompt_tokens;
            row.completion_tokens = completion_tokens;
            result.report.questions[i] = std::move(row);
        }
    };

    const int thread_count = std::max(1, std::min<int>(config.workers,
                                                       static_cast<int>(questions.size())));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<QuestionScores> scores;
    scores.reserve(result.report.questions.size());
    for (const auto& q : result.report.questions) scores.push_back(to_scores(q));
    result.report.aggregate = aggregate(scores);
    result.report.usage = tracker.stats();
    return result;
}

} // namespace

void RunConfig::validate() const {
    if (corpus_path.empty()) throw ConfigError("corpus path is required");
    if (questions_path.empty()) throw ConfigError("questions path is required");
    if (backend == BackendKind::mock && mock_script_path.empty() && method != Method::bm25) {
        throw ConfigError("mock backend requires a mock script path");
    }
    if (backend == BackendKind::mock && generate_answers && mock_script_path.empty()) {
        throw ConfigError("mock backend requires a mock script path");
    }
    if (backend == BackendKind::http) {
        if (base_url.empty()) throw ConfigError("http backend requires --base-url");
        if (std::getenv("SERTS_API_KEY") == nullptr) {
            throw ConfigError("http backend requires the SERTS_API_KEY environment variable");
        }
    }
    if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
    if (k1 <= 0.0) throw ConfigError("k1 must be > 0");
    if (b < 0.0 || b > 1.0) throw ConfigError("b must be in [0,1]");
    if (sim < 1) throw ConfigError("sim must be >= 1");
    if (branch < 1) throw ConfigError("branch must be >= 1");
    if (depth < 1) throw ConfigError("depth must be >= 1");
    if (exploration_c < 0.0) throw ConfigError("exploration_c must be >= 0");
    if (top_k < 1) throw ConfigError("top_k must be >= 1");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

SearchConfig RunConfig::search_config() const {
    SearchConfig config;
    config.max_sim = sim;
    config.max_branch = branch;
    config.max_depth = depth;
    config.exploration_c = exploration_c;
    config.top_k = top_k;
    config.policy = policy;
    config.ucb_form = ucb_form;
    config.reward_scale = reward_scale;
    return config;
}

ChatRequest RunConfig::chat_settings() const {
    ChatRequest request;
    request.temperature = temperature;
    request.max_tokens = max_tokens;
    request.model = model;
    return request;
}

RunSummary cmd_run(const RunConfig& config, Backend* backend_override) {
    config.validate();

    const auto corpus = std::make_shared<const Corpus>(load_corpus(config.corpus_path));
    const std::vector<Question> questions = load_questions(config.questions_path);
    const Bm25Index index = Bm25Index::build(corpus, {config.k1, config.b});

    std::unique_ptr<Backend> owned;
    Backend* backend = backend_override;
    if (backend == nullptr) {
        const bool needs_backend = config.method != Method::bm25 || config.generate_answers;
        if (needs_backend) {
            owned = make_backend(config);
            backend = owned.get();
        }
    }
    // Pure BM25 without answers never touches the gateway; a throwing stub
    // keeps that guarantee honest.
    class NoBackend : public Backend {
        ChatResponse complete(const ChatRequest&, const CallKey& key) override {
            throw ConfigError("unexpected gateway call " + key.describe() + " in bm25 mode");
        }
    };
    NoBackend none;
    if (backend == nullptr) backend = &none;

    RunSummary summary;
    summary.report.method = to_string(config.method);
    summary.report.backend = to_string(config.backend);
    summary.report.policy = to_string(config.policy);
    summary.report.exploration_c = config.exploration_c;
    summary.report.sim = config.sim;
    summary.report.branch = config.branch;
    summary.report.depth = config.depth;
    summary.report.top_k = config.top_k;
    summary.report.seeds = config.seeds;

    std::vector<AggregateReport> per_seed_aggregates;
    for (const std::uint64_t seed : config.seeds) {
        SeedRun seed_run = run_seed(config, *corpus, index, questions, *backend, seed);
        per_seed_aggregates.push_back(seed_run.report.aggregate);
        for (auto& per_question : seed_run.trajectories) {
            summary.trajectories.insert(summary.trajectories.end(),
                                        std::make_move_iterator(per_question.begin()),
                                        std::make_move_iterator(per_question.end()));
        }
        for (const auto& q : seed_run.report.questions) {
            ++summary.questions_total;
            if (q.failed) ++summary.questions_failed;
        }
        summary.report.per_seed.push_back(std::move(seed_run.report));
    }
    summary.report.aggregate = aggregate_seeds(per_seed_aggregates);

    if (!config.out_report.empty()) save_report(summary.report, config.out_report);
    if (!config.out_trajectories.empty()) {
        export_trajectories(summary.trajectories, config.out_trajectories);
    }
    return summary;
}

IndexStats cmd_index(const std::string& corpus_path, const std::string& index_out, double k1,
                     double b) {
    const auto corpus = std::make_shared<const Corpus>(load_corpus(corpus_path));
    const Bm25Index index = Bm25Index::build(corpus, {k1, b});
    if (!index_out.empty()) index.save(index_out);
    return {index.doc_count(), index.avgdl()};
}

RunReport cmd_eval(const std::string& report_path, const std::string& questions_path) {
    RunReport stored = load_report(report_path);
    const std::vector<Question> questions = load_questions(questions_path);

    std::unordered_map<std::string, const Question*> by_id;
    for (const auto& q : questions) by_id.emplace(q.id, &q);

    std::vector<AggregateReport> per_seed_aggregates;
    for (auto& seed : stored.per_seed) {
        std::vector<QuestionScores> scores;
        scores.reserve(seed.questions.size());
        for (auto& row : seed.questions) {
            if (!row.failed) {
                auto it = by_id.find(row.question_id);
                if (it == by_id.end()) {
                    throw IoError("report question \"" + row.question_id +
                                  "\" not present in questions file");
                }
                row.rouge2_scores.reset();
                row.rouge_su4_scores.reset();
                score_question(row, *it->second);
            }
            scores.push_back(to_scores(row));
        }
        seed.aggregate = aggregate(scores);
        per_seed_aggregates.push_back(seed.aggregate);
    }
    stored.aggregate = aggregate_seeds(per_seed_aggregates);
    return stored;
}

} // namespace serts
