#include "serts/report.hpp"

#include <fstream>

#include <json.hpp>

#include "serts/error.hpp"

namespace serts {

namespace {

constexpr const char* kSchema = "serts-report-v1";

nlohmann::json rouge_to_json(const RougeScores& scores) {
    return {{"recall", scores.recall}, {"precision", scores.precision}, {"f1", scores.f1}};
}

RougeScores rouge_from_json(const nlohmann::json& j, RougeVariant variant) {
    RougeScores scores;
    scores.recall = j.at("recall").get<double>();
    scores.precision = j.at("precision").get<double>();
    scores.f1 = j.at("f1").get<double>();
    scores.variant = variant;
    return scores;
}

nlohmann::json aggregate_to_json(const AggregateReport& a) {
    nlohmann::json j{
        {"precision", a.precision},
        {"recall", a.recall},
        {"f1", a.f1},
        {"hit_rate", a.hit_rate},
        {"tokens_per_question", a.tokens_per_question},
        {"simulations_used", a.simulations_used},
        {"questions", a.questions},
        {"failed", a.failed},
    };
    if (a.rouge2_recall.has_value()) {
        j["rouge2_recall"] = *a.rouge2_recall;
        j["rouge2_f1"] = *a.rouge2_f1;
        j["rouge_su4_recall"] = *a.rouge_su4_recall;
        j["rouge_su4_f1"] = *a.rouge_su4_f1;
    }
    return j;
}

AggregateReport aggregate_from_json(const nlohmann::json& j) {
    AggregateReport a;
    a.precision = j.at("precision").get<double>();
    a.recall = j.at("recall").get<double>();
    a.f1 = j.at("f1").get<double>();
    a.hit_rate = j.at("hit_rate").get<double>();
    a.tokens_per_question = j.at("tokens_per_question").get<double>();
    a.simulations_used = j.at("simulations_used").get<double>();
    a.questions = j.at("questions").get<std::int64_t>();
    a.failed = j.at("failed").get<std::int64_t>();
    if (j.contains("rouge2_recall")) {
        a.rouge2_recall = j.at("rouge2_recall").get<double>();
        a.rouge2_f1 = j.at("rouge2_f1").get<double>();
        a.rouge_su4_recall = j.at("rouge_su4_recall").get<double>();
        a.rouge_su4_f1 = j.at("rouge_su4_f1").get<double>();
    }
    return a;
}

nlohmann::json question_to_json(const QuestionReport& q) {
    nlohmann::json j{
        {"question_id", q.question_id},
        {"failed", q.failed},
        {"doc_ids", q.doc_ids},
        {"best_reward", q.best_reward},
        {"simulations_used", q.simulations_used},
        {"prompt_tokens", q.prompt_tokens},
        {"completion_tokens", q.completion_tokens},
        {"metrics",
         {{"precision", q.retrieval.precision},
          {"recall", q.retrieval.recall},
          {"f1", q.retrieval.f1},
          {"hit", q.retrieval.hit}}},
    };
    if (q.failed) j["error"] = q.error;
    if (q.answer.has_value()) j["answer"] = *q.answer;
    if (q.rouge2_scores.has_value()) j["rouge2"] = rouge_to_json(*q.rouge2_scores);
    if (q.rouge_su4_scores.has_value()) j["rouge_su4"] = rouge_to_json(*q.rouge_su4_scores);
    return j;
}

QuestionReport question_from_json(const nlohmann::json& j) {
    QuestionReport q;
    q.question_id = j.at("question_id").get<std::string>();
    q.failed = j.at("failed").get<bool>();
    q.error = j.value("error", "");
    q.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    q.best_reward = j.at("best_reward").get<int>();
    q.simulations_used = j.at("simulations_used").get<int>();
    q.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
    q.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
    const auto& m = j.at("metrics");
    q.retrieval.precision = m.at("precision").get<double>();
    q.retrieval.recall = m.at("recall").get<double>();
    q.retrieval.f1 = m.at("f1").get<double>();
    q.retrieval.hit = m.at("hit").get<bool>();
    if (j.contains("answer")) q.answer = j.at("answer").get<std::string>();
    if (j.contains("rouge2")) q.rouge2_scores = rouge_from_json(j.at("rouge2"), RougeVariant::rouge2);
    if (j.contains("rouge_su4")) {
        q.rouge_su4_scores = rouge_from_json(j.at("rouge_su4"), RougeVariant::rougeSU4);
    }
    return q;
}

nlohmann::json usage_to_json(const UsageStats& u) {
    return {
        {"total_prompt_tokens", u.total_prompt_tokens},
        {"total_completion_tokens", u.total_completion_tokens},
        {"calls", u.calls},
        {"questions", u.questions},
        {"avg_prompt_tokens_per_question", u.avg_prompt_tokens_per_question},
        {"avg_completion_tokens_per_question", u.avg_completion_tokens_per_question},
    };
}

UsageStats usage_from_json(const nlohmann::json& j) {
    UsageStats u;
    u.total_prompt_tokens = j.at("total_prompt_tokens").get<std::int64_t>();
    u.total_completion_tokens = j.at("total_completion_tokens").get<std::int64_t>();
    u.calls = j.at("calls").get<std::int64_t>();
    u.questions = j.at("questions").get<std::int64_t>();
    u.avg_prompt_tokens_per_question = j.at("avg_prompt_tokens_per_question").get<double>();
    u.avg_completion_tokens_per_question = j.at("avg_completion_tokens_per_question").get<double>();
    return u;
}

} // namespace

QuestionScores to_scores(const QuestionReport& report) {
    QuestionScores scores;
    scores.question_id = report.question_id;
    scores.failed = report.failed;
    scores.retrieval = report.retrieval;
    scores.rouge2 = report.rouge2_scores;
    scores.rouge_su4 = report.rouge_su4_scores;
    scores.prompt_tokens = report.prompt_tokens;
    scores.completion_tokens = report.completion_tokens;
    scores.simulations_used = report.simulations_used;
    return scores;
}

std::string report_to_string(const RunReport& report) {
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& seed : report.per_seed) {
        nlohmann::json questions = nlohmann::json::array();
        for (const auto& q : seed.questions) questions.push_back(question_to_json(q));
        per_seed.push_back({
            {"seed", seed.seed},
            {"questions", std::move(questions)},
            {"aggregate", aggregate_to_json(seed.aggregate)},
            {"usage", usage_to_json(seed.usage)},
        });
    }
    const nlohmann::json j{
        {"schema", kSchema},
        {"method", report.method},
        {"backend", report.backend},
        {"policy", report.policy},
        {"exploration_c", report.exploration_c},
        {"sim", report.sim},
        {"branch", report.branch},
        {"depth", report.depth},
        {"top_k", report.top_k},
        {"seeds", report.seeds},
        {"per_seed", std::move(per_seed)},
        {"aggregate", aggregate_to_json(report.aggregate)},
    };
    return j.dump(2) + "\n";
}

void save_report(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report file: " + path);
    out << report_to_string(report);
    if (!out) throw IoError("failed writing report file: " + path);
}

RunReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IoError("malformed report file: " + path);
    if (j.value("schema", "") != kSchema) throw IoError(path + ": not a run report");

    RunReport report;
    try {
        report.method = j.at("method").get<std::string>();
        report.backend = j.at("backend").get<std::string>();
        report.policy = j.at("policy").get<std::string>();
        report.exploration_c = j.at("exploration_c").get<double>();
        report.sim = j.at("sim").get<int>();
        report.branch = j.at("branch").get<int>();
        report.depth = j.at("depth").get<int>();
        report.top_k = j.at("top_k").get<int>();
        report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        for (const auto& seed_json : j.at("per_seed")) {
            SeedReport seed;
            seed.seed = seed_json.at("seed").get<std::uint64_t>();
            for (const auto& q : seed_json.at("questions")) {
                seed.questions.push_back(question_from_json(q));
            }
            seed.aggregate = aggregate_from_json(seed_json.at("aggregate"));
            seed.usage = usage_from_json(seed_json.at("usage"));
            report.per_seed.push_back(std::move(seed));
        }
        report.aggregate = aggregate_from_json(j.at("aggregate"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": bad report schema: " + e.what());
    }
    return report;
}

} // namespace serts
