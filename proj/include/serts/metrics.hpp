#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace serts {

struct RetrievalMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool hit = false;
};

enum class RougeVariant { rouge2, rougeSU4 };

struct RougeScores {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    RougeVariant variant = RougeVariant::rouge2;
};

/// Set overlap between retrieved ids (duplicates collapsed) and the gold set.
/// Empty denominators yield 0 rather than an error.
RetrievalMetrics retrieval_metrics(const std::vector<std::string>& retrieved,
                                   const std::set<std::string>& gold);

/// Bigram multiset overlap (clipped counting) over the shared tokenizer.
RougeScores rouge2(const std::string& candidate, const std::string& reference);

/// Skip-bigrams with at most 4 tokens skipped between the pair's members,
/// plus unigrams contributed through a prepended begin-of-sequence marker;
/// the gap-4 window applies uniformly over the extended sequence.
RougeScores rouge_su4(const std::string& candidate, const std::string& reference);

/// One question's scores, ready for aggregation.
struct QuestionScores {
    std::string question_id;
    bool failed = false;
    RetrievalMetrics retrieval;
    std::optional<RougeScores> rouge2;
    std::optional<RougeScores> rouge_su4;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    int simulations_used = 0;
};

/// Percentage means over one run's questions (failed rows excluded from the
/// metric means). ROUGE means cover only questions that produced them.
struct AggregateReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double hit_rate = 0.0;
    std::optional<double> rouge2_recall;
    std::optional<double> rouge2_f1;
    std::optional<double> rouge_su4_recall;
    std::optional<double> rouge_su4_f1;
    double tokens_per_question = 0.0; // completion tokens
    double simulations_used = 0.0;
    std::int64_t questions = 0;
    std::int64_t failed = 0;
};

/// Mean of each metric over questions, percentages rounded to 2 decimals.
AggregateReport aggregate(const std::vector<QuestionScores>& per_question);

/// Mean of per-seed aggregates (the multi-seed protocol's outer average).
AggregateReport aggregate_seeds(const std::vector<AggregateReport>& per_seed);

/// Round to 2 decimals (report convention).
double round2(double value);

} // namespace serts
