#include "serts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_set>

#include "serts/corpus.hpp"

namespace serts {

namespace {

double harmonic_f1(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

using UnitCounts = std::map<std::pair<std::string, std::string>, std::int64_t>;

UnitCounts bigram_counts(const std::vector<std::string>& tokens) {
    UnitCounts counts;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        ++counts[{tokens[i], tokens[i + 1]}];
    }
    return counts;
}

// Ordered pairs (i < j) with at most `max_gap` positions skipped between them.
UnitCounts skip_bigram_counts(const std::vector<std::string>& tokens, std::size_t max_gap) {
    UnitCounts counts;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        for (std::size_t j = i + 1; j < tokens.size() && j - i - 1 <= max_gap; ++j) {
            ++counts[{tokens[i], tokens[j]}];
        }
    }
    return counts;
}

std::int64_t total(const UnitCounts& counts) {
    std::int64_t n = 0;
    for (const auto& [_, c] : counts) n += c;
    return n;
}

std::int64_t clipped_overlap(const UnitCounts& a, const UnitCounts& b) {
    std::int64_t n = 0;
    for (const auto& [unit, count] : a) {
        auto it = b.find(unit);
        if (it != b.end()) n += std::min(count, it->second);
    }
    return n;
}

RougeScores from_counts(const UnitCounts& cand, const UnitCounts& ref, RougeVariant variant) {
    RougeScores scores;
    scores.variant = variant;
    const std::int64_t overlap = clipped_overlap(cand, ref);
    const std::int64_t cand_total = total(cand);
    const std::int64_t ref_total = total(ref);
    scores.precision = cand_total > 0 ? static_cast<double>(overlap) / cand_total : 0.0;
    scores.recall = ref_total > 0 ? static_cast<double>(overlap) / ref_total : 0.0;
    scores.f1 = harmonic_f1(scores.precision, scores.recall);
    return scores;
}

} // namespace

RetrievalMetrics retrieval_metrics(const std::vector<std::string>& retrieved,
                                   const std::set<std::string>& gold) {
    std::unordered_set<std::string> unique(retrieved.begin(), retrieved.end());
    std::int64_t overlap = 0;
    for (const auto& id : unique) {
        if (gold.count(id) > 0) ++overlap;
    }
    RetrievalMetrics m;
    m.precision = unique.empty() ? 0.0 : static_cast<double>(overlap) / unique.size();
    m.recall = gold.empty() ? 0.0 : static_cast<double>(overlap) / gold.size();
    m.f1 = harmonic_f1(m.precision, m.recall);
    m.hit = overlap > 0;
    return m;
}

RougeScores rouge2(const std::string& candidate, const std::string& reference) {
    return from_counts(bigram_counts(tokenize(candidate)), bigram_counts(tokenize(reference)),
                       RougeVariant::rouge2);
}

RougeScores rouge_su4(const std::string& candidate, const std::string& reference) {
    // The begin-of-sequence marker cannot collide with tokenizer output
    // (real tokens never contain whitespace).
    static const std::string kBos = "<s >";
    auto with_bos = [](std::vector<std::string> tokens) {
        tokens.insert(tokens.begin(), kBos);
        return tokens;
    };
    std::vector<std::string> cand = tokenize(candidate);
    std::vector<std::string> ref = tokenize(reference);
    // An empty side contributes no units at all (not even the marker pair).
    UnitCounts cand_counts =
        cand.empty() ? UnitCounts{} : skip_bigram_counts(with_bos(std::move(cand)), 4);
    UnitCounts ref_counts =
        ref.empty() ? UnitCounts{} : skip_bigram_counts(with_bos(std::move(ref)), 4);
    return from_counts(cand_counts, ref_counts, RougeVariant::rougeSU4);
}

AggregateReport aggregate(const std::vector<QuestionScores>& per_question) {
    AggregateReport report;
    report.questions = static_cast<std::int64_t>(per_question.size());

    double precision = 0.0, recall = 0.0, f1 = 0.0;
    double r2_recall = 0.0, r2_f1 = 0.0, su4_recall = 0.0, su4_f1 = 0.0;
    double completion_tokens = 0.0, sims = 0.0;
    std::int64_t hits = 0, scored = 0, rouged = 0;

    for (const auto& q : per_question) {
        if (q.failed) {
            ++report.failed;
            continue;
        }
        ++scored;
        precision += q.retrieval.precision;
        recall += q.retrieval.recall;
        f1 += q.retrieval.f1;
        if (q.retrieval.hit) ++hits;
        completion_tokens += static_cast<double>(q.completion_tokens);
        sims += q.simulations_used;
        if (q.rouge2.has_value() && q.rouge_su4.has_value()) {
            ++rouged;
            r2_recall += q.rouge2->recall;
            r2_f1 += q.rouge2->f1;
            su4_recall += q.rouge_su4->recall;
            su4_f1 += q.rouge_su4->f1;
        }
    }

    if (scored > 0) {
        report.precision = round2(100.0 * precision / scored);
        report.recall = round2(100.0 * recall / scored);
        report.f1 = round2(100.0 * f1 / scored);
        report.hit_rate = round2(100.0 * static_cast<double>(hits) / scored);
        report.tokens_per_question = round2(completion_tokens / scored);
        report.simulations_used = round2(sims / scored);
    }
    if (rouged > 0) {
        report.rouge2_recall = round2(100.0 * r2_recall / rouged);
        report.rouge2_f1 = round2(100.0 * r2_f1 / rouged);
        report.rouge_su4_recall = round2(100.0 * su4_recall / rouged);
        report.rouge_su4_f1 = round2(100.0 * su4_f1 / rouged);
    }
    return report;
}

AggregateReport aggregate_seeds(const std::vector<AggregateReport>& per_seed) {
    AggregateReport report;
    if (per_seed.empty()) return report;

    double precision = 0.0, recall = 0.0, f1 = 0.0, hit_rate = 0.0;
    double tokens = 0.0, sims = 0.0;
    double r2_recall = 0.0, r2_f1 = 0.0, su4_recall = 0.0, su4_f1 = 0.0;
    std::int64_t rouged = 0;

    for (const auto& seed : per_seed) {
        precision += seed.precision;
        recall += seed.recall;
        f1 += seed.f1;
        hit_rate += seed.hit_rate;
        tokens += seed.tokens_per_question;
        sims += seed.simulations_used;
        report.questions += seed.questions;
        report.failed += seed.failed;
        if (seed.rouge2_recall.has_value()) {
            ++rouged;
            r2_recall += *seed.rouge2_recall;
            r2_f1 += seed.rouge2_f1.value_or(0.0);
            su4_recall += seed.rouge_su4_recall.value_or(0.0);
            su4_f1 += seed.rouge_su4_f1.value_or(0.0);
        }
    }

    const double n = static_cast<double>(per_seed.size());
    report.precision = round2(precision / n);
    report.recall = round2(recall / n);
    report.f1 = round2(f1 / n);
    report.hit_rate = round2(hit_rate / n);
    report.tokens_per_question = round2(tokens / n);
    report.simulations_used = round2(sims / n);
    if (rouged > 0) {
        report.rouge2_recall = round2(r2_recall / rouged);
        report.rouge2_f1 = round2(r2_f1 / rouged);
        report.rouge_su4_recall = round2(su4_recall / rouged);
        report.rouge_su4_f1 = round2(su4_f1 / rouged);
    }
    return report;
}

double round2(double value) {
    return std::round(value * 100.0) / 100.0;
}

} // namespace serts
