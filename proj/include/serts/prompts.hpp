#pragma once

#include <string>
#include <vector>

#include "serts/corpus.hpp"
#include "serts/search_tree.hpp"

namespace serts {

/// Judge verdict: additive rubric score plus the justification/suggestion
/// text (the score tag itself removed).
struct EvalResult {
    int score = 0; // 0..5
    std::string feedback;
};

/// Proposer action: the extracted query plus the full completion text.
struct QueryProposal {
    std::string query;
    std::string rationale;
};

/// All four renderers are pure: identical inputs produce identical bytes.
/// Placeholder substitution is literal; document text containing tag-like
/// substrings passes through untouched.

/// Result-evaluator prompt (additive 5-point rubric, <score> tag contract).
/// `docs` is the evaluated set D union ancestor docs, numbered in given order.
std::string render_eval_prompt(const Question& question, const std::vector<const Document*>& docs);

/// Query-proposer prompt: sibling proposal/feedback pairs plus the ancestor
/// queries/documents already known. Ancestor doc ids resolve through `corpus`.
std::string render_query_prompt(const Question& question, const Observation& obs,
                                const Corpus& corpus);

/// Self-reflection variant: identical to the proposer prompt minus the
/// <query_proposal> sibling block. Ignores the sibling fields entirely.
std::string render_reflect_prompt(const Question& question, const Observation& obs,
                                  const Corpus& corpus);

/// Reader prompt: instruction/input/response layout with the retrieved
/// documents concatenated (blank-line separated, in given order) as context.
std::string render_answer_prompt(const Question& question, const std::vector<const Document*>& docs);

/// Extracts the LAST <score>N</score> tag (whitespace inside the tags is
/// tolerated), clamps to [0,5], and strips that tag from the feedback text.
/// Throws ParseError when no tag parses.
EvalResult parse_score_feedback(const std::string& text);

/// Extracts the LAST <query>...</query> span, trimmed. Throws ParseError on a
/// missing tag or an empty span.
QueryProposal parse_query(const std::string& text);

} // namespace serts
