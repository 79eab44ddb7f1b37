#include "serts/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "serts/error.hpp"

namespace serts {

namespace {

// Evaluator template, Table-1 wording with the additive rubric inlined.
// Mixed ASCII/typographic apostrophes are kept exactly as published.
constexpr const char* kEvalHeader =
    "You are a medical expert. Review the user's question and rate the corresponding retrieved "
    "knowledge using the additive 5-point scoring system described below. Points are accumulated "
    "based on the satisfaction of each criterion:\n";

constexpr const char* kRubrics =
    "- Add 1 point if the knowledge is relevant and provides some information related to the "
    "user's inquiry, even if it is incomplete or contains some irrelevant content.\n"
    "- Add another point if the knowledge addresses a substantial portion of the user’s "
    "question, but does not completely resolve the query or provide a direct answer.\n"
    "- Award a third point if the response answers the basic elements of the user’s question "
    "in a useful way, regardless of whether it seems to have been written by an AI Assistant or "
    "if it has elements typically found in blogs or search results.\n"
    "- Grant a fourth point if the knowledge addresses the user’s question directly and "
    "comprehensively, even if there is slight room for improvement in clarity, conciseness, or "
    "focus.\n"
    "- Bestow a fifth point for knowledge that is impeccably tailored to the user’s "
    "question, without extraneous information, reflecting expert knowledge, and can be used to "
    "produce a high-quality, engaging, and insightful answer.\n";

constexpr const char* kEvalFooter =
    "\n"
    "After examining the user’s instruction and the response:\n"
    "-Briefly justify your total score, up to 100 words. Remember to assess from the AI "
    "Assistant perspective, utilizing web search knowledge as necessary. To evaluate the "
    "response in alignment with this additive scoring model, we’ll systematically attribute "
    "points based on the outlined criteria.\n"
    "-Give suggestions for constructing better queries up to 100 words.\n"
    "\n"
    "Conclude with a score between 0 and 5, strictly using the aforementioned additive 5-point "
    "scoring system and the format: “<score> Integer Score </score>”. For example, "
    "<score>3</score>.";

constexpr const char* kProposerIntroA =
    "You are a medical expert, and you are tasked with searching for as much useful knowledge "
    "from a database of medical paper abstracts as possible to address the user’s question. "
    "The question is stated as follows: ";

constexpr const char* kProposerIntroB =
    "\n"
    "\n"
    "You are given the BM25 retriever as the search tool. According to previous query proposals "
    "and proposals' corresponding feedback and suggestions, give one single better query for the "
    "retriever to further search for extra information needed for answering the given "
    "question.\n"
    "\n";

constexpr const char* kProposerFooter =
    "\n"
    "After examining the information above, justify your decision, in up to 100 words.\n"
    "\n"
    "Hints:\n"
    "1. Use simple keywords as queries if no information is retrieved.\n"
    "2. You can take one step at a time, subdivide the original question, and search for "
    "information on the sub-questions.\n"
    "\n"
    "Conclude with the query for the paper abstracts using the format: \"<query> Query Here "
    "</query>\".";

constexpr const char* kAnswerTemplate =
    "You are an expert in the field of biomedical science.\n"
    "\n"
    "Below is an instruction that describes a task, paired with an input that provides further "
    "context. Write a response that appropriately completes the request.\n"
    "\n"
    "### Instruction:\n";

// "1. text" entries separated by blank lines, trailing newline when non-empty.
std::string numbered_list(const std::vector<std::string>& entries) {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0) out += "\n";
        out += std::to_string(i + 1) + ". " + entries[i] + "\n";
    }
    return out;
}

std::string numbered_doc_list(const std::vector<const Document*>& docs) {
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out += "\n";
        out += std::to_string(i + 1) + ". " + docs[i]->text + "\n";
    }
    return out;
}

// <retrieved_info> contents: the two already-known lists, each wrapped in
// <start>/<end>. Collapses to nothing when there are no ancestors at all.
std::string retrieved_info_block(const Observation& obs, const Corpus& corpus) {
    std::string out = "Information already known is as follows:<retrieved_info>\n";
    if (!obs.ancestor_queries.empty() || !obs.ancestor_doc_ids.empty()) {
        out += "    Query and its reasoning for Abstracts: <start>\n";
        out += numbered_list(obs.ancestor_queries);
        out += "    <end>\n";
        out += "\n";
        out += "    Retrieved Abstracts: <start>\n";
        std::vector<std::string> texts;
        texts.reserve(obs.ancestor_doc_ids.size());
        for (const Document* doc : corpus.resolve(obs.ancestor_doc_ids)) texts.push_back(doc->text);
        out += numbered_list(texts);
        out += "    <end>\n";
    }
    out += "</retrieved_info>\n";
    return out;
}

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

// Last regex match in the text, if any.
bool last_match(const std::string& text, const std::regex& re, std::smatch& out) {
    bool found = false;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
        out = *it;
        found = true;
    }
    return found;
}

} // namespace

std::string render_eval_prompt(const Question& question, const std::vector<const Document*>& docs) {
    std::string out = kEvalHeader;
    out += kRubrics;
    out += "\n";
    out += "<question> " + question.text + " </question>\n";
    out += "<retrieved_knowledge>\n";
    out += numbered_doc_list(docs);
    out += "</retrieved_knowledge>\n";
    out += kEvalFooter;
    return out;
}

std::string render_query_prompt(const Question& question, const Observation& obs,
                                const Corpus& corpus) {
    std::string out = kProposerIntroA + question.text + kProposerIntroB;
    out += "<query_proposal>\n";
    for (std::size_t i = 0; i < obs.sibling_queries.size(); ++i) {
        out += std::to_string(i + 1) + ". " + obs.sibling_queries[i] +
               "    Corresponding Feedback: " + obs.sibling_feedback[i] + "\n";
    }
    out += "</query_proposal>\n";
    out += "\n";
    out += retrieved_info_block(obs, corpus);
    out += kProposerFooter;
    return out;
}

std::string render_reflect_prompt(const Question& question, const Observation& obs,
                                  const Corpus& corpus) {
    std::string out = kProposerIntroA + question.text + kProposerIntroB;
    out += retrieved_info_block(obs, corpus);
    out += kProposerFooter;
    return out;
}

std::string render_answer_prompt(const Question& question, const std::vector<const Document*>& docs) {
    std::string context;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) context += "\n\n";
        context += docs[i]->text;
    }
    std::string out = kAnswerTemplate;
    out += question.text + "\n";
    out += "\n";
    out += "### Input:\n";
    out += context + "\n";
    out += "\n";
    out += "### Response:\n";
    return out;
}

EvalResult parse_score_feedback(const std::string& text) {
    static const std::regex re("<score>\\s*([+-]?\\d+)\\s*</score>");
    std::smatch m;
    if (!last_match(text, re, m)) {
        throw ParseError("no <score>N</score> tag in evaluator reply");
    }
    long value = 0;
    try {
        value = std::stol(m[1].str());
    } catch (const std::out_of_range&) {
        value = m[1].str().front() == '-' ? -1 : 6;
    }
    EvalResult result;
    result.score = static_cast<int>(std::clamp<long>(value, 0, 5));
    result.feedback = text.substr(0, static_cast<std::size_t>(m.position(0))) +
                      text.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
    return result;
}

QueryProposal parse_query(const std::string& text) {
    static const std::regex re("<query>([\\s\\S]*?)</query>");
    std::smatch m;
    if (!last_match(text, re, m)) {
        throw ParseError("no <query>...</query> tag in proposer reply");
    }
    QueryProposal proposal;
    proposal.query = trim(m[1].str());
    if (proposal.query.empty()) {
        throw ParseError("empty <query>...</query> span in proposer reply");
    }
    proposal.rationale = text;
    return proposal;
}

} // namespace serts
