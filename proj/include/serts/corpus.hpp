#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace serts {

/// One abstract with a stable external ID. Immutable after corpus load.
struct Document {
    std::string id;
    std::string text;
    std::size_t token_count = 0; // cached length of tokenize(text)
};

struct Question {
    std::string id;
    std::string text;
    std::set<std::string> gold_doc_ids;
    std::optional<std::string> ideal_answer;
};

/// Whitespace/lowercase tokenizer shared by the index, the metrics and the
/// mock backend's token accounting. Lowercases ASCII letters, splits on
/// Unicode whitespace and strips leading/trailing ASCII punctuation from each
/// token ("Glofitamab," -> "glofitamab", "B-cell" stays hyphenated). Empty
/// tokens are dropped.
std::vector<std::string> tokenize(const std::string& text);

/// Ordered document collection plus the collection statistics BM25 needs.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs);

    const std::vector<Document>& docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    double avg_doc_len() const { return avg_doc_len_; }

    const Document& at(std::size_t ordinal) const { return docs_.at(ordinal); }

    /// Ordinal (file order) of a document id, if present.
    std::optional<std::size_t> ordinal_of(const std::string& id) const;

    /// nullptr when the id is unknown.
    const Document* find(const std::string& id) const;

    /// Resolves ids to documents, preserving order. Throws IoError on an
    /// unknown id (callers only pass ids previously produced by a search).
    std::vector<const Document*> resolve(const std::vector<std::string>& ids) const;

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
    double avg_doc_len_ = 0.0;
};

/// Loads a line-delimited corpus file ({"id","text"} per line). Rejects
/// missing/duplicate ids and malformed lines, naming the 1-based line number.
Corpus load_corpus(const std::string& path);

/// Writes the corpus back out in the same line-delimited format (round trips
/// through load_corpus).
void save_corpus(const Corpus& corpus, const std::string& path);

/// Loads a questions file ({"id","text"} plus optional "gold_doc_ids" array
/// and "ideal_answer" string per line).
std::vector<Question> load_questions(const std::string& path);

} // namespace serts
