#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "serts/corpus.hpp"

namespace serts {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct ScoredHit {
    std::string doc_id;
    double score = 0.0;
};

/// Okapi BM25 inverted index.
///
///   score(q,d) = sum_i IDF(q_i) * f(q_i,d)*(k1+1) / (f(q_i,d) + k1*(1 - b + b*|d|/avgdl))
///   IDF(q_i)   = ln((N - n(q_i) + 0.5) / (n(q_i) + 0.5) + 1)
///
/// The +1 inside the log keeps every IDF strictly positive, so a document
/// scores 0 exactly when it shares no term with the query. Query terms
/// contribute once per occurrence (duplicates count twice). Results are
/// ordered by descending score, ties broken by ascending corpus ordinal.
class Bm25Index {
public:
    Bm25Index() = default;

    static Bm25Index build(std::shared_ptr<const Corpus> corpus, Bm25Params params = {});

    const Bm25Params& params() const { return params_; }
    std::size_t doc_count() const { return doc_ids_.size(); }
    double avgdl() const { return avgdl_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::vector<std::uint32_t>& doc_lens() const { return doc_lens_; }

    /// Corpus used at build time; null for an index loaded from disk.
    const std::shared_ptr<const Corpus>& corpus() const { return corpus_; }

    /// n(q_i): number of documents containing the term (0 for unknown terms).
    std::uint32_t doc_freq(const std::string& term) const;

    /// Postings list for a term (doc ordinal, term frequency), ordinal-ascending.
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>* postings(const std::string& term) const;

    double idf(const std::string& term) const;

    /// Full-document score for an explicit term sequence. The document must
    /// belong to the indexed corpus (throws InvariantError otherwise).
    double score(const std::vector<std::string>& query_terms, const std::string& doc_id) const;

    /// Tokenizes the query and returns the top_k positive-score documents.
    std::vector<ScoredHit> search(const std::string& query, std::size_t top_k) const;
    std::vector<ScoredHit> search_terms(const std::vector<std::string>& query_terms,
                                        std::size_t top_k) const;

    /// Single-file persistence with a version tag. A loaded index returns
    /// identical search results but carries no corpus text.
    void save(const std::string& path) const;
    static Bm25Index load(const std::string& path);

private:
    double term_doc_score(double idf_value, std::uint32_t tf, std::uint32_t doc_len) const;

    Bm25Params params_;
    double avgdl_ = 0.0;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lens_;
    std::unordered_map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>> postings_;
    std::unordered_map<std::string, std::uint32_t> doc_freq_;
    std::unordered_map<std::string, std::size_t> ordinal_by_id_;
    std::shared_ptr<const Corpus> corpus_;
};

} // namespace serts
