#include "serts/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "serts/error.hpp"

namespace serts {

namespace {
constexpr const char* kIndexFormat = "serts-bm25-index";
constexpr int kIndexVersion = 1;
} // namespace

Bm25Index Bm25Index::build(std::shared_ptr<const Corpus> corpus, Bm25Params params) {
    Bm25Index index;
    index.params_ = params;
    index.corpus_ = std::move(corpus);
    const Corpus& c = *index.corpus_;

    index.avgdl_ = c.avg_doc_len();
    index.doc_ids_.reserve(c.size());
    index.doc_lens_.reserve(c.size());

    for (std::size_t ord = 0; ord < c.size(); ++ord) {
        const Document& doc = c.at(ord);
        index.doc_ids_.push_back(doc.id);
        index.doc_lens_.push_back(static_cast<std::uint32_t>(doc.token_count));
        index.ordinal_by_id_.emplace(doc.id, ord);

        std::map<std::string, std::uint32_t> tf; // ordered so postings grow deterministically
        for (const auto& term : tokenize(doc.text)) ++tf[term];
        for (const auto& [term, freq] : tf) {
            index.postings_[term].emplace_back(static_cast<std::uint32_t>(ord), freq);
            ++index.doc_freq_[term];
        }
    }
    return index;
}

std::uint32_t Bm25Index::doc_freq(const std::string& term) const {
    auto it = doc_freq_.find(term);
    return it == doc_freq_.end() ? 0u : it->second;
}

const std::vector<std::pair<std::uint32_t, std::uint32_t>>*
Bm25Index::postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

double Bm25Index::idf(const std::string& term) const {
    const double n = static_cast<double>(doc_freq(term));
    const double N = static_cast<double>(doc_ids_.size());
    return std::log((N - n + 0.5) / (n + 0.5) + 1.0);
}

double Bm25Index::term_doc_score(double idf_value, std::uint32_t tf, std::uint32_t doc_len) const {
    const double f = static_cast<double>(tf);
    const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len) / avgdl_;
    return idf_value * (f * (params_.k1 + 1.0)) / (f + params_.k1 * norm);
}

double Bm25Index::score(const std::vector<std::string>& query_terms, const std::string& doc_id) const {
    auto it = ordinal_by_id_.find(doc_id);
    if (it == ordinal_by_id_.end()) {
        throw InvariantError("score() on a document not in the indexed corpus: " + doc_id);
    }
    const auto ord = static_cast<std::uint32_t>(it->second);

    double total = 0.0;
    for (const auto& term : query_terms) {
        const auto* plist = postings(term);
        if (plist == nullptr) continue;
        auto pit = std::lower_bound(plist->begin(), plist->end(), ord,
                                    [](const auto& entry, std::uint32_t o) { return entry.first < o; });
        if (pit == plist->end() || pit->first != ord) continue;
        total += term_doc_score(idf(term), pit->second, doc_lens_[ord]);
    }
    return total;
}

std::vector<ScoredHit> Bm25Index::search(const std::string& query, std::size_t top_k) const {
    return search_terms(tokenize(query), top_k);
}

std::vector<ScoredHit> Bm25Index::search_terms(const std::vector<std::string>& query_terms,
                                               std::size_t top_k) const {
    std::vector<double> scores(doc_ids_.size(), 0.0);
    // Accumulation visits terms in query order, so each document's partial
    // sums add in the same order as a per-document term-by-term evaluation;
    // results match the exhaustive path bit for bit.
    for (const auto& term : query_terms) {
        const auto* plist = postings(term);
        if (plist == nullptr) continue;
        const double idf_value = idf(term);
        for (const auto& [ord, tf] : *plist) {
            scores[ord] += term_doc_score(idf_value, tf, doc_lens_[ord]);
        }
    }

    std::vector<std::uint32_t> hits;
    for (std::uint32_t ord = 0; ord < scores.size(); ++ord) {
        if (scores[ord] > 0.0) hits.push_back(ord);
    }
    std::sort(hits.begin(), hits.end(), [&scores](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    if (hits.size() > top_k) hits.resize(top_k);

    std::vector<ScoredHit> out;
    out.reserve(hits.size());
    for (const auto ord : hits) out.push_back({doc_ids_[ord], scores[ord]});
    return out;
}

void Bm25Index::save(const std::string& path) const {
    nlohmann::json postings_json = nlohmann::json::object();
    for (const auto& [term, plist] : postings_) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& [ord, tf] : plist) entries.push_back({ord, tf});
        postings_json[term] = std::move(entries);
    }
    const nlohmann::json payload{
        {"format", kIndexFormat},
        {"version", kIndexVersion},
        {"k1", params_.k1},
        {"b", params_.b},
        {"avgdl", avgdl_},
        {"doc_ids", doc_ids_},
        {"doc_lens", doc_lens_},
        {"postings", std::move(postings_json)},
    };
    std::ofstream out(path);
    if (!out) throw IoError("cannot write index file: " + path);
    out << payload.dump() << '\n';
    if (!out) throw IoError("failed writing index file: " + path);
}

Bm25Index Bm25Index::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open index file: " + path);
    nlohmann::json payload = nlohmann::json::parse(in, nullptr, false);
    if (payload.is_discarded() || !payload.is_object()) {
        throw IoError("malformed index file: " + path);
    }
    if (payload.value("format", "") != kIndexFormat) {
        throw IoError(path + ": not a bm25 index file");
    }
    if (payload.value("version", 0) != kIndexVersion) {
        throw IoError(path + ": unsupported index version");
    }

    Bm25Index index;
    index.params_.k1 = payload.at("k1").get<double>();
    index.params_.b = payload.at("b").get<double>();
    index.avgdl_ = payload.at("avgdl").get<double>();
    index.doc_ids_ = payload.at("doc_ids").get<std::vector<std::string>>();
    index.doc_lens_ = payload.at("doc_lens").get<std::vector<std::uint32_t>>();
    if (index.doc_ids_.size() != index.doc_lens_.size()) {
        throw IoError(path + ": doc_ids/doc_lens length mismatch");
    }
    for (std::size_t ord = 0; ord < index.doc_ids_.size(); ++ord) {
        index.ordinal_by_id_.emplace(index.doc_ids_[ord], ord);
    }
    for (const auto& [term, entries] : payload.at("postings").items()) {
        auto& plist = index.postings_[term];
        for (const auto& entry : entries) {
            plist.emplace_back(entry.at(0).get<std::uint32_t>(), entry.at(1).get<std::uint32_t>());
        }
        index.doc_freq_[term] = static_cast<std::uint32_t>(plist.size());
    }
    return index;
}

} // namespace serts
