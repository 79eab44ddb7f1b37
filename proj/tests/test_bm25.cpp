#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "serts/bm25.hpp"
#include "serts/error.hpp"
#include "support/bm25_oracle.hpp"
#include "support/test_util.hpp"

using namespace serts;

namespace {

std::shared_ptr<const Corpus> make_corpus(const std::vector<std::pair<std::string, std::string>>& docs) {
    std::vector<Document> out;
    for (const auto& [id, text] : docs) {
        out.push_back({id, text, tokenize(text).size()});
    }
    return std::make_shared<const Corpus>(std::move(out));
}

testutil::Bm25Oracle oracle_for(const Corpus& corpus, const Bm25Params& params) {
    std::vector<testutil::OracleDoc> docs;
    for (const auto& doc : corpus.docs()) docs.push_back({doc.id, tokenize(doc.text)});
    return {std::move(docs), params.k1, params.b};
}

} // namespace

TEST_CASE("build_index counts statistics") {
    SUBCASE("empty corpus") {
        const auto index = Bm25Index::build(make_corpus({}));
        CHECK(index.doc_count() == 0);
        CHECK(index.search("anything", 5).empty());
    }

    SUBCASE("two documents") {
        const auto index = Bm25Index::build(make_corpus({{"d1", "a b"}, {"d2", "a"}}));
        CHECK(index.doc_freq("a") == 2);
        CHECK(index.doc_freq("b") == 1);
        CHECK(index.doc_freq("zzz") == 0);
    }
}

TEST_CASE("index invariants hold on random corpora") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::pair<std::string, std::string>> docs;
        for (int i = 0; i < 100; ++i) {
            docs.emplace_back("d" + std::to_string(i), testutil::random_sentence(rng, 20));
        }
        const auto corpus = make_corpus(docs);
        const auto index = Bm25Index::build(corpus);

        // Naive recount oracle: term/document statistics from raw token scans.
        std::vector<std::size_t> tf_sum(corpus->size(), 0);
        std::set<std::string> vocabulary;
        for (const auto& doc : corpus->docs()) {
            for (const auto& term : tokenize(doc.text)) vocabulary.insert(term);
        }
        for (const auto& term : vocabulary) {
            const auto* plist = index.postings(term);
            REQUIRE(plist != nullptr);
            CHECK(index.doc_freq(term) == plist->size());
            std::size_t naive_df = 0;
            for (const auto& doc : corpus->docs()) {
                const auto tokens = tokenize(doc.text);
                if (std::count(tokens.begin(), tokens.end(), term) > 0) ++naive_df;
            }
            CHECK(index.doc_freq(term) == naive_df);
            for (const auto& [ord, tf] : *plist) tf_sum[ord] += tf;
        }
        for (std::size_t ord = 0; ord < corpus->size(); ++ord) {
            CHECK(tf_sum[ord] == corpus->at(ord).token_count);
        }
    }
}

TEST_CASE("idf matches the closed form") {
    // N=2, n=0 -> ln 6; N=1, n=1 -> ln(4/3). Values frozen from the formula.
    const auto two_docs = Bm25Index::build(make_corpus({{"d1", "x y"}, {"d2", "x"}}));
    CHECK(two_docs.idf("absent") == doctest::Approx(1.791759469228055).epsilon(1e-12));

    const auto one_doc = Bm25Index::build(make_corpus({{"d1", "term"}}));
    CHECK(one_doc.idf("term") == doctest::Approx(0.28768207245178085).epsilon(1e-12));
}

TEST_CASE("idf is positive even for a term in every document") {
    std::vector<std::pair<std::string, std::string>> docs;
    for (int i = 0; i < 500; ++i) docs.emplace_back("d" + std::to_string(i), "common filler");
    const auto index = Bm25Index::build(make_corpus(docs));
    CHECK(index.idf("common") > 0.0);
}

TEST_CASE("score edge cases") {
    const auto corpus = make_corpus({{"d1", "glofitamab treats relapsed lymphoma"},
                                     {"d2", "car t cells"},
                                     {"d3", "glofitamab dosing"}});
    const auto index = Bm25Index::build(corpus);

    CHECK(index.score({"unrelated"}, "d1") == 0.0);
    CHECK(index.score({}, "d1") == 0.0);
    CHECK_THROWS_AS(index.score({"glofitamab"}, "nope"), InvariantError);

    // By hand: N=3, avgdl=3, n(glofitamab)=2 -> idf = ln(1.5/2.5 + 1) = ln 1.6.
    // d1: tf=1, |d|=4 -> 1*(2.2) / (1 + 1.2*(0.25 + 0.75*4/3)) = 2.2/2.5 = 0.88
    // score = 0.88 * ln 1.6 = 0.41360319373624716
    const auto oracle = oracle_for(*corpus, index.params());
    const double expect = oracle.score({"glofitamab"}, 0);
    CHECK(expect == doctest::Approx(0.41360319373624716).epsilon(1e-9));
    CHECK(index.score({"glofitamab"}, "d1") == doctest::Approx(expect).epsilon(1e-9));
    CHECK(index.score({"glofitamab"}, "d1") == expect); // and bit-for-bit
}

TEST_CASE("duplicate query terms contribute per occurrence") {
    const auto corpus = make_corpus({{"d1", "a b"}, {"d2", "a c"}});
    const auto index = Bm25Index::build(corpus);
    const double once = index.score({"a"}, "d1");
    const double twice = index.score({"a", "a"}, "d1");
    CHECK(twice == doctest::Approx(2.0 * once).epsilon(1e-12));
}

TEST_CASE("search ranks by score with ordinal tie-break") {
    const auto corpus = make_corpus({{"d1", "a x"}, {"d2", "a x"}, {"d3", "b"}});
    const auto index = Bm25Index::build(corpus);

    SUBCASE("unknown query term yields nothing") {
        CHECK(index.search("zzz", 3).empty());
    }

    SUBCASE("equal scores keep file order") {
        const auto hits = index.search("a", 3);
        REQUIRE(hits.size() == 2);
        CHECK(hits[0].doc_id == "d1");
        CHECK(hits[1].doc_id == "d2");
        CHECK(hits[0].score == hits[1].score);
    }

    SUBCASE("zero-score documents are excluded") {
        const auto hits = index.search("a b", 3);
        REQUIRE(hits.size() == 3); // d3 matches "b"
        for (const auto& hit : hits) CHECK(hit.score > 0.0);
    }
}

TEST_CASE("search equals exhaustive oracle scoring on random corpora") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 120; ++trial) {
        std::vector<std::pair<std::string, std::string>> docs;
        const int n_docs = 1 + static_cast<int>(rng() % 20);
        for (int i = 0; i < n_docs; ++i) {
            docs.emplace_back("d" + std::to_string(i), testutil::random_sentence(rng, 12));
        }
        const auto corpus = make_corpus(docs);
        const auto index = Bm25Index::build(corpus);
        const auto oracle = oracle_for(*corpus, index.params());

        const std::string query = testutil::random_sentence(rng, 6);
        const auto got = index.search(query, 3);
        const auto want = oracle.search(tokenize(query), 3);

        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].doc_id == want[i].first);
            CHECK(got[i].score == want[i].second); // bit-for-bit
        }
    }
}

TEST_CASE("search(k) is a prefix of search(k+1)") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::pair<std::string, std::string>> docs;
        for (int i = 0; i < 15; ++i) {
            docs.emplace_back("d" + std::to_string(i), testutil::random_sentence(rng, 10));
        }
        const auto index = Bm25Index::build(make_corpus(docs));
        const std::string query = testutil::random_sentence(rng, 5);
        for (std::size_t k = 1; k < 6; ++k) {
            const auto small = index.search(query, k);
            const auto large = index.search(query, k + 1);
            REQUIRE(small.size() <= large.size());
            for (std::size_t i = 0; i < small.size(); ++i) {
                CHECK(small[i].doc_id == large[i].doc_id);
                CHECK(small[i].score == large[i].score);
            }
        }
    }
}

TEST_CASE("scores are never negative") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, std::string>> docs;
        for (int i = 0; i < 8; ++i) {
            docs.emplace_back("d" + std::to_string(i), testutil::random_sentence(rng, 6));
        }
        const auto corpus = make_corpus(docs);
        const auto index = Bm25Index::build(corpus);
        const auto query_terms = tokenize(testutil::random_sentence(rng, 4));
        for (const auto& doc : corpus->docs()) {
            CHECK(index.score(query_terms, doc.id) >= 0.0);
        }
    }
}

TEST_CASE("index persists and round trips to identical search results") {
    testutil::TempDir dir;
    std::mt19937_64 rng(53);
    std::vector<std::pair<std::string, std::string>> docs;
    for (int i = 0; i < 25; ++i) {
        docs.emplace_back("d" + std::to_string(i), testutil::random_sentence(rng, 10));
    }
    const auto index = Bm25Index::build(make_corpus(docs));
    const auto path = dir.file("index.json");
    index.save(path);
    const Bm25Index loaded = Bm25Index::load(path);

    CHECK(loaded.doc_count() == index.doc_count());
    CHECK(loaded.avgdl() == index.avgdl());
    for (int trial = 0; trial < 30; ++trial) {
        const std::string query = testutil::random_sentence(rng, 5);
        const auto a = index.search(query, 4);
        const auto b = loaded.search(query, 4);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].doc_id == b[i].doc_id);
            CHECK(a[i].score == b[i].score);
        }
    }

    CHECK_THROWS_AS(Bm25Index::load(dir.file("missing.json")), IoError);
    testutil::write_file(dir.file("bad.json"), "{\"format\":\"other\"}");
    CHECK_THROWS_AS(Bm25Index::load(dir.file("bad.json")), IoError);
}
