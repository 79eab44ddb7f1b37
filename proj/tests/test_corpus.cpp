#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <sstream>

#include "serts/corpus.hpp"
#include "serts/error.hpp"
#include "support/test_util.hpp"

using namespace serts;

TEST_CASE("tokenize basics") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("Glofitamab, B-cell lymphoma.") ==
          std::vector<std::string>{"glofitamab", "b-cell", "lymphoma"});
    CHECK(tokenize("A  a\tA") == std::vector<std::string>{"a", "a", "a"});
}

TEST_CASE("tokenize strips edge punctuation only") {
    CHECK(tokenize("(CAR-T)!") == std::vector<std::string>{"car-t"});
    CHECK(tokenize("...") .empty());
    CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
}

TEST_CASE("tokenize splits on unicode whitespace") {
    // U+00A0 no-break space and U+2003 em space both separate tokens.
    CHECK(tokenize("a b c") == std::vector<std::string>{"a", "b", "c"});
    // Non-ASCII letters pass through unchanged.
    CHECK(tokenize("Café au lait") == std::vector<std::string>{"café", "au", "lait"});
}

TEST_CASE("tokenize is idempotent on its own joined output") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        for (int i = 0; i < 12; ++i) {
            text += testutil::random_word(rng);
            text += (rng() % 4 == 0) ? ", " : " ";
            if (rng() % 5 == 0) text += "B-Cell ";
        }
        const auto tokens = tokenize(text);
        std::string joined;
        for (const auto& t : tokens) {
            if (!joined.empty()) joined += ' ';
            joined += t;
        }
        CHECK(tokenize(joined) == tokens);
    }
}

TEST_CASE("load_corpus computes stats and document fields") {
    testutil::TempDir dir;
    const auto path = dir.file("corpus.jsonl");

    SUBCASE("empty file") {
        testutil::write_file(path, "");
        const Corpus corpus = load_corpus(path);
        CHECK(corpus.empty());
        CHECK(corpus.avg_doc_len() == 0.0);
    }

    SUBCASE("two documents") {
        testutil::write_file(path,
                             "{\"id\":\"a\",\"text\":\"x y\"}\n"
                             "{\"id\":\"b\",\"text\":\"z\"}\n");
        const Corpus corpus = load_corpus(path);
        REQUIRE(corpus.size() == 2);
        CHECK(corpus.at(0).token_count == 2);
        CHECK(corpus.at(1).token_count == 1);
        CHECK(corpus.avg_doc_len() == doctest::Approx(1.5));
        CHECK(corpus.ordinal_of("b") == 1);
        CHECK(corpus.find("missing") == nullptr);
    }

    SUBCASE("duplicate id names the offending line") {
        testutil::write_file(path,
                             "{\"id\":\"a\",\"text\":\"x\"}\n"
                             "{\"id\":\"a\",\"text\":\"y\"}\n");
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 2"), IoError);
    }

    SUBCASE("malformed line is rejected with its number") {
        testutil::write_file(path, "{\"id\":\"a\",\"text\":\"x\"}\nnot json\n");
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 2"), IoError);
    }

    SUBCASE("missing field is rejected") {
        testutil::write_file(path, "{\"id\":\"a\"}\n");
        CHECK_THROWS_AS(load_corpus(path), IoError);
    }
}

TEST_CASE("corpus round trips through save/load") {
    testutil::TempDir dir;
    const auto path = dir.file("corpus.jsonl");
    testutil::write_file(path,
                         "{\"id\":\"a\",\"text\":\"Mantle cell lymphoma (MCL) is rare.\"}\n"
                         "{\"id\":\"b\",\"text\":\"CAR T cells\\nsecond line\"}\n");
    const Corpus first = load_corpus(path);
    const auto copy = dir.file("copy.jsonl");
    save_corpus(first, copy);
    const Corpus second = load_corpus(copy);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(second.at(i).id == first.at(i).id);
        CHECK(second.at(i).text == first.at(i).text);
        CHECK(second.at(i).token_count == first.at(i).token_count);
    }
}

TEST_CASE("load_questions parses optional fields") {
    testutil::TempDir dir;
    const auto path = dir.file("questions.jsonl");
    testutil::write_file(
        path,
        "{\"id\":\"q1\",\"text\":\"What disease can be treated with Glofitamab?\","
        "\"gold_doc_ids\":[\"d1\",\"d2\"],\"ideal_answer\":\"B-cell lymphoma.\"}\n"
        "{\"id\":\"q2\",\"text\":\"bare question\"}\n");
    const auto questions = load_questions(path);
    REQUIRE(questions.size() == 2);
    CHECK(questions[0].gold_doc_ids == std::set<std::string>{"d1", "d2"});
    CHECK(questions[0].ideal_answer == "B-cell lymphoma.");
    CHECK(questions[1].gold_doc_ids.empty());
    CHECK_FALSE(questions[1].ideal_answer.has_value());
}
