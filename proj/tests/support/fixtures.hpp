#pragma once

// End-to-end fixtures: corpus/questions/mock-script files whose scripted
// replies cover every tree path a default-budget search can touch, so any
// selection order stays within the script.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace testutil {

inline std::uint64_t mix_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline void write_fixture_corpus(const std::string& path, int n_docs) {
    std::ofstream out(path);
    for (int i = 0; i < n_docs; ++i) {
        const nlohmann::json rec{
            {"id", "d" + std::to_string(i)},
            {"text", "t" + std::to_string(i) + " common biomedical abstract text"},
        };
        out << rec.dump() << '\n';
    }
}

inline void write_fixture_questions(const std::string& path, int n_questions, int n_docs,
                                    bool with_ideal_answers) {
    std::ofstream out(path);
    for (int i = 0; i < n_questions; ++i) {
        nlohmann::json rec{
            {"id", "q" + std::to_string(i)},
            {"text", "t" + std::to_string(i % n_docs) + " t" + std::to_string((i + 1) % n_docs)},
            {"gold_doc_ids", {"d" + std::to_string(i % n_docs),
                              "d" + std::to_string((i + 2) % n_docs)}},
        };
        if (with_ideal_answers) {
            rec["ideal_answer"] = "the condition responds to therapy t" + std::to_string(i % n_docs);
        }
        out << rec.dump() << '\n';
    }
}

/// Every possible child path under branch 3 / depth 3, plus the reflection
/// chain down to `chain_depth`.
inline std::vector<std::string> all_fixture_paths(int chain_depth = 12) {
    std::vector<std::string> paths;
    for (int i = 0; i < 3; ++i) {
        const std::string p1 = "/0/" + std::to_string(i);
        paths.push_back(p1);
        for (int j = 0; j < 3; ++j) {
            const std::string p2 = p1 + "/" + std::to_string(j);
            paths.push_back(p2);
            for (int k = 0; k < 3; ++k) paths.push_back(p2 + "/" + std::to_string(k));
        }
    }
    std::string chain = "/0/0";
    for (int d = 2; d <= chain_depth; ++d) {
        chain += "/0";
        paths.push_back(chain);
    }
    return paths;
}

/// Scripted replies for every question and path. Rewards are a deterministic
/// hash of (question, path, salt) in [0, max_reward].
inline void write_fixture_script(const std::string& path, int n_questions, int n_docs,
                                 int max_reward = 4, const std::string& salt = "",
                                 int chain_depth = 12) {
    std::ofstream out(path);
    for (int qi = 0; qi < n_questions; ++qi) {
        const std::string qid = "q" + std::to_string(qi);
        for (const auto& node_path : all_fixture_paths(chain_depth)) {
            const std::uint64_t h = mix_hash(qid + node_path + salt);
            const int reward = static_cast<int>(h % static_cast<std::uint64_t>(max_reward + 1));
            const std::string term = "t" + std::to_string(h % n_docs);
            const nlohmann::json propose{
                {"question_id", qid},
                {"node_path", node_path},
                {"role", "propose"},
                {"reply", "Refining toward " + term + ".\n<query>" + term + " common</query>"},
            };
            const nlohmann::json evaluate{
                {"question_id", qid},
                {"node_path", node_path},
                {"role", "evaluate"},
                {"reply", "Covers " + term + " partially. <score>" + std::to_string(reward) +
                              "</score>"},
            };
            out << propose.dump() << '\n' << evaluate.dump() << '\n';
        }
        const nlohmann::json answer{
            {"question_id", qid},
            {"node_path", ""},
            {"role", "answer"},
            {"reply", "the condition responds to therapy t" + std::to_string(qi % n_docs)},
        };
        out << answer.dump() << '\n';
    }
}

} // namespace testutil
