#pragma once

#include <optional>
#include <string>
#include <vector>

#include "serts/bm25.hpp"
#include "serts/corpus.hpp"
#include "serts/gateway.hpp"
#include "serts/search_tree.hpp"

namespace serts {

enum class Method { bm25, reflection, serts };

const char* to_string(Method method);
Method method_from_string(const std::string& s);

struct RetrievalOutcome {
    std::string question_id;
    Method method = Method::bm25;
    std::vector<std::string> doc_ids; // deduplicated, root path order
    int best_reward = 0;
    int simulations_used = 0;
    std::optional<std::string> answer;
};

/// One (observation prompt, action, reward) triple per expansion.
struct TrajectoryRecord {
    std::string question_id;
    int sim_index = 0;
    NodeId node_id = 0;
    NodeId parent_id = 0;
    std::string prompt;     // rendered proposer observation
    std::string completion; // full action text
    std::string query;      // extracted query
    std::vector<std::string> doc_ids;
    int reward = 0;
    std::string feedback;
};

struct SearchResult {
    RetrievalOutcome outcome;
    std::vector<TrajectoryRecord> trajectories;
    SearchTree tree;
};

/// Plain retriever baseline: one BM25 call, no gateway traffic.
RetrievalOutcome run_bm25(const Question& question, const Bm25Index& index, int top_k);

/// Tree-search retrieval: up to config.max_sim iterations of UCB selection,
/// proposer expansion, judged evaluation of the path document set, and
/// backpropagation. A reward of 5 creates and backpropagates the child, then
/// stops. Proposer parse failures re-prompt once, then the simulation is
/// abandoned; evaluator parse failures fall back to reward 0 with the raw
/// reply as feedback.
SearchResult run_serts(const Question& question, const Bm25Index& index, const Corpus& corpus,
                       Backend& gateway, const SearchConfig& config,
                       const ChatRequest& chat_settings, std::uint64_t seed);

/// Sibling-free baseline: a linear chain of up to max_sim nodes, each
/// refining the last from its own lineage only. No UCB, no backpropagation.
SearchResult run_reflection(const Question& question, const Bm25Index& index, const Corpus& corpus,
                            Backend& gateway, const SearchConfig& config,
                            const ChatRequest& chat_settings, std::uint64_t seed);

/// One reader completion over the retrieved documents; returned verbatim.
std::string generate_answer(const Question& question, const std::vector<std::string>& doc_ids,
                            const Corpus& corpus, Backend& gateway, const ChatRequest& settings);

/// Line-delimited trajectory persistence; loading reconstructs records
/// exactly (embedded newlines and tag tokens survive).
void export_trajectories(const std::vector<TrajectoryRecord>& records, const std::string& path);
std::vector<TrajectoryRecord> import_trajectories(const std::string& path);

/// Deterministic per-question generator seed, stable across platforms.
std::uint64_t derive_rng_seed(std::uint64_t seed, const std::string& question_id);

} // namespace serts
