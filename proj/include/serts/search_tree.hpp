#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace serts {

using NodeId = int;

/// Which logarithm the UCB exploration term uses. Eq-as-typeset applies the
/// log to the visit ratio N(p)/N(s); `standard` is conventional UCT,
/// sqrt(2*ln(N(p))/N(s)).
enum class UcbForm { log_ratio, standard };

enum class SelectionPolicy { max_ucb, random };

struct SearchConfig {
    int max_sim = 12;
    int max_branch = 3;
    int max_depth = 3;
    double exploration_c = 0.1;
    int top_k = 3;
    SelectionPolicy policy = SelectionPolicy::max_ucb;
    UcbForm ucb_form = UcbForm::log_ratio;
    double reward_scale = 1.0; // applied to rewards before backpropagation
};

/// One retrieval state: the query proposal, its retrieved documents, the
/// judge's reward/feedback, and the visit statistics driving UCB.
struct SearchNode {
    NodeId node_id = 0;
    std::optional<NodeId> parent;
    int depth = 0;
    std::string path;      // "/0", "/0/2", ... (creation-order slot per level)
    std::string query;     // the executable query (root: the question itself)
    std::string rationale; // full proposer completion (root: the question)
    std::vector<std::string> doc_ids;
    int reward = 0;
    std::string feedback;
    int visit_count = 0;
    double value_sum = 0.0;
    std::vector<NodeId> children;

    double mean_value() const { return visit_count > 0 ? value_sum / visit_count : 0.0; }
};

/// Context bundle for the proposer prompt: everything already known on the
/// node's root path plus the proposals/feedback of the new child's future
/// siblings.
struct Observation {
    std::vector<std::string> ancestor_queries;  // root-to-node action texts
    std::vector<std::string> ancestor_doc_ids;  // deduplicated, root-first
    std::vector<std::string> sibling_queries;   // existing children, creation order
    std::vector<std::string> sibling_feedback;  // aligned with sibling_queries
};

/// UCB value of `node` under parent statistics. Unvisited nodes rank +inf so
/// they are explored first.
double ucb(const SearchNode& node, const SearchNode& parent, double exploration_c,
           UcbForm form = UcbForm::log_ratio);

class SearchTree {
public:
    /// Creates the root: query = rationale = the original question text,
    /// doc_ids = its retrieval results.
    SearchTree(std::string question_text, std::vector<std::string> root_doc_ids);

    const SearchNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const std::vector<SearchNode>& nodes() const { return nodes_; }
    NodeId root() const { return 0; }
    std::size_t size() const { return nodes_.size(); }

    /// Walks from the root toward the argmax-UCB child (ties -> lowest
    /// node_id; uniform child under SelectionPolicy::random) and stops at the
    /// first node with fewer than max_branch children. Returns nullopt (the
    /// skip signal) when that node sits at or beyond max_depth.
    std::optional<NodeId> select(const SearchConfig& config, std::mt19937_64& rng) const;

    /// Ancestor chain includes the node itself (its query and documents are
    /// part of what is already known when expanding it).
    Observation assemble_observation(NodeId id) const;

    /// Path string the next child of `parent` will receive.
    std::string next_child_path(NodeId parent) const;

    /// Appends a child with depth = parent.depth + 1 and zeroed statistics.
    /// Throws InvariantError when the parent already has max_branch children
    /// or sits at max_depth (pass wider limits for chain-style growth).
    NodeId add_child(NodeId parent, std::string query, std::string rationale,
                     std::vector<std::string> doc_ids, int reward, std::string feedback,
                     int max_branch, int max_depth);

    /// visit_count += 1 and value_sum += scaled_reward for the node and every
    /// ancestor up to the root.
    void backpropagate(NodeId id, double scaled_reward);

    /// Node with the highest own reward; ties break toward lower depth, then
    /// lower node_id.
    NodeId best_node() const;

    /// Document ids known on the node's root path: root-first, first
    /// occurrence kept.
    std::vector<std::string> path_doc_ids(NodeId id) const;

    /// Debug dump, one line per node.
    std::string dump() const;

private:
    std::vector<NodeId> chain_to_root(NodeId id) const; // root-first, inclusive

    std::vector<SearchNode> nodes_;
};

} // namespace serts
