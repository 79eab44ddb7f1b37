#include "serts/search_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "serts/error.hpp"

namespace serts {

double ucb(const SearchNode& node, const SearchNode& parent, double exploration_c, UcbForm form) {
    if (node.visit_count == 0) return std::numeric_limits<double>::infinity();
    const double mean = node.value_sum / node.visit_count;
    const double np = static_cast<double>(parent.visit_count);
    const double ns = static_cast<double>(node.visit_count);
    const double explore = form == UcbForm::log_ratio
                               ? std::sqrt(2.0 * std::log(np / ns))
                               : std::sqrt(2.0 * std::log(np) / ns);
    return mean + exploration_c * explore;
}

SearchTree::SearchTree(std::string question_text, std::vector<std::string> root_doc_ids) {
    SearchNode root;
    root.node_id = 0;
    root.depth = 0;
    root.path = "/0";
    root.query = question_text;
    root.rationale = std::move(question_text);
    root.doc_ids = std::move(root_doc_ids);
    nodes_.push_back(std::move(root));
}

std::optional<NodeId> SearchTree::select(const SearchConfig& config, std::mt19937_64& rng) const {
    NodeId current = root();
    while (static_cast<int>(node(current).children.size()) >= config.max_branch) {
        const auto& children = node(current).children;
        NodeId chosen = children.front();
        if (config.policy == SelectionPolicy::random) {
            // Bounded draw without uniform_int_distribution so replays are
            // engine-deterministic across standard library implementations.
            chosen = children[static_cast<std::size_t>(rng() % children.size())];
        } else {
            double best = -std::numeric_limits<double>::infinity();
            for (const NodeId child : children) {
                const double value = ucb(node(child), node(current), config.exploration_c,
                                         config.ucb_form);
                if (value > best) {
                    best = value;
                    chosen = child;
                }
            }
        }
        current = chosen;
    }
    if (node(current).depth >= config.max_depth) return std::nullopt;
    return current;
}

std::vector<NodeId> SearchTree::chain_to_root(NodeId id) const {
    std::vector<NodeId> chain;
    for (std::optional<NodeId> cur = id; cur.has_value(); cur = node(*cur).parent) {
        chain.push_back(*cur);
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

Observation SearchTree::assemble_observation(NodeId id) const {
    Observation obs;
    std::unordered_set<std::string> seen;
    for (const NodeId ancestor : chain_to_root(id)) {
        const SearchNode& n = node(ancestor);
        obs.ancestor_queries.push_back(n.rationale);
        for (const auto& doc_id : n.doc_ids) {
            if (seen.insert(doc_id).second) obs.ancestor_doc_ids.push_back(doc_id);
        }
    }
    for (const NodeId child : node(id).children) {
        obs.sibling_queries.push_back(node(child).query);
        obs.sibling_feedback.push_back(node(child).feedback);
    }
    return obs;
}

std::string SearchTree::next_child_path(NodeId parent) const {
    return node(parent).path + "/" + std::to_string(node(parent).children.size());
}

NodeId SearchTree::add_child(NodeId parent, std::string query, std::string rationale,
                             std::vector<std::string> doc_ids, int reward, std::string feedback,
                             int max_branch, int max_depth) {
    const SearchNode& p = node(parent);
    if (static_cast<int>(p.children.size()) >= max_branch) {
        throw InvariantError("add_child: parent " + p.path + " already has " +
                             std::to_string(p.children.size()) + " children");
    }
    if (p.depth >= max_depth) {
        throw InvariantError("add_child: parent " + p.path + " is at depth limit " +
                             std::to_string(max_depth));
    }
    SearchNode child;
    child.node_id = static_cast<NodeId>(nodes_.size());
    child.parent = parent;
    child.depth = p.depth + 1;
    child.path = next_child_path(parent);
    child.query = std::move(query);
    child.rationale = std::move(rationale);
    child.doc_ids = std::move(doc_ids);
    child.reward = reward;
    child.feedback = std::move(feedback);
    nodes_.push_back(std::move(child));
    nodes_[static_cast<std::size_t>(parent)].children.push_back(nodes_.back().node_id);
    return nodes_.back().node_id;
}

void SearchTree::backpropagate(NodeId id, double scaled_reward) {
    for (std::optional<NodeId> cur = id; cur.has_value();
         cur = nodes_[static_cast<std::size_t>(*cur)].parent) {
        SearchNode& n = nodes_[static_cast<std::size_t>(*cur)];
        n.visit_count += 1;
        n.value_sum += scaled_reward;
    }
}

NodeId SearchTree::best_node() const {
    NodeId best = root();
    for (const auto& n : nodes_) {
        const SearchNode& b = node(best);
        if (n.reward > b.reward ||
            (n.reward == b.reward &&
             (n.depth < b.depth || (n.depth == b.depth && n.node_id < b.node_id)))) {
            best = n.node_id;
        }
    }
    return best;
}

std::vector<std::string> SearchTree::path_doc_ids(NodeId id) const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const NodeId ancestor : chain_to_root(id)) {
        for (const auto& doc_id : node(ancestor).doc_ids) {
            if (seen.insert(doc_id).second) out.push_back(doc_id);
        }
    }
    return out;
}

std::string SearchTree::dump() const {
    std::ostringstream out;
    for (const auto& n : nodes_) {
        out << n.node_id << "\tparent=" << (n.parent ? std::to_string(*n.parent) : "-")
            << "\tdepth=" << n.depth << "\treward=" << n.reward << "\tvisits=" << n.visit_count
            << "\tmean=" << n.mean_value() << "\tquery=" << n.query << '\n';
    }
    return out.str();
}

} // namespace serts
