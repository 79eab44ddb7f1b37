#include "serts/orchestrator.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "serts/error.hpp"
#include "serts/prompts.hpp"

namespace serts {

namespace {

std::vector<std::string> hit_ids(const std::vector<ScoredHit>& hits) {
    std::vector<std::string> ids;
    ids.reserve(hits.size());
    for (const auto& hit : hits) ids.push_back(hit.doc_id);
    return ids;
}

void append_unseen(std::vector<std::string>& ids, const std::vector<std::string>& extra) {
    std::unordered_set<std::string> seen(ids.begin(), ids.end());
    for (const auto& id : extra) {
        if (seen.insert(id).second) ids.push_back(id);
    }
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// One expansion: propose (one re-prompt allowed), retrieve, evaluate the
// path's accumulated document set, append the child. Returns the new node or
// nullopt when the simulation was abandoned on a second proposer failure.
std::optional<NodeId> expand_node(SearchTree& tree, NodeId target, const Question& question,
                                  const Bm25Index& index, const Corpus& corpus, Backend& gateway,
                                  const SearchConfig& config, const ChatRequest& chat_settings,
                                  bool with_siblings, int max_branch, int max_depth,
                                  int sim_index, std::vector<TrajectoryRecord>& records) {
    const Observation obs = tree.assemble_observation(target);
    const std::string prompt = with_siblings ? render_query_prompt(question, obs, corpus)
                                             : render_reflect_prompt(question, obs, corpus);
    const std::string child_path = tree.next_child_path(target);

    ChatRequest request = chat_settings;
    request.prompt = prompt;
    const CallKey propose_key{question.id, child_path, CallRole::propose};

    std::optional<QueryProposal> proposal;
    for (int attempt = 0; attempt < 2 && !proposal.has_value(); ++attempt) {
        const ChatResponse response = gateway.complete(request, propose_key);
        try {
            proposal = parse_query(response.text);
        } catch (const ParseError&) {
            // one re-prompt of the same node, then the simulation is abandoned
        }
    }
    if (!proposal.has_value()) return std::nullopt;

    const std::vector<std::string> new_doc_ids = hit_ids(index.search(proposal->query, config.top_k));

    std::vector<std::string> evaluated_ids = tree.path_doc_ids(target);
    append_unseen(evaluated_ids, new_doc_ids);

    request.prompt = render_eval_prompt(question, corpus.resolve(evaluated_ids));
    const CallKey evaluate_key{question.id, child_path, CallRole::evaluate};
    const ChatResponse eval_response = gateway.complete(request, evaluate_key);

    int reward = 0;
    std::string feedback;
    try {
        EvalResult result = parse_score_feedback(eval_response.text);
        reward = result.score;
        feedback = std::move(result.feedback);
    } catch (const ParseError&) {
        feedback = eval_response.text; // fallback keeps the tree rewarded
    }

    const NodeId child = tree.add_child(target, proposal->query, proposal->rationale, new_doc_ids,
                                        reward, feedback, max_branch, max_depth);
    records.push_back({question.id, sim_index, child, target, prompt, proposal->rationale,
                       proposal->query, new_doc_ids, reward, feedback});
    return child;
}

RetrievalOutcome finish_outcome(const SearchTree& tree, const Question& question, Method method,
                                int simulations_used) {
    const NodeId best = tree.best_node();
    RetrievalOutcome outcome;
    outcome.question_id = question.id;
    outcome.method = method;
    outcome.doc_ids = tree.path_doc_ids(best);
    outcome.best_reward = tree.node(best).reward;
    outcome.simulations_used = simulations_used;
    return outcome;
}

} // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::bm25: return "bm25";
        case Method::reflection: return "reflection";
        case Method::serts: return "serts";
    }
    return "unknown";
}

Method method_from_string(const std::string& s) {
    if (s == "bm25") return Method::bm25;
    if (s == "reflection") return Method::reflection;
    if (s == "serts") return Method::serts;
    throw ConfigError("unknown method: " + s);
}

std::uint64_t derive_rng_seed(std::uint64_t seed, const std::string& question_id) {
    return splitmix64(seed ^ splitmix64(fnv1a64(question_id)));
}

RetrievalOutcome run_bm25(const Question& question, const Bm25Index& index, int top_k) {
    RetrievalOutcome outcome;
    outcome.question_id = question.id;
    outcome.method = Method::bm25;
    outcome.doc_ids = hit_ids(index.search(question.text, static_cast<std::size_t>(top_k)));
    return outcome;
}

SearchResult run_serts(const Question& question, const Bm25Index& index, const Corpus& corpus,
                       Backend& gateway, const SearchConfig& config,
                       const ChatRequest& chat_settings, std::uint64_t seed) {
    std::mt19937_64 rng(derive_rng_seed(seed, question.id));
    SearchTree tree(question.text,
                    hit_ids(index.search(question.text, static_cast<std::size_t>(config.top_k))));
    std::vector<TrajectoryRecord> records;

    int simulations_used = 0;
    for (int sim = 0; sim < config.max_sim; ++sim) {
        simulations_used = sim + 1;
        const std::optional<NodeId> target = tree.select(config, rng);
        if (!target.has_value()) continue; // depth-capped: consumed, no gateway calls

        const std::optional<NodeId> child =
            expand_node(tree, *target, question, index, corpus, gateway, config, chat_settings,
                        /*with_siblings=*/true, config.max_branch, config.max_depth, sim, records);
        if (!child.has_value()) continue; // proposer failed twice

        const int reward = tree.node(*child).reward;
        tree.backpropagate(*child, reward * config.reward_scale);
        if (reward == 5) break;
    }

    return {finish_outcome(tree, question, Method::serts, simulations_used), std::move(records),
            std::move(tree)};
}

SearchResult run_reflection(const Question& question, const Bm25Index& index, const Corpus& corpus,
                            Backend& gateway, const SearchConfig& config,
                            const ChatRequest& chat_settings, std::uint64_t /*seed*/) {
    SearchTree tree(question.text,
                    hit_ids(index.search(question.text, static_cast<std::size_t>(config.top_k))));
    std::vector<TrajectoryRecord> records;

    NodeId latest = tree.root();
    int simulations_used = 0;
    for (int sim = 0; sim < config.max_sim; ++sim) {
        simulations_used = sim + 1;
        // The chain ignores the branch/depth search bounds; every node has at
        // most one child and depth grows to at most max_sim.
        const std::optional<NodeId> child =
            expand_node(tree, latest, question, index, corpus, gateway, config, chat_settings,
                        /*with_siblings=*/false, /*max_branch=*/1, /*max_depth=*/config.max_sim,
                        sim, records);
        if (!child.has_value()) continue;
        latest = *child;
        if (tree.node(*child).reward == 5) break;
    }

    return {finish_outcome(tree, question, Method::reflection, simulations_used),
            std::move(records), std::move(tree)};
}

std::string generate_answer(const Question& question, const std::vector<std::string>& doc_ids,
                            const Corpus& corpus, Backend& gateway, const ChatRequest& settings) {
    ChatRequest request = settings;
    request.prompt = render_answer_prompt(question, corpus.resolve(doc_ids));
    const CallKey key{question.id, "", CallRole::answer};
    return gateway.complete(request, key).text;
}

void export_trajectories(const std::vector<TrajectoryRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trajectory file: " + path);
    for (const auto& rec : records) {
        const nlohmann::json line{
            {"question_id", rec.question_id}, {"sim_index", rec.sim_index},
            {"node_id", rec.node_id},         {"parent_id", rec.parent_id},
            {"prompt", rec.prompt},           {"completion", rec.completion},
            {"query", rec.query},             {"doc_ids", rec.doc_ids},
            {"reward", rec.reward},           {"feedback", rec.feedback},
        };
        out << line.dump() << '\n';
    }
    if (!out) throw IoError("failed writing trajectory file: " + path);
}

std::vector<TrajectoryRecord> import_trajectories(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory file: " + path);
    std::vector<TrajectoryRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw IoError(path + ": malformed record at line " + std::to_string(lineno));
        }
        try {
            TrajectoryRecord t;
            t.question_id = rec.at("question_id").get<std::string>();
            t.sim_index = rec.at("sim_index").get<int>();
            t.node_id = rec.at("node_id").get<NodeId>();
            t.parent_id = rec.at("parent_id").get<NodeId>();
            t.prompt = rec.at("prompt").get<std::string>();
            t.completion = rec.at("completion").get<std::string>();
            t.query = rec.at("query").get<std::string>();
            t.doc_ids = rec.at("doc_ids").get<std::vector<std::string>>();
            t.reward = rec.at("reward").get<int>();
            t.feedback = rec.at("feedback").get<std::string>();
            records.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path + ": bad record at line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

} // namespace serts
