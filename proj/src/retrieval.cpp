#include "navmem/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <queue>

#include "navmem/errors.hpp"

namespace navmem::retrieval {

using memory::Memory;
using memory::TopoNode;
using nlohmann::json;

void Query::validate() const {
    if (target_text.empty()) throw DomainError("query: empty target_text");
    if (k < 1) throw DomainError("query: K must be >= 1");
    if (hops < 1) throw DomainError("query: hops must be >= 1");
    if (sigma <= 0.0) throw DomainError("query: sigma must be > 0");
    if (eta < 0.0) throw DomainError("query: eta must be >= 0");
    if (beam_width < 1) throw DomainError("query: beam_width must be >= 1");
}

namespace {

void sort_candidates(std::vector<RankedCandidate>& c) {
    std::stable_sort(c.begin(), c.end(),
                     [](const RankedCandidate& a, const RankedCandidate& b) {
                         if (a.final_score != b.final_score)
                             return a.final_score > b.final_score;
                         return a.node_id < b.node_id;
                     });
}

void truncate(std::vector<RankedCandidate>& c, int k) {
    if (static_cast<int>(c.size()) > k) c.resize(static_cast<std::size_t>(k));
}

}  // namespace

std::set<int> neighborhood(const Memory& mem, int node_id, int hops) {
    if (node_id < 0 || node_id >= static_cast<int>(mem.map.nodes.size()))
        throw DomainError("neighborhood: unknown node id " +
                          std::to_string(node_id));
    if (hops < 1) throw DomainError("neighborhood: hops must be >= 1");
    auto adj = mem.map.adjacency();
    std::set<int> out;
    std::vector<int> frontier{node_id};
    std::set<int> seen{node_id};
    for (int h = 0; h < hops && !frontier.empty(); ++h) {
        std::vector<int> next;
        for (int v : frontier) {
            for (const auto& [w, _] : adj[static_cast<std::size_t>(v)]) {
                if (seen.insert(w).second) {
                    out.insert(w);
                    next.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

double spatial_score(const TopoNode& candidate, const TopoNode& anchor,
                     const Query& q, const Vec& target_embedding) {
    double sem = cosine01(target_embedding, candidate.embedding);
    double d = distance(candidate.position, anchor.position);
    return sem * std::exp(-(d * d) / (2.0 * q.sigma * q.sigma));
}

SearchResult flat_search(const Query& q, const Memory& mem,
                         const EmbedFn& embed) {
    q.validate();
    Vec target = embed(q.target_text);
    SearchResult result;
    for (const auto& node : mem.map.nodes) {
        RankedCandidate c;
        c.node_id = node.id;
        c.s_sem = cosine01(target, node.embedding);
        c.final_score = c.s_sem;
        result.candidates.push_back(c);
        ++result.nodes_visited;
    }
    sort_candidates(result.candidates);
    truncate(result.candidates, q.k);
    return result;
}

SearchResult forest_search(const Query& q, const Memory& mem,
                           const EmbedFn& embed) {
    q.validate();
    Vec target = embed(q.target_text);
    const auto& forest = mem.forest;
    SearchResult result;
    if (forest.nodes.empty()) return result;

    // Centroids live in fused-feature space; pad the query to compare.
    Vec padded(forest.nodes.front().centroid_feature.size(), 0.0);
    std::copy(target.begin(), target.end(), padded.begin());

    auto score_of = [&](int id) {
        ++result.nodes_visited;
        return cosine01(padded, forest.node(id).centroid_feature);
    };

    std::vector<int> leaves;
    // Every root is descended; the beam prunes within a node's children.
    std::vector<int> frontier(forest.roots);

    while (!frontier.empty()) {
        std::vector<int> next;
        for (int id : frontier) {
            const auto& node = forest.node(id);
            if (node.leaf_ref) {
                leaves.push_back(*node.leaf_ref);
                continue;
            }
            if (static_cast<int>(node.children.size()) <= q.beam_width) {
                // Nothing to prune: keep all children without scoring them.
                next.insert(next.end(), node.children.begin(),
                            node.children.end());
                continue;
            }
            // Keep the beam_width best children of this node.
            std::vector<std::pair<double, int>> scored;
            for (int c : node.children) scored.emplace_back(score_of(c), c);
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& a, const auto& b) {
                                 if (a.first != b.first) return a.first > b.first;
                                 return a.second < b.second;
                             });
            scored.resize(static_cast<std::size_t>(q.beam_width));
            for (const auto& [_, c] : scored) next.push_back(c);
        }
        frontier = std::move(next);
    }

    for (int leaf : leaves) {
        const auto& node = mem.map.node(leaf);
        RankedCandidate c;
        c.node_id = node.id;
        c.s_sem = cosine01(target, node.embedding);
        c.final_score = c.s_sem;
        result.candidates.push_back(c);
    }
    sort_candidates(result.candidates);
    truncate(result.candidates, q.k);
    return result;
}

SearchResult anchor_retrieve(const Query& q, const Memory& mem,
                             const EmbedFn& embed) {
    q.validate();
    if (!q.anchor_text || q.anchor_text->empty())
        throw DomainError("anchor_retrieve: anchor_text required");

    // Stage 1: candidate recall for the primary target.
    SearchResult recall = forest_search(q, mem, embed);
    SearchResult result;
    result.nodes_visited = recall.nodes_visited;

    // Without topological edges there are no neighborhoods to validate
    // against; degenerate to the ranked recall.
    if (mem.map.edges.empty()) {
        result.candidates = std::move(recall.candidates);
        result.diagnostic = "no-edges: anchor validation skipped";
        return result;
    }

    Vec anchor_vec = embed(*q.anchor_text);
    bool anchor_exists = false;
    for (const auto& node : mem.map.nodes)
        if (cosine01(anchor_vec, node.embedding) >= q.match_threshold)
            anchor_exists = true;
    if (!anchor_exists) {
        result.diagnostic =
            "no-anchor: no node matches anchor text \"" + *q.anchor_text +
            "\" above threshold";
        return result;
    }

    // Stage 2: neighborhood validation; candidates without a valid anchor
    // in range are pruned.
    Vec target_vec = embed(q.target_text);
    for (auto& cand : recall.candidates) {
        auto nbrs = neighborhood(mem, cand.node_id, q.hops);
        int best_anchor = -1;
        double best_sim = q.match_threshold;
        for (int nb : nbrs) {
            double s = cosine01(anchor_vec, mem.map.node(nb).embedding);
            ++result.nodes_visited;
            if (s > best_sim || (s == best_sim && best_anchor < 0)) {
                best_sim = s;
                best_anchor = nb;
            }
        }
        if (best_anchor < 0) continue;
        const auto& cnode = mem.map.node(cand.node_id);
        const auto& anode = mem.map.node(best_anchor);
        double d = distance(cnode.position, anode.position);
        cand.s_combo = 1.0 / (1.0 + d);
        cand.s_spatial = spatial_score(cnode, anode, q, target_vec);
        cand.support = AnchorSupport{best_anchor, d};
        cand.final_score = cand.s_sem * *cand.s_combo;
        result.candidates.push_back(cand);
    }
    if (result.candidates.empty())
        result.diagnostic = "all-pruned: no candidate has a valid anchor within " +
                            std::to_string(q.hops) + " hop(s)";
    sort_candidates(result.candidates);
    truncate(result.candidates, q.k);
    return result;
}

std::vector<RankedCandidate> neighbor_boost(std::vector<RankedCandidate> candidates,
                                            const Query& q, const Memory& mem,
                                            const EmbedFn& embed) {
    if (q.context_texts.empty() || q.eta == 0.0) {
        for (auto& c : candidates) c.s_boost = c.s_sem;
        return candidates;
    }
    std::vector<Vec> ctx_vecs;
    for (const auto& t : q.context_texts) ctx_vecs.push_back(embed(t));

    for (auto& cand : candidates) {
        std::set<int> nbrs;
        if (!mem.map.edges.empty())
            nbrs = neighborhood(mem, cand.node_id, q.hops);
        double sum = 0.0;
        for (const auto& cv : ctx_vecs) {
            double best = 0.0;
            for (int nb : nbrs) {
                double s = cosine01(cv, mem.map.node(nb).embedding);
                if (s >= q.match_threshold && s > best) best = s;
            }
            sum += best;  // unmatched contexts contribute 0
        }
        double mean_neighbor = sum / static_cast<double>(ctx_vecs.size());
        double factor = 1.0 + q.eta * mean_neighbor;
        // The boost value is defined on the semantic score; the ranking score
        // keeps any anchor-stage combo weighting it already carries.
        cand.s_boost = cand.s_sem * factor;
        cand.final_score *= factor;
    }
    sort_candidates(candidates);
    return candidates;
}

SearchResult search(const Query& q, const Memory& mem, const EmbedFn& embed) {
    switch (q.mode) {
        case QueryMode::Flat:
            return flat_search(q, mem, embed);
        case QueryMode::Forest:
            return forest_search(q, mem, embed);
        case QueryMode::Anchor:
            return anchor_retrieve(q, mem, embed);
        case QueryMode::Boosted: {
            SearchResult r = (q.anchor_text && !q.anchor_text->empty())
                                 ? anchor_retrieve(q, mem, embed)
                                 : forest_search(q, mem, embed);
            r.candidates = neighbor_boost(std::move(r.candidates), q, mem, embed);
            return r;
        }
    }
    throw DomainError("search: unknown query mode");
}

namespace {

const char* mode_name(QueryMode m) {
    switch (m) {
        case QueryMode::Flat: return "flat";
        case QueryMode::Forest: return "forest";
        case QueryMode::Anchor: return "anchor";
        case QueryMode::Boosted: return "boosted";
    }
    return "flat";
}

QueryMode mode_from_name(const std::string& s) {
    if (s == "flat") return QueryMode::Flat;
    if (s == "forest") return QueryMode::Forest;
    if (s == "anchor") return QueryMode::Anchor;
    if (s == "boosted") return QueryMode::Boosted;
    throw ParseError("query: unknown mode \"" + s + "\"");
}

}  // namespace

json query_to_json(const Query& q) {
    json j{{"target", q.target_text},
           {"mode", mode_name(q.mode)},
           {"k", q.k},
           {"hops", q.hops},
           {"sigma", q.sigma},
           {"eta", q.eta},
           {"beam_width", q.beam_width},
           {"match_threshold", q.match_threshold}};
    if (q.anchor_text) j["anchor"] = *q.anchor_text;
    if (!q.context_texts.empty()) j["context"] = q.context_texts;
    return j;
}

Query query_from_json(const json& j) {
    try {
        Query q;
        q.target_text = j.at("target");
        if (j.contains("anchor")) q.anchor_text = j.at("anchor").get<std::string>();
        q.context_texts = j.value("context", std::vector<std::string>{});
        q.k = j.value("k", 10);
        q.hops = j.value("hops", 1);
        q.sigma = j.value("sigma", 2.0);
        q.eta = j.value("eta", 0.3);
        q.beam_width = j.value("beam_width", 4);
        q.match_threshold = j.value("match_threshold", 0.55);
        q.mode = mode_from_name(j.value("mode", "flat"));
        q.validate();
        return q;
    } catch (const json::exception& e) {
        throw ParseError(std::string("query_from_json: ") + e.what());
    }
}

json result_to_json(const SearchResult& r) {
    json cands = json::array();
    for (const auto& c : r.candidates) {
        json cj{{"node_id", c.node_id},
                {"s_sem", c.s_sem},
                {"final_score", c.final_score}};
        if (c.s_spatial) cj["s_spatial"] = *c.s_spatial;
        if (c.s_combo) cj["s_combo"] = *c.s_combo;
        if (c.s_boost) cj["s_boost"] = *c.s_boost;
        if (c.support)
            cj["support"] = {{"anchor_node_id", c.support->anchor_node_id},
                             {"distance", c.support->distance}};
        cands.push_back(std::move(cj));
    }
    return json{{"candidates", cands},
                {"nodes_visited", r.nodes_visited},
                {"diagnostic", r.diagnostic}};
}

}  // namespace navmem::retrieval
