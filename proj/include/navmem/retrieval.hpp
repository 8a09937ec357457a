#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navmem/embedding.hpp"
#include "navmem/memory.hpp"

namespace navmem::retrieval {

enum class QueryMode { Flat, Forest, Anchor, Boosted };

struct Query {
    std::string target_text;
    std::optional<std::string> anchor_text;
    std::vector<std::string> context_texts;
    int k = 10;
    int hops = 1;
    double sigma = 2.0;          // Gaussian length scale (m)
    double eta = 0.3;            // boost coefficient, >= 0
    int beam_width = 4;
    double match_threshold = 0.55;  // anchor/context acceptance, on (1+cos)/2
    QueryMode mode = QueryMode::Flat;

    void validate() const;
};

struct AnchorSupport {
    int anchor_node_id = 0;
    double distance = 0.0;  // Euclidean, meters
};

struct RankedCandidate {
    int node_id = 0;
    double s_sem = 0.0;
    std::optional<double> s_spatial;
    std::optional<double> s_combo;
    std::optional<double> s_boost;
    double final_score = 0.0;
    std::optional<AnchorSupport> support;
};

struct SearchResult {
    std::vector<RankedCandidate> candidates;  // final_score desc, ties by id asc
    std::size_t nodes_visited = 0;            // scored nodes (pruning proxy)
    std::string diagnostic;                   // non-empty on degenerate outcomes
};

// Hop-limited BFS over topological edges, seed excluded.
std::set<int> neighborhood(const memory::Memory& mem, int node_id, int hops);

// Gaussian-constrained spatial score (anchor-conditioned):
// (1+cos)/2 * exp(-d^2 / (2 sigma^2)).
double spatial_score(const memory::TopoNode& candidate,
                     const memory::TopoNode& anchor, const Query& q,
                     const Vec& target_embedding);

// Exhaustive cosine scan over all nodes; baseline retriever and the
// correctness oracle for forest_search.
SearchResult flat_search(const Query& q, const memory::Memory& mem,
                         const EmbedFn& embed);

// Beam descent over the semantic forest: per expanded node, keep the
// beam_width best children; collect reached leaves and rank them by s_sem.
SearchResult forest_search(const Query& q, const memory::Memory& mem,
                           const EmbedFn& embed);

// Two-stage anchor-guided retrieval: forest recall of top-K candidates for
// the target, then neighborhood validation against the anchor text.
// Candidates without a valid anchor within `hops` are pruned; survivors are
// scored s_sem * S_combo with S_combo = 1 / (1 + d). On an edgeless map the
// stage degenerates to plain ranked recall.
SearchResult anchor_retrieve(const Query& q, const memory::Memory& mem,
                             const EmbedFn& embed);

// Context confidence propagation: s_boost = s_sem * (1 + eta * mean context
// match), re-sorted. Contexts without a neighborhood match contribute 0.
std::vector<RankedCandidate> neighbor_boost(
    std::vector<RankedCandidate> candidates, const Query& q,
    const memory::Memory& mem, const EmbedFn& embed);

// Mode dispatch. Boosted runs anchor_retrieve when anchor_text is set
// (boost applied after anchor pruning), else forest_search.
SearchResult search(const Query& q, const memory::Memory& mem,
                    const EmbedFn& embed);

nlohmann::json query_to_json(const Query& q);
Query query_from_json(const nlohmann::json& j);
nlohmann::json result_to_json(const SearchResult& r);

}  // namespace navmem::retrieval
