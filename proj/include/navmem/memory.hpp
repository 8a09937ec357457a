#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navmem/embedding.hpp"
#include "navmem/explore.hpp"
#include "navmem/geometry.hpp"

namespace navmem::memory {

struct MemoryParams {
    double delta_spatial = 2.0;   // edge threshold (m)
    double omega = 0.5;           // spatial/semantic mix in pair similarity
    double alpha = 0.5;           // spatial weight in fused features
    double merge_stop_tau = 0.6;  // agglomeration stops below this
    int embedding_dim = 64;
    double dedup_radius = 0.5;    // key-position min separation (m)
    int max_branching = 32;       // forest fan-out after flattening
    std::size_t summary_cap = 512;

    void validate() const;  // throws DomainError on out-of-range values
};

struct TopoNode {
    int id = 0;
    Point position;
    double z = 0.0;
    std::string description;   // spatial fingerprint text
    Vec embedding;             // unit norm
    Vec spatial_feature;       // normalized position
    std::vector<int> object_ids;
};

struct TopoEdge {
    int i = 0;
    int j = 0;
    double weight = 0.0;  // Euclidean distance, < delta_spatial
};

struct TopologicalMap {
    std::vector<TopoNode> nodes;
    std::vector<TopoEdge> edges;  // stored once per pair, i < j

    const TopoNode& node(int id) const;
    // Adjacency as (neighbor id, weight) lists indexed by node id.
    std::vector<std::vector<std::pair<int, double>>> adjacency() const;
};

struct ForestNode {
    int id = 0;
    std::vector<int> children;        // empty for leaves
    std::optional<int> leaf_ref;      // TopoNode id, leaves only
    Vec centroid_feature;             // renormalized mean of leaf fused features
    std::string summary;
    std::string label;
};

struct SemanticForest {
    std::vector<int> roots;
    std::vector<ForestNode> nodes;  // indexed by id

    const ForestNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
    // Topo ids of leaves under `id`, in leaf-id order.
    std::vector<int> descendant_leaves(int id) const;
};

struct Summary {
    std::string label;
    std::string summary;
};

// Produces the label/summary of a merged cluster from its children. May
// throw; build_forest falls back to the deterministic summarizer.
using SummarizerFn = std::function<Summary(const std::vector<ForestNode>&)>;

// Majority child label (ties -> lexicographically smallest), child summaries
// concatenated with "; " and truncated to cap.
Summary default_summarize(const std::vector<ForestNode>& children,
                          std::size_t cap);

// Node descriptions from the merged observation records at a key position.
using DescriberFn =
    std::function<std::string(const std::vector<sim::ObservationRecord>&)>;
DescriberFn make_default_describer();

// Scoring primitives --------------------------------------------------------

// omega * exp(-||pa-pb|| / delta) + (1-omega) * (1+cos)/2, in [0,1].
double pairwise_similarity(const TopoNode& a, const TopoNode& b,
                           const MemoryParams& params);

// alpha * Norm(pad(f_spa)) + (1-alpha) * Norm(f_sem), renormalized; the
// shorter vector is zero-padded to the common length.
Vec fuse_features(const TopoNode& node, const MemoryParams& params);

// Construction --------------------------------------------------------------

TopologicalMap build_topology(const std::vector<sim::ObservationRecord>& stream,
                              const MemoryParams& params,
                              const EmbedFn& embed,
                              const DescriberFn& describe);

SemanticForest build_forest(const TopologicalMap& map,
                            const MemoryParams& params,
                            const SummarizerFn& summarize);

// Frozen dual-basis memory: safe for concurrent read-only queries.
struct Memory {
    MemoryParams params;
    TopologicalMap map;
    SemanticForest forest;
};

Memory build_memory(const std::vector<sim::ObservationRecord>& stream,
                    const MemoryParams& params,
                    const EmbedFn& embed = {},
                    const DescriberFn& describe = {},
                    const SummarizerFn& summarize = {});

inline constexpr int kMemorySchemaVersion = 1;

nlohmann::json memory_to_json(const Memory& mem);
// Rejects unknown schema_version values.
Memory memory_from_json(const nlohmann::json& j);

void save_memory(const Memory& mem, const std::string& path);
Memory load_memory(const std::string& path);

}  // namespace navmem::memory
