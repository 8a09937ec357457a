#include "navmem/memory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "navmem/errors.hpp"

namespace navmem::memory {

using nlohmann::json;

void MemoryParams::validate() const {
    if (delta_spatial <= 0.0)
        throw DomainError("MemoryParams: delta_spatial must be positive");
    if (omega < 0.0 || omega > 1.0)
        throw DomainError("MemoryParams: omega outside [0,1]");
    if (alpha < 0.0 || alpha > 1.0)
        throw DomainError("MemoryParams: alpha outside [0,1]");
    if (merge_stop_tau < 0.0 || merge_stop_tau > 1.0)
        throw DomainError("MemoryParams: merge_stop_tau outside [0,1]");
    if (embedding_dim < 1) throw DomainError("MemoryParams: embedding_dim < 1");
    if (dedup_radius < 0.0)
        throw DomainError("MemoryParams: negative dedup_radius");
    if (max_branching < 2)
        throw DomainError("MemoryParams: max_branching < 2");
}

const TopoNode& TopologicalMap::node(int id) const {
    for (const auto& n : nodes)
        if (n.id == id) return n;
    throw DomainError("TopologicalMap: unknown node id " + std::to_string(id));
}

std::vector<std::vector<std::pair<int, double>>> TopologicalMap::adjacency()
    const {
    std::vector<std::vector<std::pair<int, double>>> adj(nodes.size());
    for (const auto& e : edges) {
        adj[static_cast<std::size_t>(e.i)].emplace_back(e.j, e.weight);
        adj[static_cast<std::size_t>(e.j)].emplace_back(e.i, e.weight);
    }
    return adj;
}

std::vector<int> SemanticForest::descendant_leaves(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const ForestNode& n = node(stack.back());
        stack.pop_back();
        if (n.leaf_ref) {
            out.push_back(*n.leaf_ref);
        } else {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
                stack.push_back(*it);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double pairwise_similarity(const TopoNode& a, const TopoNode& b,
                           const MemoryParams& params) {
    double d = distance(a.position, b.position);
    double phi_spatial = std::exp(-d / params.delta_spatial);
    double psi_semantic = cosine01(a.embedding, b.embedding);
    return params.omega * phi_spatial + (1.0 - params.omega) * psi_semantic;
}

Vec fuse_features(const TopoNode& node, const MemoryParams& params) {
    std::size_t len = std::max(node.spatial_feature.size(), node.embedding.size());
    Vec spa(len, 0.0), sem(len, 0.0);
    std::copy(node.spatial_feature.begin(), node.spatial_feature.end(),
              spa.begin());
    std::copy(node.embedding.begin(), node.embedding.end(), sem.begin());
    spa = normalized(spa);
    sem = normalized(sem);
    Vec fused(len, 0.0);
    for (std::size_t i = 0; i < len; ++i)
        fused[i] = params.alpha * spa[i] + (1.0 - params.alpha) * sem[i];
    if (norm(fused) < 1e-12) {
        // alpha = 0.5 with exactly opposed components; keep the semantic
        // direction rather than failing the build.
        return sem;
    }
    return normalized(fused);
}

DescriberFn make_default_describer() {
    return [](const std::vector<sim::ObservationRecord>& records) {
        // Richest observation wins: most visible objects, then the longest
        // token; earliest on ties.
        const sim::ObservationRecord* best = &records.front();
        for (const auto& rec : records) {
            auto key = [](const sim::ObservationRecord& r) {
                return std::make_pair(r.visible_object_ids.size(),
                                      r.obs_token.size());
            };
            if (key(rec) > key(*best)) best = &rec;
        }
        return best->obs_token;
    };
}

TopologicalMap build_topology(const std::vector<sim::ObservationRecord>& stream,
                              const MemoryParams& params,
                              const EmbedFn& embed,
                              const DescriberFn& describe) {
    params.validate();
    if (stream.empty()) throw DomainError("build_topology: empty stream");

    TopologicalMap map;
    std::vector<std::vector<sim::ObservationRecord>> merged;

    // Key positions: first pose wins, later poses within dedup_radius fold in.
    for (const auto& rec : stream) {
        int hit = -1;
        for (std::size_t i = 0; i < map.nodes.size(); ++i) {
            if (distance(map.nodes[i].position, rec.pose.position) <
                params.dedup_radius) {
                hit = static_cast<int>(i);
                break;
            }
        }
        if (hit >= 0) {
            merged[static_cast<std::size_t>(hit)].push_back(rec);
        } else {
            TopoNode node;
            node.id = static_cast<int>(map.nodes.size());
            node.position = rec.pose.position;
            node.z = 0.0;
            map.nodes.push_back(std::move(node));
            merged.push_back({rec});
        }
    }

    // Normalized positions: bounding box of key positions, with a constant
    // homogeneous component so the feature is never the zero vector.
    double min_x = map.nodes[0].position.x, max_x = min_x;
    double min_y = map.nodes[0].position.y, max_y = min_y;
    for (const auto& n : map.nodes) {
        min_x = std::min(min_x, n.position.x);
        max_x = std::max(max_x, n.position.x);
        min_y = std::min(min_y, n.position.y);
        max_y = std::max(max_y, n.position.y);
    }
    double cx = 0.5 * (min_x + max_x);
    double cy = 0.5 * (min_y + max_y);
    double scale = std::max({max_x - min_x, max_y - min_y, 1e-9}) * 0.5;

    for (std::size_t i = 0; i < map.nodes.size(); ++i) {
        auto& node = map.nodes[i];
        node.description = describe(merged[i]);
        if (node.description.empty())
            throw DomainError("build_topology: describer returned empty text");
        node.embedding = normalized(embed(node.description));
        node.spatial_feature = {(node.position.x - cx) / scale,
                                (node.position.y - cy) / scale, 1.0};
        std::vector<int> ids;
        for (const auto& rec : merged[i])
            ids.insert(ids.end(), rec.visible_object_ids.begin(),
                       rec.visible_object_ids.end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        node.object_ids = std::move(ids);
    }

    for (std::size_t i = 0; i < map.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < map.nodes.size(); ++j) {
            double d = distance(map.nodes[i].position, map.nodes[j].position);
            if (d < params.delta_spatial)
                map.edges.push_back(TopoEdge{static_cast<int>(i),
                                             static_cast<int>(j), d});
        }
    }
    return map;
}

Memory build_memory(const std::vector<sim::ObservationRecord>& stream,
                    const MemoryParams& params, const EmbedFn& embed,
                    const DescriberFn& describe, const SummarizerFn& summarize) {
    EmbedFn e = embed ? embed : make_default_embedder(params.embedding_dim);
    DescriberFn d = describe ? describe : make_default_describer();
    Memory mem;
    mem.params = params;
    mem.map = build_topology(stream, params, e, d);
    mem.forest = build_forest(mem.map, params, summarize);
    return mem;
}

namespace {

json vec_to_json(const Vec& v) { return json(v); }

Vec vec_from_json(const json& j) { return j.get<Vec>(); }

json params_to_json(const MemoryParams& p) {
    return json{{"delta_spatial", p.delta_spatial},
                {"omega", p.omega},
                {"alpha", p.alpha},
                {"merge_stop_tau", p.merge_stop_tau},
                {"embedding_dim", p.embedding_dim},
                {"dedup_radius", p.dedup_radius},
                {"max_branching", p.max_branching},
                {"summary_cap", p.summary_cap}};
}

MemoryParams params_from_json(const json& j) {
    MemoryParams p;
    p.delta_spatial = j.at("delta_spatial");
    p.omega = j.at("omega");
    p.alpha = j.at("alpha");
    p.merge_stop_tau = j.at("merge_stop_tau");
    p.embedding_dim = j.at("embedding_dim");
    p.dedup_radius = j.at("dedup_radius");
    p.max_branching = j.at("max_branching");
    p.summary_cap = j.at("summary_cap");
    p.validate();
    return p;
}

}  // namespace

json memory_to_json(const Memory& mem) {
    json nodes = json::array();
    for (const auto& n : mem.map.nodes)
        nodes.push_back({{"id", n.id},
                         {"x", n.position.x},
                         {"y", n.position.y},
                         {"z", n.z},
                         {"description", n.description},
                         {"embedding", vec_to_json(n.embedding)},
                         {"spatial_feature", vec_to_json(n.spatial_feature)},
                         {"object_ids", n.object_ids}});
    json edges = json::array();
    for (const auto& e : mem.map.edges)
        edges.push_back({{"i", e.i}, {"j", e.j}, {"weight", e.weight}});
    json fnodes = json::array();
    for (const auto& f : mem.forest.nodes) {
        json fj{{"id", f.id},
                {"children", f.children},
                {"centroid_feature", vec_to_json(f.centroid_feature)},
                {"summary", f.summary},
                {"label", f.label}};
        if (f.leaf_ref) fj["leaf_ref"] = *f.leaf_ref;
        fnodes.push_back(std::move(fj));
    }
    return json{{"schema_version", kMemorySchemaVersion},
                {"params", params_to_json(mem.params)},
                {"nodes", nodes},
                {"edges", edges},
                {"forest", {{"roots", mem.forest.roots}, {"nodes", fnodes}}}};
}

Memory memory_from_json(const json& j) {
    try {
        int version = j.at("schema_version");
        if (version != kMemorySchemaVersion)
            throw ParseError("memory: unsupported schema_version " +
                             std::to_string(version));
        Memory mem;
        mem.params = params_from_json(j.at("params"));
        for (const auto& nj : j.at("nodes")) {
            TopoNode n;
            n.id = nj.at("id");
            n.position = Point{nj.at("x"), nj.at("y")};
            n.z = nj.value("z", 0.0);
            n.description = nj.at("description");
            n.embedding = vec_from_json(nj.at("embedding"));
            n.spatial_feature = vec_from_json(nj.at("spatial_feature"));
            n.object_ids = nj.value("object_ids", std::vector<int>{});
            mem.map.nodes.push_back(std::move(n));
        }
        for (const auto& ej : j.at("edges"))
            mem.map.edges.push_back(
                TopoEdge{ej.at("i"), ej.at("j"), ej.at("weight")});
        const auto& fj = j.at("forest");
        mem.forest.roots = fj.at("roots").get<std::vector<int>>();
        for (const auto& nj : fj.at("nodes")) {
            ForestNode f;
            f.id = nj.at("id");
            f.children = nj.at("children").get<std::vector<int>>();
            if (nj.contains("leaf_ref")) f.leaf_ref = nj.at("leaf_ref").get<int>();
            f.centroid_feature = vec_from_json(nj.at("centroid_feature"));
            f.summary = nj.value("summary", "");
            f.label = nj.value("label", "");
            mem.forest.nodes.push_back(std::move(f));
        }
        return mem;
    } catch (const json::exception& e) {
        throw ParseError(std::string("memory_from_json: ") + e.what());
    }
}

void save_memory(const Memory& mem, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_memory: cannot open " + path);
    out << memory_to_json(mem).dump();
    if (!out) throw IoError("save_memory: write failed for " + path);
}

Memory load_memory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_memory: cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("load_memory: invalid JSON in " + path);
    return memory_from_json(j);
}

}  // namespace navmem::memory
