#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "navmem/errors.hpp"
#include "navmem/memory.hpp"

namespace navmem::memory {

namespace {

// Leaf label from a fingerprint description: first object token of the
// synthesized "objects: label (...)" form, else the first word.
std::string leaf_label(const std::string& description) {
    std::string text = description;
    const std::string prefix = "objects: ";
    if (text.rfind(prefix, 0) == 0) text = text.substr(prefix.size());
    std::string label;
    for (char c : text) {
        if (c == ' ' || c == '(' || c == ';' || c == ',') break;
        label.push_back(c);
    }
    return label.empty() ? text : label;
}

struct DendroNode {
    int left = -1;   // dendro indices, -1 for leaves
    int right = -1;
    int leaf_count = 1;
    int min_leaf = 0;  // smallest topo id underneath, for deterministic order
};

}  // namespace

Summary default_summarize(const std::vector<ForestNode>& children,
                          std::size_t cap) {
    std::map<std::string, int> counts;
    for (const auto& c : children) ++counts[c.label];
    std::string label;
    int best = 0;
    for (const auto& [l, n] : counts) {
        if (n > best) {  // map iteration is sorted, so ties keep the smaller
            best = n;
            label = l;
        }
    }
    std::string summary;
    for (const auto& c : children) {
        if (!summary.empty()) summary += "; ";
        summary += c.summary;
        if (summary.size() >= cap) break;
    }
    if (summary.size() > cap) summary.resize(cap);
    return Summary{label, summary};
}

SemanticForest build_forest(const TopologicalMap& map,
                            const MemoryParams& params,
                            const SummarizerFn& summarize) {
    params.validate();
    const auto n = map.nodes.size();
    if (n == 0) throw DomainError("build_forest: empty map");

    SemanticForest forest;
    forest.nodes.reserve(2 * n);
    std::vector<Vec> fused(n);
    for (std::size_t i = 0; i < n; ++i) {
        fused[i] = fuse_features(map.nodes[i], params);
        ForestNode leaf;
        leaf.id = static_cast<int>(i);
        leaf.leaf_ref = map.nodes[i].id;
        leaf.centroid_feature = fused[i];
        leaf.summary = map.nodes[i].description;
        leaf.label = leaf_label(map.nodes[i].description);
        forest.nodes.push_back(std::move(leaf));
    }

    // Average-linkage agglomeration over hybrid pair similarity, maintained
    // with Lance-Williams updates on a dense matrix. `slot` indexes the
    // matrix; merged clusters keep the smaller slot.
    std::vector<DendroNode> dendro(n);
    for (std::size_t i = 0; i < n; ++i) dendro[i].min_leaf = static_cast<int>(i);

    std::vector<double> sim(n * n, 0.0);
    auto S = [&](std::size_t i, std::size_t j) -> double& { return sim[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            S(i, j) = S(j, i) =
                pairwise_similarity(map.nodes[i], map.nodes[j], params);

    std::vector<int> cluster(n);      // slot -> dendro index, -1 inactive
    std::vector<int> size(n, 1);      // slot -> leaf count
    for (std::size_t i = 0; i < n; ++i) cluster[i] = static_cast<int>(i);

    struct Best {
        double s = -1.0;
        int j = -1;
    };
    std::vector<Best> best(n);
    auto recompute_best = [&](std::size_t i) {
        best[i] = Best{};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || cluster[j] < 0) continue;
            double s = S(i, j);
            if (s > best[i].s + 1e-15) {
                best[i].s = s;
                best[i].j = static_cast<int>(j);
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i) recompute_best(i);

    std::size_t active = n;
    while (active > 1) {
        // Global best pair; ties resolve to the smallest (i, j).
        int bi = -1;
        double bs = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (cluster[i] < 0 || best[i].j < 0) continue;
            if (best[i].s > bs + 1e-15) {
                bs = best[i].s;
                bi = static_cast<int>(i);
            }
        }
        if (bi < 0 || bs < params.merge_stop_tau) break;
        std::size_t i = static_cast<std::size_t>(std::min(bi, best[bi].j));
        std::size_t j = static_cast<std::size_t>(std::max(bi, best[bi].j));

        DendroNode parent;
        parent.left = cluster[i];
        parent.right = cluster[j];
        parent.leaf_count = size[i] + size[j];
        parent.min_leaf = std::min(dendro[static_cast<std::size_t>(cluster[i])].min_leaf,
                                   dendro[static_cast<std::size_t>(cluster[j])].min_leaf);
        dendro.push_back(parent);

        for (std::size_t k = 0; k < n; ++k) {
            if (cluster[k] < 0 || k == i || k == j) continue;
            double merged =
                (size[i] * S(i, k) + size[j] * S(j, k)) / (size[i] + size[j]);
            S(i, k) = S(k, i) = merged;
        }
        cluster[i] = static_cast<int>(dendro.size()) - 1;
        size[i] += size[j];
        cluster[j] = -1;
        --active;

        recompute_best(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (cluster[k] < 0 || k == i) continue;
            if (best[k].j == static_cast<int>(i) ||
                best[k].j == static_cast<int>(j))
                recompute_best(k);
        }
    }

    // Flatten the binary dendrogram to fan-out <= max_branching so the beam
    // descent prunes in depth rather than walking every internal merge.
    auto fallback = [&](const std::vector<ForestNode>& children) {
        return default_summarize(children, params.summary_cap);
    };

    std::vector<int> dendro_to_forest(dendro.size(), -1);

    auto flatten = [&](auto&& self, int d) -> int {
        const DendroNode& node = dendro[static_cast<std::size_t>(d)];
        if (node.left < 0) return d;  // leaf: dendro index == forest id

        std::vector<int> parts{node.left, node.right};
        while (static_cast<int>(parts.size()) < params.max_branching) {
            int pick = -1;
            for (std::size_t p = 0; p < parts.size(); ++p) {
                const DendroNode& cand = dendro[static_cast<std::size_t>(parts[p])];
                if (cand.left < 0) continue;
                if (pick < 0 ||
                    cand.leaf_count >
                        dendro[static_cast<std::size_t>(parts[static_cast<std::size_t>(pick)])]
                            .leaf_count ||
                    (cand.leaf_count ==
                         dendro[static_cast<std::size_t>(parts[static_cast<std::size_t>(pick)])]
                             .leaf_count &&
                     parts[p] < parts[static_cast<std::size_t>(pick)]))
                    pick = static_cast<int>(p);
            }
            if (pick < 0) break;
            int expanded = parts[static_cast<std::size_t>(pick)];
            const DendroNode& e = dendro[static_cast<std::size_t>(expanded)];
            parts[static_cast<std::size_t>(pick)] = e.left;
            parts.push_back(e.right);
        }
        std::sort(parts.begin(), parts.end(), [&](int a, int b) {
            return dendro[static_cast<std::size_t>(a)].min_leaf <
                   dendro[static_cast<std::size_t>(b)].min_leaf;
        });

        std::vector<int> child_ids;
        for (int p : parts) child_ids.push_back(self(self, p));

        ForestNode parent;
        parent.id = static_cast<int>(forest.nodes.size());
        parent.children = child_ids;

        std::vector<ForestNode> child_nodes;
        for (int cid : child_ids)
            child_nodes.push_back(forest.node(cid));

        Summary s;
        if (summarize) {
            try {
                s = summarize(child_nodes);
            } catch (...) {
                s = fallback(child_nodes);
            }
        } else {
            s = fallback(child_nodes);
        }
        parent.label = s.label;
        parent.summary = s.summary;

        forest.nodes.push_back(parent);
        int pid = parent.id;

        // Centroid: renormalized mean of descendant leaves' fused features.
        std::vector<int> leaves = forest.descendant_leaves(pid);
        Vec centroid(fused[0].size(), 0.0);
        for (int leaf : leaves)
            for (std::size_t c = 0; c < centroid.size(); ++c)
                centroid[c] += fused[static_cast<std::size_t>(leaf)][c];
        for (auto& v : centroid) v /= static_cast<double>(leaves.size());
        if (norm(centroid) < 1e-12)
            centroid = fused[static_cast<std::size_t>(leaves.front())];
        forest.nodes[static_cast<std::size_t>(pid)].centroid_feature =
            normalized(centroid);
        return pid;
    };

    std::vector<int> root_dendros;
    for (std::size_t i = 0; i < n; ++i)
        if (cluster[i] >= 0) root_dendros.push_back(cluster[i]);
    std::sort(root_dendros.begin(), root_dendros.end(), [&](int a, int b) {
        return dendro[static_cast<std::size_t>(a)].min_leaf <
               dendro[static_cast<std::size_t>(b)].min_leaf;
    });
    for (int rd : root_dendros) forest.roots.push_back(flatten(flatten, rd));
    return forest;
}

}  // namespace navmem::memory
