#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navmem/memory.hpp"

namespace navmem::planner {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct CostMatrix {
    std::vector<int> target_node_ids;
    std::vector<std::vector<double>> costs;  // kInf when unreachable

    double at(int i, int j) const {
        return costs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
};

// Dijkstra from each target over edge weights.
CostMatrix pairwise_costs(const memory::TopologicalMap& map,
                          const std::vector<int>& targets);

// Shortest path as a node sequence; equal-cost ties resolve to the
// lexicographically smallest id sequence. Throws DomainError when a and b
// are disconnected.
std::vector<int> path_between(const memory::TopologicalMap& map, int a, int b);

// Kendall-tau inversion count between `order` and the instruction sequence.
// Throws DomainError when the id sets differ.
int semantic_penalty(const std::vector<int>& order,
                     const std::vector<int>& semantic_sequence);

struct PlanResult {
    std::vector<int> order;                  // visiting order, node ids
    std::vector<std::vector<int>> legs;      // per-leg node paths
    double travel_cost = 0.0;
    int inversions = 0;                      // semantic penalty
    double objective = 0.0;                  // travel_cost + lambda * inversions
    double lambda = 0.0;
};

// Constrained sequencing: exact enumeration for n <= 9 (ties ->
// lexicographically smallest optimal permutation), branch-and-bound beyond.
// `precedence` pairs (before, after) are hard constraints filtering the
// permutation space. Throws DomainError naming the first unreachable pair.
PlanResult plan_sequence(const CostMatrix& costs,
                         const std::vector<int>& semantic_sequence,
                         double lambda,
                         std::optional<int> start = std::nullopt,
                         const std::vector<std::pair<int, int>>& precedence = {});

// Fills legs/travel_cost of a planned order with actual node paths.
PlanResult plan_route(const memory::TopologicalMap& map,
                      const std::vector<int>& targets,
                      const std::vector<int>& semantic_sequence,
                      double lambda,
                      std::optional<int> start = std::nullopt,
                      const std::vector<std::pair<int, int>>& precedence = {});

// Travel-distance rules: sum edge weight attributes when present, fall back
// to Euclidean distance between node coordinates for attribute-less hops.
double travel_distance(const std::vector<int>& path,
                       const memory::TopologicalMap& map,
                       bool use_edge_attributes = true);

nlohmann::json plan_to_json(const PlanResult& plan);
// Human-readable structured guide (markers, relevance, navigation cues).
std::string structured_guide(const PlanResult& plan,
                             const memory::TopologicalMap& map);

}  // namespace navmem::planner
