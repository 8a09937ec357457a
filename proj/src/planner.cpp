#include "navmem/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <queue>
#include <set>
#include <sstream>

#include "navmem/errors.hpp"

namespace navmem::planner {

using memory::TopologicalMap;
using nlohmann::json;

namespace {

// Plain Dijkstra distances from `source`.
std::vector<double> dijkstra(const TopologicalMap& map, int source) {
    auto adj = map.adjacency();
    auto n = map.nodes.size();
    std::vector<double> dist(n, kInf);
    dist[static_cast<std::size_t>(source)] = 0.0;

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, source);
    std::vector<char> settled(n, 0);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        auto vi = static_cast<std::size_t>(v);
        if (settled[vi]) continue;
        settled[vi] = 1;
        for (const auto& [w, cost] : adj[vi]) {
            auto wi = static_cast<std::size_t>(w);
            if (d + cost < dist[wi] - 1e-15) {
                dist[wi] = d + cost;
                pq.emplace(dist[wi], w);
            }
        }
    }
    return dist;
}

void check_target(const TopologicalMap& map, int id) {
    if (id < 0 || id >= static_cast<int>(map.nodes.size()))
        throw DomainError("planner: unknown target node id " +
                          std::to_string(id));
}

}  // namespace

CostMatrix pairwise_costs(const TopologicalMap& map,
                          const std::vector<int>& targets) {
    for (int t : targets) check_target(map, t);
    CostMatrix cm;
    cm.target_node_ids = targets;
    cm.costs.assign(targets.size(), std::vector<double>(targets.size(), kInf));
    for (std::size_t i = 0; i < targets.size(); ++i) {
        auto dist = dijkstra(map, targets[i]);
        for (std::size_t j = 0; j < targets.size(); ++j)
            cm.costs[i][j] = dist[static_cast<std::size_t>(targets[j])];
        cm.costs[i][i] = 0.0;
    }
    return cm;
}

std::vector<int> path_between(const TopologicalMap& map, int a, int b) {
    check_target(map, a);
    check_target(map, b);
    if (a == b) return {a};
    // Distances to b; then walk forward from a, always taking the
    // smallest-id neighbor that stays on a shortest path. This realizes the
    // lexicographically-smallest tie rule.
    auto dist = dijkstra(map, b);
    if (dist[static_cast<std::size_t>(a)] == kInf)
        throw DomainError("path_between: nodes " + std::to_string(a) + " and " +
                          std::to_string(b) + " are disconnected");
    auto adj = map.adjacency();
    std::vector<int> path{a};
    int v = a;
    while (v != b) {
        auto edges = adj[static_cast<std::size_t>(v)];
        std::sort(edges.begin(), edges.end());
        int next = -1;
        for (const auto& [w, cost] : edges) {
            if (std::abs(cost + dist[static_cast<std::size_t>(w)] -
                         dist[static_cast<std::size_t>(v)]) < 1e-9) {
                next = w;
                break;
            }
        }
        if (next < 0)
            throw DomainError("path_between: shortest-path reconstruction failed");
        path.push_back(next);
        v = next;
    }
    return path;
}

int semantic_penalty(const std::vector<int>& order,
                     const std::vector<int>& semantic_sequence) {
    if (order.size() != semantic_sequence.size() ||
        std::set<int>(order.begin(), order.end()) !=
            std::set<int>(semantic_sequence.begin(), semantic_sequence.end()))
        throw DomainError("semantic_penalty: id sets differ");
    std::map<int, std::size_t> sem_pos;
    for (std::size_t i = 0; i < semantic_sequence.size(); ++i)
        sem_pos[semantic_sequence[i]] = i;
    int inversions = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (sem_pos[order[i]] > sem_pos[order[j]]) ++inversions;
    return inversions;
}

namespace {

struct SequenceProblem {
    const CostMatrix& costs;
    const std::vector<std::size_t>& sem_pos;  // target index -> sem position
    std::vector<std::vector<bool>> must_precede;  // [i][j]: i before j
    const std::vector<double>* start_costs = nullptr;
    double lambda = 0.0;
};

// Depth-first branch and bound over permutations of target indices.
// For n <= 9 the bound is disabled, making it exact enumeration; ties keep
// the lexicographically smallest permutation.
struct Solver {
    const SequenceProblem& p;
    std::size_t n;
    bool use_bound;
    std::vector<double> min_incoming;  // admissible remainder bound

    std::vector<std::size_t> current;
    std::vector<bool> used;
    std::vector<std::size_t> best_perm;
    double best_obj = kInf;

    explicit Solver(const SequenceProblem& prob, bool bound)
        : p(prob), n(prob.costs.target_node_ids.size()), use_bound(bound) {
        used.assign(n, false);
        min_incoming.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double m = kInf;
            for (std::size_t i = 0; i < n; ++i)
                if (i != j) m = std::min(m, p.costs.costs[i][j]);
            if (p.start_costs) m = std::min(m, (*p.start_costs)[j]);
            min_incoming[j] = (m == kInf || n == 1) ? 0.0 : m;
        }
    }

    void dfs(double travel, int inversions) {
        if (current.size() == n) {
            double obj = travel + p.lambda * inversions;
            if (obj < best_obj - 1e-12 ||
                (obj < best_obj + 1e-12 && current < best_perm)) {
                best_obj = obj;
                best_perm = current;
            }
            return;
        }
        if (use_bound) {
            double lb = travel + p.lambda * inversions;
            for (std::size_t j = 0; j < n; ++j)
                if (!used[j]) lb += min_incoming[j];
            if (lb > best_obj + 1e-12) return;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) continue;
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i)
                if (!used[i] && p.must_precede[i][j]) ok = false;
            if (!ok) continue;
            double leg = 0.0;
            if (current.empty()) {
                if (p.start_costs) leg = (*p.start_costs)[j];
            } else {
                leg = p.costs.costs[current.back()][j];
            }
            // New inversions: already-placed targets that should follow j.
            int inv = 0;
            for (std::size_t i : current)
                if (p.sem_pos[i] > p.sem_pos[j]) ++inv;
            used[j] = true;
            current.push_back(j);
            dfs(travel + leg, inversions + inv);
            current.pop_back();
            used[j] = false;
        }
    }
};

}  // namespace

PlanResult plan_sequence(const CostMatrix& costs,
                         const std::vector<int>& semantic_sequence,
                         double lambda, std::optional<int> start,
                         const std::vector<std::pair<int, int>>& precedence) {
    // When a start is supplied it must appear in the matrix; it prefixes the
    // first leg and is excluded from the permutation.
    std::map<int, std::size_t> matrix_pos;
    for (std::size_t i = 0; i < costs.target_node_ids.size(); ++i)
        matrix_pos[costs.target_node_ids[i]] = i;

    std::vector<int> ids;
    for (int id : costs.target_node_ids)
        if (!start || id != *start) ids.push_back(id);
    auto n = ids.size();
    if (n == 0) throw DomainError("plan_sequence: no targets");
    if (semantic_sequence.size() != n)
        throw DomainError("plan_sequence: semantic_sequence size mismatch");

    std::size_t start_row = 0;
    if (start) {
        auto it = matrix_pos.find(*start);
        if (it == matrix_pos.end())
            throw DomainError("plan_sequence: start node missing from cost matrix");
        start_row = it->second;
    }

    auto cost = [&](std::size_t i, std::size_t j) {
        return costs.costs[matrix_pos.at(ids[i])][matrix_pos.at(ids[j])];
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (cost(i, j) == kInf)
                throw DomainError("plan_sequence: targets " +
                                  std::to_string(ids[i]) + " and " +
                                  std::to_string(ids[j]) +
                                  " are mutually unreachable");

    std::map<int, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of[ids[i]] = i;
    std::vector<std::size_t> sem_pos(n, 0);
    for (std::size_t s = 0; s < semantic_sequence.size(); ++s) {
        auto it = index_of.find(semantic_sequence[s]);
        if (it == index_of.end())
            throw DomainError("plan_sequence: semantic_sequence id not a target");
        sem_pos[it->second] = s;
    }

    std::vector<std::vector<bool>> must(n, std::vector<bool>(n, false));
    for (const auto& [a, b] : precedence) {
        auto ia = index_of.find(a), ib = index_of.find(b);
        if (ia == index_of.end() || ib == index_of.end())
            throw DomainError("plan_sequence: precedence id not a target");
        must[ia->second][ib->second] = true;
    }

    // Dense working matrix over the permuted targets.
    CostMatrix work;
    work.target_node_ids = ids;
    work.costs.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) work.costs[i][j] = cost(i, j);

    std::vector<double> start_costs;
    if (start) {
        start_costs.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            start_costs[j] = costs.costs[start_row][matrix_pos.at(ids[j])];
            if (start_costs[j] == kInf)
                throw DomainError("plan_sequence: target " +
                                  std::to_string(ids[j]) +
                                  " unreachable from start " +
                                  std::to_string(*start));
        }
    }

    SequenceProblem prob{work, sem_pos, std::move(must),
                         start ? &start_costs : nullptr, lambda};
    Solver solver(prob, n > 9);
    solver.dfs(0.0, 0);
    if (solver.best_perm.empty())
        throw DomainError("plan_sequence: precedence constraints are cyclic");

    PlanResult result;
    result.lambda = lambda;
    std::vector<int> order_ids;
    for (std::size_t idx : solver.best_perm) order_ids.push_back(ids[idx]);
    result.order = order_ids;
    result.inversions = semantic_penalty(order_ids, semantic_sequence);
    double travel = 0.0;
    if (start) travel += start_costs[solver.best_perm.front()];
    for (std::size_t i = 0; i + 1 < solver.best_perm.size(); ++i)
        travel += work.costs[solver.best_perm[i]][solver.best_perm[i + 1]];
    result.travel_cost = travel;
    result.objective = travel + lambda * result.inversions;
    return result;
}

PlanResult plan_route(const TopologicalMap& map, const std::vector<int>& targets,
                      const std::vector<int>& semantic_sequence, double lambda,
                      std::optional<int> start,
                      const std::vector<std::pair<int, int>>& precedence) {
    std::vector<int> all = targets;
    if (start && std::find(all.begin(), all.end(), *start) == all.end())
        all.push_back(*start);
    CostMatrix cm = pairwise_costs(map, all);

    PlanResult result = plan_sequence(cm, semantic_sequence, lambda, start,
                                      precedence);

    // Materialize legs.
    std::vector<int> waypoints;
    if (start) waypoints.push_back(*start);
    waypoints.insert(waypoints.end(), result.order.begin(), result.order.end());
    double travel = 0.0;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        auto leg = path_between(map, waypoints[i], waypoints[i + 1]);
        travel += travel_distance(leg, map);
        result.legs.push_back(std::move(leg));
    }
    if (waypoints.size() == 1) result.legs.push_back({waypoints[0]});
    result.travel_cost = travel;
    result.objective = travel + lambda * result.inversions;
    return result;
}

double travel_distance(const std::vector<int>& path, const TopologicalMap& map,
                       bool use_edge_attributes) {
    if (path.size() < 2) return 0.0;
    std::map<std::pair<int, int>, double> weights;
    if (use_edge_attributes)
        for (const auto& e : map.edges) {
            weights[{e.i, e.j}] = e.weight;
            weights[{e.j, e.i}] = e.weight;
        }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto it = weights.find({path[i], path[i + 1]});
        if (it != weights.end()) {
            total += it->second;  // Rule 1: edge attribute
        } else {
            const auto& a = map.node(path[i]).position;
            const auto& b = map.node(path[i + 1]).position;
            total += distance(a, b);  // Rule 2: coordinate fallback
        }
    }
    return total;
}

json plan_to_json(const PlanResult& plan) {
    return json{{"order", plan.order},
                {"legs", plan.legs},
                {"travel_cost", plan.travel_cost},
                {"semantic_penalty", plan.inversions},
                {"objective", plan.objective},
                {"lambda", plan.lambda}};
}

std::string structured_guide(const PlanResult& plan,
                             const TopologicalMap& map) {
    std::ostringstream out;
    out << "navigation guide (" << plan.order.size() << " targets, "
        << "travel " << plan.travel_cost << " m, "
        << plan.inversions << " order deviations)\n";
    for (std::size_t i = 0; i < plan.order.size(); ++i) {
        const auto& node = map.node(plan.order[i]);
        out << "  " << (i + 1) << ". node " << node.id << " at (" << node.position.x
            << ", " << node.position.y << "): " << node.description << "\n";
        long leg_idx = static_cast<long>(plan.legs.size()) -
                       static_cast<long>(plan.order.size()) + static_cast<long>(i);
        if (leg_idx >= 0 && leg_idx < static_cast<long>(plan.legs.size())) {
            const auto& leg = plan.legs[static_cast<std::size_t>(leg_idx)];
            out << "     via " << leg.size() << " waypoint(s), "
                << travel_distance(leg, map) << " m\n";
        }
    }
    return out.str();
}

}  // namespace navmem::planner
