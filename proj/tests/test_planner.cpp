#include <doctest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "navmem/errors.hpp"
#include "navmem/planner.hpp"

using namespace navmem;

namespace {

memory::TopologicalMap make_map(
    const std::vector<Point>& positions,
    const std::vector<std::tuple<int, int, double>>& edges) {
    memory::TopologicalMap map;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        memory::TopoNode n;
        n.id = static_cast<int>(i);
        n.position = positions[i];
        n.embedding = Vec{1.0};
        n.spatial_feature = Vec{positions[i].x, positions[i].y, 1.0};
        map.nodes.push_back(std::move(n));
    }
    for (const auto& [i, j, w] : edges) map.edges.push_back({i, j, w});
    return map;
}

memory::TopologicalMap random_geometric_map(Rng& rng, int n, double extent,
                                            double connect_radius) {
    std::vector<Point> positions;
    for (int i = 0; i < n; ++i)
        positions.push_back(Point{rng.uniform(0, extent),
                                  rng.uniform(0, extent)});
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = distance(positions[static_cast<std::size_t>(i)],
                                positions[static_cast<std::size_t>(j)]);
            if (d < connect_radius) edges.push_back({i, j, d});
        }
    return make_map(positions, edges);
}

// Independent all-pairs oracle.
std::vector<std::vector<double>> floyd_warshall(
    const memory::TopologicalMap& map) {
    std::size_t n = map.nodes.size();
    std::vector<std::vector<double>> d(n,
                                       std::vector<double>(n, planner::kInf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
    for (const auto& e : map.edges) {
        auto i = static_cast<std::size_t>(e.i);
        auto j = static_cast<std::size_t>(e.j);
        d[i][j] = std::min(d[i][j], e.weight);
        d[j][i] = std::min(d[j][i], e.weight);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

int inversion_oracle(const std::vector<int>& order,
                     const std::vector<int>& semantic) {
    std::vector<int> rank;
    for (int id : order) {
        auto it = std::find(semantic.begin(), semantic.end(), id);
        rank.push_back(static_cast<int>(it - semantic.begin()));
    }
    int inv = 0;
    for (std::size_t i = 0; i < rank.size(); ++i)
        for (std::size_t j = i + 1; j < rank.size(); ++j)
            if (rank[i] > rank[j]) ++inv;
    return inv;
}

}  // namespace

TEST_CASE("pairwise costs on a weighted path graph add up") {
    auto map = make_map({Point{0, 0}, Point{1, 0}, Point{3, 0}},
                        {{0, 1, 1.0}, {1, 2, 2.0}});
    auto cm = planner::pairwise_costs(map, {0, 1, 2});
    CHECK(cm.at(0, 0) == 0.0);
    CHECK(cm.at(0, 2) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(cm.at(2, 0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("pairwise costs match the all-pairs oracle on random graphs") {
    Rng rng(200);
    for (int trial = 0; trial < 3; ++trial) {
        auto map = random_geometric_map(rng, 100, 20.0, 3.5);
        std::vector<int> all(map.nodes.size());
        std::iota(all.begin(), all.end(), 0);
        auto cm = planner::pairwise_costs(map, all);
        auto fw = floyd_warshall(map);
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = 0; j < all.size(); ++j) {
                double a = cm.costs[i][j], b = fw[i][j];
                if (std::isinf(b))
                    CHECK(std::isinf(a));
                else
                    CHECK(std::abs(a - b) <= 1e-9);
            }
        // Triangle inequality on finite triples.
        for (int rep = 0; rep < 200; ++rep) {
            auto i = rng.next_below(all.size());
            auto j = rng.next_below(all.size());
            auto k = rng.next_below(all.size());
            if (std::isinf(cm.costs[i][j]) || std::isinf(cm.costs[i][k]) ||
                std::isinf(cm.costs[k][j]))
                continue;
            CHECK(cm.costs[i][j] <= cm.costs[i][k] + cm.costs[k][j] + 1e-9);
        }
    }
}

TEST_CASE("ordering penalty counts pairwise inversions") {
    CHECK(planner::semantic_penalty({1, 2, 3}, {1, 2, 3}) == 0);
    CHECK(planner::semantic_penalty({3, 2, 1}, {1, 2, 3}) == 3);
    CHECK_THROWS_AS(planner::semantic_penalty({1, 2}, {1, 2, 3}), DomainError);
    CHECK_THROWS_AS(planner::semantic_penalty({1, 4}, {1, 2}), DomainError);

    Rng rng(300);
    std::vector<int> semantic{11, 22, 33, 44, 55, 66};
    for (int trial = 0; trial < 50; ++trial) {
        auto order = semantic;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);
        CHECK(planner::semantic_penalty(order, semantic) ==
              inversion_oracle(order, semantic));
    }
}

TEST_CASE("single-target plans are trivial") {
    planner::CostMatrix cm;
    cm.target_node_ids = {7};
    cm.costs = {{0.0}};
    auto plan = planner::plan_sequence(cm, {7}, 1.0);
    CHECK(plan.order == std::vector<int>{7});
    CHECK(plan.objective == 0.0);
}

TEST_CASE("distance-only planning starts at a line extreme") {
    planner::CostMatrix cm;
    cm.target_node_ids = {10, 20, 30};
    cm.costs = {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
    auto plan = planner::plan_sequence(cm, {20, 30, 10}, 0.0);
    CHECK(plan.travel_cost == doctest::Approx(2.0));
    // Both extreme-to-extreme sweeps cost 2; the lexicographically smaller
    // optimal permutation wins.
    CHECK(plan.order == std::vector<int>{10, 20, 30});
    CHECK(plan.inversions == inversion_oracle(plan.order, {20, 30, 10}));
}

TEST_CASE("a dominant ordering weight reproduces the instruction order") {
    planner::CostMatrix cm;
    cm.target_node_ids = {1, 2, 3};
    cm.costs = {{0, 9, 1}, {9, 0, 9}, {1, 9, 0}};
    auto plan = planner::plan_sequence(cm, {2, 1, 3}, 1000.0);
    CHECK(plan.order == std::vector<int>{2, 1, 3});
    CHECK(plan.inversions == 0);
}

TEST_CASE("exact planning equals brute force on random instances") {
    Rng rng(400);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(5));  // 2..6
        planner::CostMatrix cm;
        for (int i = 0; i < n; ++i) cm.target_node_ids.push_back(i * 3 + 1);
        cm.costs.assign(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) cm.costs[i][j] = rng.uniform(0.5, 10.0);
        double lambda = std::vector<double>{0.0, 1.0, 10.0}[rng.next_below(3)];
        auto semantic = cm.target_node_ids;

        auto plan = planner::plan_sequence(cm, semantic, lambda);

        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        double best = planner::kInf;
        do {
            double travel = 0.0;
            std::vector<int> order;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                order.push_back(cm.target_node_ids[idx[k]]);
                if (k)
                    travel += cm.costs[idx[k - 1]][idx[k]];
            }
            best = std::min(best, travel + lambda * inversion_oracle(
                                                        order, semantic));
        } while (std::next_permutation(idx.begin(), idx.end()));
        CHECK(plan.objective == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("precedence constraints filter the permutation space") {
    planner::CostMatrix cm;
    cm.target_node_ids = {1, 2};
    cm.costs = {{0, 10}, {1, 0}};
    // Unconstrained the cheap order is 2 -> 1.
    auto free_plan = planner::plan_sequence(cm, {1, 2}, 0.0);
    CHECK(free_plan.order == std::vector<int>{2, 1});
    auto forced = planner::plan_sequence(cm, {1, 2}, 0.0, std::nullopt,
                                         {{1, 2}});
    CHECK(forced.order == std::vector<int>{1, 2});
    CHECK_THROWS_AS(planner::plan_sequence(cm, {1, 2}, 0.0, std::nullopt,
                                           {{1, 2}, {2, 1}}),
                    DomainError);
}

TEST_CASE("a start node prefixes the first leg without joining the order") {
    planner::CostMatrix cm;
    cm.target_node_ids = {5, 6, 9};
    cm.costs = {{0, 4, 4}, {4, 0, 4}, {1, 8, 0}};  // 9 is the start
    auto plan = planner::plan_sequence(cm, {5, 6}, 0.0, 9);
    CHECK(plan.order == std::vector<int>{5, 6});
    CHECK(plan.travel_cost == doctest::Approx(1.0 + 4.0));
    CHECK_THROWS_AS(planner::plan_sequence(cm, {5, 6}, 0.0, 77), DomainError);
}

TEST_CASE("ordering penalty never increases with its weight") {
    Rng rng(500);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 3 + static_cast<int>(rng.next_below(4));
        planner::CostMatrix cm;
        for (int i = 0; i < n; ++i) cm.target_node_ids.push_back(i + 1);
        cm.costs.assign(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) cm.costs[i][j] = rng.uniform(0.5, 10.0);
        int prev = 1 << 20;
        for (double lambda : {0.0, 0.5, 1.0, 2.0, 10.0, 100.0}) {
            auto plan =
                planner::plan_sequence(cm, cm.target_node_ids, lambda);
            CHECK(plan.inversions <= prev);
            prev = plan.inversions;
        }
    }
}

TEST_CASE("unreachable target pairs are reported by id") {
    auto map = make_map({Point{0, 0}, Point{1, 0}, Point{40, 0}, Point{41, 0}},
                        {{0, 1, 1.0}, {2, 3, 1.0}});
    try {
        planner::plan_route(map, {0, 2}, {0, 2}, 1.0);
        FAIL("expected a disconnected-pair failure");
    } catch (const DomainError& e) {
        std::string msg = e.what();
        CHECK(msg.find("0") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("shortest paths are reconstructed deterministically") {
    auto map = make_map({Point{0, 0}, Point{1, 1}, Point{1, -1}, Point{2, 0}},
                        {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}});
    CHECK(planner::path_between(map, 0, 0) == std::vector<int>{0});
    // Two equal-cost routes; the lexicographically smaller node sequence wins.
    CHECK(planner::path_between(map, 0, 3) == std::vector<int>{0, 1, 3});
    CHECK(planner::path_between(map, 3, 0) == std::vector<int>{3, 1, 0});

    auto lonely = make_map({Point{0, 0}, Point{9, 9}}, {});
    CHECK_THROWS_AS(planner::path_between(lonely, 0, 1), DomainError);
}

TEST_CASE("path costs agree with the pairwise matrix on random graphs") {
    Rng rng(600);
    auto map = random_geometric_map(rng, 40, 12.0, 3.0);
    std::vector<int> all(map.nodes.size());
    std::iota(all.begin(), all.end(), 0);
    auto cm = planner::pairwise_costs(map, all);
    for (int rep = 0; rep < 100; ++rep) {
        int a = static_cast<int>(rng.next_below(map.nodes.size()));
        int b = static_cast<int>(rng.next_below(map.nodes.size()));
        if (std::isinf(cm.costs[static_cast<std::size_t>(a)]
                               [static_cast<std::size_t>(b)]))
            continue;
        auto path = planner::path_between(map, a, b);
        CHECK(planner::travel_distance(path, map) ==
              doctest::Approx(cm.costs[static_cast<std::size_t>(a)]
                                      [static_cast<std::size_t>(b)])
                  .epsilon(1e-9));
    }
}

TEST_CASE("travel distance prefers edge attributes and falls back to "
          "coordinates") {
    auto map = make_map({Point{0, 0}, Point{3, 4}, Point{6, 8}},
                        {{0, 1, 1.2}, {1, 2, 0.8}});
    CHECK(planner::travel_distance({0}, map) == 0.0);
    CHECK(planner::travel_distance({0, 1, 2}, map) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // Attribute-free hops use straight-line distance: (0,0) to (3,4) is 5.
    auto bare = make_map({Point{0, 0}, Point{3, 4}}, {});
    CHECK(planner::travel_distance({0, 1}, bare) ==
          doctest::Approx(5.0).epsilon(1e-12));
    CHECK(planner::travel_distance({0, 1, 2}, map, false) ==
          doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("route plans tie legs, costs and objective together") {
    Rng rng(700);
    auto map = random_geometric_map(rng, 30, 8.0, 2.5);
    // Pick targets from the largest connected component via one source.
    std::vector<int> all(map.nodes.size());
    std::iota(all.begin(), all.end(), 0);
    auto cm = planner::pairwise_costs(map, all);
    std::vector<int> targets;
    for (int v = 1; v < static_cast<int>(map.nodes.size()) &&
                    targets.size() < 4;
         ++v)
        if (!std::isinf(cm.costs[0][static_cast<std::size_t>(v)]))
            targets.push_back(v);
    REQUIRE(targets.size() == 4);

    auto plan = planner::plan_route(map, targets, targets, 1.0);
    REQUIRE(plan.legs.size() == targets.size() - 1);
    double total = 0.0;
    for (const auto& leg : plan.legs) total += planner::travel_distance(leg, map);
    CHECK(plan.travel_cost == doctest::Approx(total).epsilon(1e-9));
    CHECK(plan.objective ==
          doctest::Approx(plan.travel_cost + plan.lambda * plan.inversions));
    // Legs chain through the visiting order.
    for (std::size_t i = 0; i < plan.legs.size(); ++i) {
        CHECK(plan.legs[i].front() == plan.order[i]);
        CHECK(plan.legs[i].back() == plan.order[i + 1]);
    }
}

TEST_CASE("plan json exposes order, legs and scores") {
    auto map = make_map({Point{0, 0}, Point{1, 0}, Point{2, 0}},
                        {{0, 1, 1.0}, {1, 2, 1.0}});
    auto plan = planner::plan_route(map, {0, 2}, {0, 2}, 1.0);
    auto j = planner::plan_to_json(plan);
    CHECK(j.at("order").size() == 2);
    CHECK(j.at("travel_cost").get<double>() == doctest::Approx(2.0));
    CHECK(j.contains("legs"));
    CHECK(j.contains("semantic_penalty"));
    CHECK(j.contains("objective"));
    auto guide = planner::structured_guide(plan, map);
    CHECK(guide.find("node 0") != std::string::npos);
    CHECK(guide.find("node 2") != std::string::npos);
}
