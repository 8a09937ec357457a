#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <utility>

#include "helpers.hpp"
#include "navmem/errors.hpp"
#include "navmem/memory.hpp"

using namespace navmem;
using nlohmann::json;

namespace {

memory::TopoNode node_at(double x, double y, const Vec& embedding) {
    memory::TopoNode n;
    n.position = Point{x, y};
    n.embedding = embedding;
    n.spatial_feature = Vec{x, y, 1.0};
    return n;
}

}  // namespace

TEST_CASE("poses below the edge threshold are connected with their distance") {
    auto mem = testutil::make_memory({Point{0, 0}, Point{1.5, 0}},
                                     {"open area"});
    REQUIRE(mem.map.nodes.size() == 2);
    REQUIRE(mem.map.edges.size() == 1);
    CHECK(mem.map.edges[0].i == 0);
    CHECK(mem.map.edges[0].j == 1);
    CHECK(mem.map.edges[0].weight == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("poses exactly at the threshold are not connected") {
    auto mem = testutil::make_memory({Point{0, 0}, Point{2.0, 0}},
                                     {"open area"});
    CHECK(mem.map.edges.empty());
}

TEST_CASE("edge set equals the brute-force all-pairs check") {
    Rng rng(17);
    auto positions = testutil::random_positions(rng, 30, 12.0);
    auto mem = testutil::make_memory(positions, {"open area"});
    REQUIRE(mem.map.nodes.size() == positions.size());

    std::set<std::pair<int, int>> expected;
    for (std::size_t i = 0; i < mem.map.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < mem.map.nodes.size(); ++j)
            if (distance(mem.map.nodes[i].position,
                         mem.map.nodes[j].position) <
                mem.params.delta_spatial)
                expected.insert({static_cast<int>(i), static_cast<int>(j)});

    std::set<std::pair<int, int>> got;
    for (const auto& e : mem.map.edges) {
        CHECK(e.i < e.j);
        CHECK(e.weight < mem.params.delta_spatial);
        CHECK(std::abs(e.weight - distance(mem.map.node(e.i).position,
                                           mem.map.node(e.j).position)) <=
              1e-9);
        got.insert({e.i, e.j});
    }
    CHECK(got == expected);
}

TEST_CASE("nearby observations deduplicate to the first pose") {
    std::vector<sim::ObservationRecord> stream;
    sim::ObservationRecord a;
    a.t = 0;
    a.pose.position = Point{1.0, 1.0};
    a.obs_token = "open area";
    sim::ObservationRecord b;
    b.t = 1;
    b.pose.position = Point{1.2, 1.0};  // within the 0.5 m dedup radius
    b.obs_token = "objects: sofa (a cushioned sofa)";
    stream = {a, b};
    auto mem = memory::build_memory(stream, memory::MemoryParams{});
    REQUIRE(mem.map.nodes.size() == 1);
    CHECK(mem.map.nodes[0].position == Point{1.0, 1.0});
    // The richer observation supplies the description.
    CHECK(mem.map.nodes[0].description ==
          "objects: sofa (a cushioned sofa)");
}

TEST_CASE("pair similarity is 1 for identical nodes") {
    memory::MemoryParams params;
    auto n = node_at(2.0, 3.0, Vec{1.0, 0.0});
    CHECK(memory::pairwise_similarity(n, n, params) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pure-spatial similarity at the threshold distance is exp(-1)") {
    memory::MemoryParams params;
    params.omega = 1.0;
    auto a = node_at(0.0, 0.0, Vec{1.0, 0.0});
    auto b = node_at(params.delta_spatial, 0.0, Vec{0.0, 1.0});
    CHECK(memory::pairwise_similarity(a, b, params) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("mixed similarity matches the hand-computed sum of both terms") {
    memory::MemoryParams params;  // omega = 0.5, delta = 2.0
    auto a = node_at(0.0, 0.0, Vec{1.0, 0.0});
    auto b = node_at(1.0, 0.0, Vec{0.0, 1.0});
    // 0.5 * exp(-1/2) + 0.5 * (1 + 0) / 2
    double expected = 0.5 * std::exp(-0.5) + 0.25;
    CHECK(memory::pairwise_similarity(a, b, params) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("similarity stays within the unit interval") {
    Rng rng(5);
    memory::MemoryParams params;
    for (int trial = 0; trial < 200; ++trial) {
        params.omega = rng.next_double();
        auto a = node_at(rng.uniform(0, 20), rng.uniform(0, 20),
                         normalized(Vec{rng.uniform(-1, 1),
                                        rng.uniform(-1, 1)}));
        auto b = node_at(rng.uniform(0, 20), rng.uniform(0, 20),
                         normalized(Vec{rng.uniform(-1, 1),
                                        rng.uniform(-1, 1)}));
        double s = memory::pairwise_similarity(a, b, params);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0 + 1e-12);
    }
}

TEST_CASE("fused features reduce to each basis at the weight extremes") {
    memory::MemoryParams params;
    auto n = node_at(3.0, 4.0, normalized(Vec{0.5, 0.5, 0.0, 0.0}));

    params.alpha = 0.0;
    auto sem_only = memory::fuse_features(n, params);
    REQUIRE(sem_only.size() == n.embedding.size());
    for (std::size_t i = 0; i < n.embedding.size(); ++i)
        CHECK(sem_only[i] == doctest::Approx(n.embedding[i]).epsilon(1e-9));

    params.alpha = 1.0;
    auto spa_only = memory::fuse_features(n, params);
    auto expected = normalized(Vec{3.0, 4.0, 1.0, 0.0});
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(spa_only[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("balanced fusion yields a unit vector") {
    memory::MemoryParams params;
    params.alpha = 0.5;
    auto n = node_at(1.0, 2.0, normalized(Vec{0.3, -0.7, 0.2, 0.1}));
    CHECK(std::abs(norm(memory::fuse_features(n, params)) - 1.0) < 1e-6);
}

TEST_CASE("memory json round-trips byte-identically") {
    Rng rng(23);
    auto positions = testutil::random_positions(rng, 12, 8.0);
    auto mem = testutil::make_memory(
        positions,
        {"open area", "objects: sofa (a cushioned sofa)",
         "objects: lamp (a floor lamp)"});
    json j = memory::memory_to_json(mem);
    auto back = memory::memory_from_json(j);
    CHECK(memory::memory_to_json(back).dump() == j.dump());
}

TEST_CASE("unknown memory schema versions are rejected") {
    auto mem = testutil::make_memory({Point{0, 0}, Point{1, 0}}, {"open area"});
    json j = memory::memory_to_json(mem);
    j["schema_version"] = 999;
    CHECK_THROWS_AS(memory::memory_from_json(j), ParseError);
}

TEST_CASE("parameter validation rejects out-of-range values") {
    memory::MemoryParams params;
    params.omega = 1.5;
    CHECK_THROWS_AS(params.validate(), DomainError);
    params = {};
    params.delta_spatial = -1.0;
    CHECK_THROWS_AS(params.validate(), DomainError);
    params = {};
    params.max_branching = 1;
    CHECK_THROWS_AS(params.validate(), DomainError);
}

TEST_CASE("empty streams are rejected") {
    CHECK_THROWS_AS(memory::build_memory({}, memory::MemoryParams{}),
                    DomainError);
}
