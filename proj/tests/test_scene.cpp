#include <doctest.h>

#include <nlohmann/json.hpp>
#include <queue>
#include <set>

#include "navmem/errors.hpp"
#include "navmem/scene.hpp"

using namespace navmem;
using nlohmann::json;

TEST_CASE("scene generation is deterministic per seed") {
    sim::SceneConfig cfg;
    cfg.object_count = 2;
    auto a = sim::generate_scene(cfg, 7);
    auto b = sim::generate_scene(cfg, 7);
    CHECK(sim::scene_to_json(a).dump() == sim::scene_to_json(b).dump());
    auto c = sim::generate_scene(cfg, 8);
    CHECK(sim::scene_to_json(a).dump() != sim::scene_to_json(c).dump());
}

TEST_CASE("zero obstacles still places all objects inside bounds") {
    sim::SceneConfig cfg;
    cfg.obstacle_count = 0;
    auto scene = sim::generate_scene(cfg, 3);
    CHECK(scene.obstacles.empty());
    CHECK(scene.objects.size() == static_cast<std::size_t>(cfg.object_count));
    for (const auto& o : scene.objects) {
        CHECK(scene.bounds.contains(o.position));
        CHECK(scene.in_free_space(o.position));
    }
}

TEST_CASE("dense scene keeps pairwise object separation") {
    sim::SceneConfig cfg;
    cfg.width = 12.0;
    cfg.height = 12.0;
    cfg.object_count = 10;
    auto scene = sim::generate_scene(cfg, 3);
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        for (std::size_t j = i + 1; j < scene.objects.size(); ++j)
            CHECK(distance(scene.objects[i].position,
                           scene.objects[j].position) >=
                  cfg.min_separation - 1e-12);
}

TEST_CASE("impossible placement reports a generation error") {
    sim::SceneConfig cfg;
    cfg.width = 3.0;
    cfg.height = 3.0;
    cfg.object_count = 40;  // cannot fit at 1.5 m separation
    cfg.obstacle_count = 0;
    CHECK_THROWS_AS(sim::generate_scene(cfg, 1), DomainError);
}

TEST_CASE("free space is 4-connected at 1 m resolution") {
    sim::SceneConfig cfg;
    cfg.obstacle_count = 3;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 11ULL}) {
        auto scene = sim::generate_scene(cfg, seed);
        // Flood fill over free cell centers and check every free cell is
        // reached.
        int w = static_cast<int>(scene.bounds.width());
        int h = static_cast<int>(scene.bounds.height());
        auto free_at = [&](int cx, int cy) {
            return cx >= 0 && cx < w && cy >= 0 && cy < h &&
                   !scene.in_obstacle(Point{cx + 0.5, cy + 0.5});
        };
        std::pair<int, int> first{-1, -1};
        int free_count = 0;
        for (int cy = 0; cy < h; ++cy)
            for (int cx = 0; cx < w; ++cx)
                if (free_at(cx, cy)) {
                    ++free_count;
                    if (first.first < 0) first = {cx, cy};
                }
        std::set<std::pair<int, int>> seen{first};
        std::queue<std::pair<int, int>> q;
        q.push(first);
        while (!q.empty()) {
            auto [cx, cy] = q.front();
            q.pop();
            const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                std::pair<int, int> nb{cx + dx[k], cy + dy[k]};
                if (free_at(nb.first, nb.second) && seen.insert(nb).second)
                    q.push(nb);
            }
        }
        CHECK(static_cast<int>(seen.size()) == free_count);
    }
}

TEST_CASE("scene json round-trips exactly") {
    sim::SceneConfig cfg;
    auto scene = sim::generate_scene(cfg, 5);
    json j = sim::scene_to_json(scene);
    auto back = sim::scene_from_json(j);
    CHECK(sim::scene_to_json(back).dump() == j.dump());
}

TEST_CASE("scene json validation rejects broken invariants") {
    auto scene = sim::generate_scene(sim::SceneConfig{}, 5);
    json j = sim::scene_to_json(scene);
    json bad = j;
    bad["objects"][0]["x"] = 1e6;  // outside bounds
    CHECK_THROWS_AS(sim::scene_from_json(bad), ParseError);
}

TEST_CASE("default vocabulary has distinct labels with descriptions") {
    const auto& vocab = sim::default_vocabulary();
    CHECK(vocab.size() >= 6);
    std::set<std::string> labels;
    for (const auto& spec : vocab) {
        CHECK(labels.insert(spec.label).second);
        CHECK_FALSE(spec.description.empty());
    }
}
