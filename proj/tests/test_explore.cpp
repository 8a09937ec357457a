#include <doctest.h>

#include <set>
#include <sstream>

#include "navmem/errors.hpp"
#include "navmem/explore.hpp"

using namespace navmem;

namespace {

sim::SceneDescription small_room() {
    sim::SceneDescription scene;
    scene.bounds = Rect{0, 0, 5, 5};
    scene.objects.push_back({0, "sofa", "a cushioned sofa", Point{4.2, 4.3}});
    scene.objects.push_back({1, "lamp", "a floor lamp", Point{0.7, 3.4}});
    return scene;
}

}  // namespace

TEST_CASE("sensor covering the whole room finishes in one step") {
    auto scene = small_room();
    sim::ExploreParams params;
    params.sensor_range = 8.0;  // beyond the room diagonal
    auto result = sim::explore(scene, Point{2.5, 2.5}, params);
    CHECK(result.frontier_free);
    REQUIRE(result.stream.size() == 1);
    CHECK(result.stream[0].visible_object_ids == std::vector<int>{0, 1});
}

TEST_CASE("step budget zero yields an empty stream without crashing") {
    sim::ExploreParams params;
    params.step_budget = 0;
    auto result = sim::explore(small_room(), Point{2.5, 2.5}, params);
    CHECK(result.stream.size() <= 1);
}

TEST_CASE("start pose inside an obstacle is rejected") {
    auto scene = small_room();
    scene.obstacles.push_back(Rect{1, 1, 3, 3});
    CHECK_THROWS_AS(sim::explore(scene, Point{2, 2}, sim::ExploreParams{}),
                    DomainError);
}

TEST_CASE("two rooms joined by a corridor are both fully observed") {
    // 13x5 scene; walls with a 1-cell corridor gap at y in [2,3).
    sim::SceneDescription scene;
    scene.bounds = Rect{0, 0, 13, 5};
    scene.obstacles.push_back(Rect{6, 0, 7, 2});
    scene.obstacles.push_back(Rect{6, 3, 7, 5});
    scene.objects.push_back({0, "sofa", "left room sofa", Point{1.5, 1.5}});
    scene.objects.push_back({1, "desk", "right room desk", Point{11.5, 3.5}});
    scene.objects.push_back({2, "lamp", "right room lamp", Point{12.5, 0.5}});

    sim::ExploreParams params;
    auto result = sim::explore(scene, Point{1.5, 2.5}, params);
    CHECK(result.frontier_free);
    std::set<int> seen;
    for (const auto& rec : result.stream)
        seen.insert(rec.visible_object_ids.begin(),
                    rec.visible_object_ids.end());
    CHECK(seen == std::set<int>{0, 1, 2});
    // Every free cell became known.
    int unknown_free = 0;
    for (int cy = 0; cy < result.grid.height(); ++cy)
        for (int cx = 0; cx < result.grid.width(); ++cx) {
            Point c = result.grid.cell_center(cx, cy);
            if (!scene.in_obstacle(c) &&
                result.grid.at(cx, cy) == sim::CellState::Unknown)
                ++unknown_free;
        }
    CHECK(unknown_free == 0);
}

TEST_CASE("observation tokens list objects sorted by label then id") {
    auto scene = small_room();
    CHECK(sim::synthesize_obs_token(scene, {0, 1}) ==
          "objects: lamp (a floor lamp); sofa (a cushioned sofa)");
    CHECK(sim::synthesize_obs_token(scene, {}) == "open area");
}

TEST_CASE("exploration is deterministic") {
    auto scene = small_room();
    sim::ExploreParams params;
    auto a = sim::explore_stream(scene, Point{0.5, 0.5}, params);
    auto b = sim::explore_stream(scene, Point{0.5, 0.5}, params);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].t == b[i].t);
        CHECK(a[i].pose.position == b[i].pose.position);
        CHECK(a[i].obs_token == b[i].obs_token);
    }
}

TEST_CASE("stream timestamps strictly increase") {
    auto scene = small_room();
    auto stream = sim::explore_stream(scene, Point{0.5, 0.5},
                                      sim::ExploreParams{});
    for (std::size_t i = 1; i < stream.size(); ++i)
        CHECK(stream[i].t > stream[i - 1].t);
}

TEST_CASE("stream jsonl round-trips and validates ordering") {
    auto scene = small_room();
    auto stream = sim::explore_stream(scene, Point{0.5, 0.5},
                                      sim::ExploreParams{});
    std::stringstream buf;
    sim::write_stream_jsonl(buf, stream);
    auto back = sim::read_stream_jsonl(buf);
    REQUIRE(back.size() == stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        CHECK(back[i].obs_token == stream[i].obs_token);
        CHECK(back[i].pose.position == stream[i].pose.position);
    }

    std::stringstream bad;
    bad << R"({"t": 2, "x": 0.5, "y": 0.5, "obs_token": "open area"})" << "\n"
        << R"({"t": 1, "x": 1.5, "y": 0.5, "obs_token": "open area"})" << "\n";
    CHECK_THROWS_AS(sim::read_stream_jsonl(bad), ParseError);
}

TEST_CASE("malformed stream lines name the line number") {
    std::stringstream bad;
    bad << R"({"t": 0, "x": 0.5, "y": 0.5, "obs_token": "open area"})" << "\n"
        << "not json\n";
    try {
        sim::read_stream_jsonl(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}
