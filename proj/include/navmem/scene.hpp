#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navmem/geometry.hpp"

namespace navmem::sim {

struct SceneObject {
    int id = 0;
    std::string label;
    std::string description;
    Point position;
};

struct SceneDescription {
    Rect bounds;
    std::vector<Rect> obstacles;
    std::vector<SceneObject> objects;
    std::uint64_t rng_seed = 0;

    bool in_obstacle(const Point& p) const;
    bool in_free_space(const Point& p) const;
};

struct LabelSpec {
    std::string label;
    std::string description;
};

struct SceneConfig {
    double width = 20.0;
    double height = 20.0;
    int object_count = 6;
    int obstacle_count = 2;
    // Obstacle footprint in whole meters; rects are snapped to the 1 m grid
    // so the occupancy discretization is exact.
    int obstacle_max_extent = 4;
    double min_separation = 1.5;
    std::vector<LabelSpec> vocabulary;  // empty -> default indoor vocabulary
};

const std::vector<LabelSpec>& default_vocabulary();

// Deterministic for a fixed (config, seed). Free space is guaranteed
// 4-connected at 1 m resolution; throws DomainError when placement cannot
// satisfy the config.
SceneDescription generate_scene(const SceneConfig& config, std::uint64_t seed);

nlohmann::json scene_to_json(const SceneDescription& scene);
SceneDescription scene_from_json(const nlohmann::json& j);

}  // namespace navmem::sim
