#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navmem/geometry.hpp"
#include "navmem/occupancy.hpp"
#include "navmem/scene.hpp"

namespace navmem::sim {

struct Pose {
    Point position;
    double heading = 0.0;  // radians
};

struct ObservationRecord {
    int t = 0;
    Pose pose;
    std::string obs_token;
    std::vector<int> visible_object_ids;
};

struct ExploreParams {
    double grid_resolution = 1.0;
    double sensor_range = 3.0;
    int min_frontier_size = 2;
    int step_budget = 4096;
};

struct ExploreResult {
    std::vector<ObservationRecord> stream;
    OccupancyGrid grid;
    bool frontier_free = false;  // terminated with zero frontiers
};

// Greedy frontier exploration: sense -> update grid -> detect frontiers ->
// move to the nearest cluster, until no frontiers remain or the step budget
// is exhausted. The sensor is an omnidirectional disk with obstacle
// occlusion; a cell (or object) is sensed when its cell center is within
// range and line-of-sight. Motion teleports to the cluster cell nearest the
// centroid (the local planner is assumed perfect).
ExploreResult explore(const SceneDescription& scene, const Point& start,
                      const ExploreParams& params);

// Convenience wrapper returning just the stream.
std::vector<ObservationRecord> explore_stream(const SceneDescription& scene,
                                              const Point& start,
                                              const ExploreParams& params);

// Deterministic stand-in for the VLM: "objects: label (description); ..."
// over the given objects, sorted by label then id.
std::string synthesize_obs_token(const SceneDescription& scene,
                                 const std::vector<int>& visible_ids);

nlohmann::json record_to_json(const ObservationRecord& rec);
ObservationRecord record_from_json(const nlohmann::json& j);

// JSON Lines, one record per line.
void write_stream_jsonl(std::ostream& out,
                        const std::vector<ObservationRecord>& stream);
std::vector<ObservationRecord> read_stream_jsonl(std::istream& in);

}  // namespace navmem::sim
