#include "navmem/explore.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "navmem/errors.hpp"

namespace navmem::sim {

using nlohmann::json;

std::string synthesize_obs_token(const SceneDescription& scene,
                                 const std::vector<int>& visible_ids) {
    std::vector<const SceneObject*> objs;
    for (int id : visible_ids)
        for (const auto& o : scene.objects)
            if (o.id == id) objs.push_back(&o);
    std::sort(objs.begin(), objs.end(),
              [](const SceneObject* a, const SceneObject* b) {
                  if (a->label != b->label) return a->label < b->label;
                  return a->id < b->id;
              });
    if (objs.empty()) return "open area";
    std::string token = "objects: ";
    for (std::size_t i = 0; i < objs.size(); ++i) {
        if (i) token += "; ";
        token += objs[i]->label;
        if (!objs[i]->description.empty())
            token += " (" + objs[i]->description + ")";
    }
    return token;
}

namespace {

bool line_of_sight(const SceneDescription& scene, const Point& from,
                   const Point& to) {
    for (const auto& o : scene.obstacles)
        if (segment_hits_rect(from, to, o)) return false;
    return true;
}

// Sense the disk around `pose`: mark cells whose center is within range and
// line-of-sight, and collect objects whose containing cell is sensed.
void sense(const SceneDescription& scene, const Point& pose, double range,
           OccupancyGrid& grid, std::vector<int>* visible_ids) {
    auto [pcx, pcy] = grid.cell_of(pose);
    int radius_cells =
        static_cast<int>(std::ceil(range / grid.resolution())) + 1;
    for (int cy = pcy - radius_cells; cy <= pcy + radius_cells; ++cy) {
        for (int cx = pcx - radius_cells; cx <= pcx + radius_cells; ++cx) {
            if (!grid.in_grid(cx, cy)) continue;
            Point center = grid.cell_center(cx, cy);
            if (distance(pose, center) > range) continue;
            if (scene.in_obstacle(center)) {
                // An occupied cell is sensed when nothing else blocks the ray
                // before it.
                bool blocked = false;
                for (const auto& o : scene.obstacles) {
                    if (o.contains(center)) continue;
                    if (segment_hits_rect(pose, center, o)) blocked = true;
                }
                if (!blocked) grid.mark(cx, cy, CellState::Obstacle);
            } else if (line_of_sight(scene, pose, center)) {
                grid.mark(cx, cy, CellState::Explored);
            }
        }
    }
    if (visible_ids) {
        for (const auto& obj : scene.objects) {
            auto [ocx, ocy] = grid.cell_of(obj.position);
            Point center = grid.cell_center(ocx, ocy);
            if (distance(pose, center) <= range &&
                line_of_sight(scene, pose, center))
                visible_ids->push_back(obj.id);
        }
        std::sort(visible_ids->begin(), visible_ids->end());
    }
}

}  // namespace

ExploreResult explore(const SceneDescription& scene, const Point& start,
                      const ExploreParams& params) {
    if (!scene.bounds.contains(start) || scene.in_obstacle(start))
        throw DomainError("explore: start pose is not in free space");

    ExploreResult result{{}, OccupancyGrid(scene.bounds, params.grid_resolution),
                         false};
    Pose pose{start, 0.0};
    std::size_t last_known = 0;
    int stagnant = 0;
    int t = 0;

    auto record = [&](const Pose& p) {
        ObservationRecord rec;
        rec.t = t++;
        rec.pose = p;
        sense(scene, p.position, params.sensor_range, result.grid,
              &rec.visible_object_ids);
        rec.obs_token = synthesize_obs_token(scene, rec.visible_object_ids);
        result.stream.push_back(std::move(rec));
    };

    for (int step = 0; step < params.step_budget; ++step) {
        record(pose);

        auto frontiers =
            detect_frontiers(result.grid, params.min_frontier_size);
        // Narrow passages can leave only sub-threshold frontiers; fall back
        // to them rather than declaring coverage complete too early.
        if (frontiers.empty() && params.min_frontier_size > 1)
            frontiers = detect_frontiers(result.grid, 1);
        if (frontiers.empty()) {
            result.frontier_free = true;
            break;
        }

        // Discretization mismatches can leave a frontier that sensing cannot
        // resolve; bail out instead of spinning on it.
        if (result.grid.known_count() == last_known) {
            if (++stagnant >= 3) break;
        } else {
            stagnant = 0;
            last_known = result.grid.known_count();
        }

        int pick = select_next_frontier(frontiers, pose.position);
        const auto& cluster = frontiers[static_cast<std::size_t>(pick)];
        // Move onto the cluster cell nearest its centroid; cluster cells are
        // Explored, hence free.
        Point target = result.grid.cell_center(cluster.cells[0].first,
                                               cluster.cells[0].second);
        double best = distance(target, cluster.centroid);
        for (const auto& [cx, cy] : cluster.cells) {
            Point c = result.grid.cell_center(cx, cy);
            double d = distance(c, cluster.centroid);
            if (d < best - 1e-12) {
                best = d;
                target = c;
            }
        }
        pose.heading = std::atan2(target.y - pose.position.y,
                                  target.x - pose.position.x);
        // Observe waypoints along the move at grid-resolution spacing so key
        // positions stay within the topological edge threshold of each other.
        double leg = distance(pose.position, target);
        int hops = static_cast<int>(std::ceil(leg / params.grid_resolution));
        for (int h = 1; h < hops; ++h) {
            double f = static_cast<double>(h) / hops;
            Point wp{pose.position.x + f * (target.x - pose.position.x),
                     pose.position.y + f * (target.y - pose.position.y)};
            if (!scene.bounds.contains(wp) || scene.in_obstacle(wp)) continue;
            record(Pose{wp, pose.heading});
        }
        pose.position = target;
    }
    return result;
}

std::vector<ObservationRecord> explore_stream(const SceneDescription& scene,
                                              const Point& start,
                                              const ExploreParams& params) {
    return explore(scene, start, params).stream;
}

json record_to_json(const ObservationRecord& rec) {
    return json{{"t", rec.t},
                {"x", rec.pose.position.x},
                {"y", rec.pose.position.y},
                {"heading", rec.pose.heading},
                {"obs_token", rec.obs_token},
                {"visible_object_ids", rec.visible_object_ids}};
}

ObservationRecord record_from_json(const json& j) {
    try {
        ObservationRecord rec;
        rec.t = j.at("t");
        rec.pose.position = Point{j.at("x"), j.at("y")};
        rec.pose.heading = j.value("heading", 0.0);
        rec.obs_token = j.at("obs_token");
        rec.visible_object_ids =
            j.value("visible_object_ids", std::vector<int>{});
        return rec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("record_from_json: ") + e.what());
    }
}

void write_stream_jsonl(std::ostream& out,
                        const std::vector<ObservationRecord>& stream) {
    for (const auto& rec : stream) out << record_to_json(rec).dump() << '\n';
}

std::vector<ObservationRecord> read_stream_jsonl(std::istream& in) {
    std::vector<ObservationRecord> stream;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("stream line " + std::to_string(line_no) +
                             ": invalid JSON");
        auto rec = record_from_json(j);
        if (!stream.empty() && rec.t <= stream.back().t)
            throw ParseError("stream line " + std::to_string(line_no) +
                             ": t not strictly increasing");
        stream.push_back(std::move(rec));
    }
    return stream;
}

}  // namespace navmem::sim
