#include "navmem/scene.hpp"

#include <nlohmann/json.hpp>
#include <queue>
#include <set>

#include "navmem/errors.hpp"

namespace navmem::sim {

using nlohmann::json;

bool SceneDescription::in_obstacle(const Point& p) const {
    for (const auto& o : obstacles)
        if (o.contains(p)) return true;
    return false;
}

bool SceneDescription::in_free_space(const Point& p) const {
    return bounds.contains(p) && !in_obstacle(p);
}

const std::vector<LabelSpec>& default_vocabulary() {
    static const std::vector<LabelSpec> vocab = {
        {"sofa", "a cushioned fabric sofa"},
        {"chair", "a wooden dining chair"},
        {"table", "a round wooden table"},
        {"lamp", "a tall floor lamp"},
        {"tv", "a wall mounted television"},
        {"desk", "an office desk with drawers"},
        {"plant", "a leafy potted plant"},
        {"shelf", "a metal storage shelf"},
        {"bed", "a single bed with pillows"},
        {"sink", "a ceramic kitchen sink"},
    };
    return vocab;
}

namespace {

// 4-connectivity of free cells at 1 m resolution.
bool free_space_connected(double w, double h, const std::vector<Rect>& obstacles) {
    int gw = static_cast<int>(w);
    int gh = static_cast<int>(h);
    auto is_free = [&](int cx, int cy) {
        Point c{cx + 0.5, cy + 0.5};
        for (const auto& o : obstacles)
            if (o.contains(c)) return false;
        return true;
    };
    int start_x = -1, start_y = -1, free_total = 0;
    for (int y = 0; y < gh; ++y)
        for (int x = 0; x < gw; ++x)
            if (is_free(x, y)) {
                ++free_total;
                if (start_x < 0) {
                    start_x = x;
                    start_y = y;
                }
            }
    if (free_total == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(gw) * gh, 0);
    std::queue<std::pair<int, int>> q;
    q.emplace(start_x, start_y);
    seen[static_cast<std::size_t>(start_y) * gw + start_x] = 1;
    int reached = 0;
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop();
        ++reached;
        for (int k = 0; k < 4; ++k) {
            int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || nx >= gw || ny < 0 || ny >= gh) continue;
            auto idx = static_cast<std::size_t>(ny) * gw + nx;
            if (seen[idx] || !is_free(nx, ny)) continue;
            seen[idx] = 1;
            q.emplace(nx, ny);
        }
    }
    return reached == free_total;
}

}  // namespace

SceneDescription generate_scene(const SceneConfig& config, std::uint64_t seed) {
    if (config.width < 2.0 || config.height < 2.0)
        throw DomainError("generate_scene: bounds must be at least 2x2 meters");
    if (config.object_count < 0 || config.obstacle_count < 0)
        throw DomainError("generate_scene: negative counts");

    const auto& vocab =
        config.vocabulary.empty() ? default_vocabulary() : config.vocabulary;
    Rng rng(seed ^ 0x5ce9e5u);

    SceneDescription scene;
    scene.bounds = Rect{0.0, 0.0, config.width, config.height};
    scene.rng_seed = seed;

    int gw = static_cast<int>(config.width);
    int gh = static_cast<int>(config.height);

    // Grid-aligned obstacles, interior only, retried until free space stays
    // connected.
    for (int i = 0; i < config.obstacle_count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            int ow = 1 + static_cast<int>(rng.next_below(
                             static_cast<std::uint64_t>(config.obstacle_max_extent)));
            int oh = 1 + static_cast<int>(rng.next_below(
                             static_cast<std::uint64_t>(config.obstacle_max_extent)));
            if (ow >= gw - 2 || oh >= gh - 2) continue;
            int ox = 1 + static_cast<int>(rng.next_below(
                             static_cast<std::uint64_t>(gw - 1 - ow)));
            int oy = 1 + static_cast<int>(rng.next_below(
                             static_cast<std::uint64_t>(gh - 1 - oh)));
            Rect cand{static_cast<double>(ox), static_cast<double>(oy),
                      static_cast<double>(ox + ow), static_cast<double>(oy + oh)};
            bool overlaps = false;
            for (const auto& o : scene.obstacles)
                if (o.intersects(cand)) overlaps = true;
            if (overlaps) continue;
            scene.obstacles.push_back(cand);
            if (!free_space_connected(config.width, config.height, scene.obstacles)) {
                scene.obstacles.pop_back();
                continue;
            }
            placed = true;
        }
        if (!placed)
            throw DomainError("generate_scene: could not place obstacle " +
                              std::to_string(i));
    }

    for (int i = 0; i < config.object_count; ++i) {
        const auto& spec = vocab[static_cast<std::size_t>(i) % vocab.size()];
        bool placed = false;
        for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
            Point p{rng.uniform(0.3, config.width - 0.3),
                    rng.uniform(0.3, config.height - 0.3)};
            if (scene.in_obstacle(p)) continue;
            bool too_close = false;
            for (const auto& obj : scene.objects)
                if (distance(obj.position, p) < config.min_separation)
                    too_close = true;
            if (too_close) continue;
            scene.objects.push_back(SceneObject{i, spec.label, spec.description, p});
            placed = true;
        }
        if (!placed)
            throw DomainError(
                "generate_scene: placement failure, free area cannot hold " +
                std::to_string(config.object_count) + " objects at separation " +
                std::to_string(config.min_separation));
    }
    return scene;
}

json scene_to_json(const SceneDescription& scene) {
    json obstacles = json::array();
    for (const auto& o : scene.obstacles)
        obstacles.push_back({{"min_x", o.min_x},
                             {"min_y", o.min_y},
                             {"max_x", o.max_x},
                             {"max_y", o.max_y}});
    json objects = json::array();
    for (const auto& obj : scene.objects)
        objects.push_back({{"id", obj.id},
                           {"label", obj.label},
                           {"description", obj.description},
                           {"x", obj.position.x},
                           {"y", obj.position.y}});
    return json{{"bounds",
                 {{"min_x", scene.bounds.min_x},
                  {"min_y", scene.bounds.min_y},
                  {"max_x", scene.bounds.max_x},
                  {"max_y", scene.bounds.max_y}}},
                {"obstacles", obstacles},
                {"objects", objects},
                {"rng_seed", scene.rng_seed}};
}

SceneDescription scene_from_json(const json& j) {
    SceneDescription scene;
    try {
        const auto& b = j.at("bounds");
        scene.bounds = Rect{b.at("min_x"), b.at("min_y"), b.at("max_x"),
                            b.at("max_y")};
        for (const auto& o : j.at("obstacles"))
            scene.obstacles.push_back(Rect{o.at("min_x"), o.at("min_y"),
                                           o.at("max_x"), o.at("max_y")});
        std::set<int> ids;
        for (const auto& o : j.at("objects")) {
            SceneObject obj;
            obj.id = o.at("id");
            obj.label = o.at("label");
            obj.description = o.value("description", "");
            obj.position = Point{o.at("x"), o.at("y")};
            if (obj.label.empty())
                throw ParseError("scene_from_json: empty object label");
            if (!ids.insert(obj.id).second)
                throw ParseError("scene_from_json: duplicate object id " +
                                 std::to_string(obj.id));
            if (!scene.bounds.contains(obj.position) ||
                scene.in_obstacle(obj.position))
                throw ParseError("scene_from_json: object " +
                                 std::to_string(obj.id) +
                                 " outside free space");
            scene.objects.push_back(std::move(obj));
        }
        scene.rng_seed = j.value("rng_seed", 0);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene_from_json: ") + e.what());
    }
    return scene;
}

}  // namespace navmem::sim
