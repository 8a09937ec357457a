#include "navmem/occupancy.hpp"

#include <cmath>
#include <queue>

#include "navmem/errors.hpp"

namespace navmem::sim {

OccupancyGrid::OccupancyGrid(const Rect& bounds, double resolution)
    : bounds_(bounds), resolution_(resolution) {
    if (resolution <= 0.0)
        throw DomainError("OccupancyGrid: resolution must be positive");
    width_ = static_cast<int>(std::ceil(bounds.width() / resolution - 1e-9));
    height_ = static_cast<int>(std::ceil(bounds.height() / resolution - 1e-9));
    if (width_ <= 0 || height_ <= 0)
        throw DomainError("OccupancyGrid: empty bounds");
    cells_.assign(static_cast<std::size_t>(width_) * height_,
                  CellState::Unknown);
}

void OccupancyGrid::mark(int cx, int cy, CellState state) {
    auto& cell = cells_[index(cx, cy)];
    if (cell != CellState::Unknown) return;
    if (state == CellState::Unknown) return;
    cell = state;
    ++known_count_;
}

Point OccupancyGrid::cell_center(int cx, int cy) const {
    return Point{bounds_.min_x + (cx + 0.5) * resolution_,
                 bounds_.min_y + (cy + 0.5) * resolution_};
}

std::pair<int, int> OccupancyGrid::cell_of(const Point& p) const {
    int cx = static_cast<int>((p.x - bounds_.min_x) / resolution_);
    int cy = static_cast<int>((p.y - bounds_.min_y) / resolution_);
    cx = std::clamp(cx, 0, width_ - 1);
    cy = std::clamp(cy, 0, height_ - 1);
    return {cx, cy};
}

std::vector<FrontierCluster> detect_frontiers(const OccupancyGrid& grid,
                                              int min_cluster_size) {
    const int w = grid.width();
    const int h = grid.height();
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};

    auto is_frontier = [&](int x, int y) {
        if (grid.at(x, y) != CellState::Explored) return false;
        for (int k = 0; k < 4; ++k) {
            int nx = x + dx[k], ny = y + dy[k];
            if (grid.in_grid(nx, ny) && grid.at(nx, ny) == CellState::Unknown)
                return true;
        }
        return false;
    };

    std::vector<char> visited(static_cast<std::size_t>(w) * h, 0);
    std::vector<FrontierCluster> clusters;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto idx = static_cast<std::size_t>(y) * w + x;
            if (visited[idx] || !is_frontier(x, y)) continue;
            FrontierCluster cluster;
            std::queue<std::pair<int, int>> q;
            q.emplace(x, y);
            visited[idx] = 1;
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop();
                cluster.cells.emplace_back(cx, cy);
                for (int k = 0; k < 4; ++k) {
                    int nx = cx + dx[k], ny = cy + dy[k];
                    if (!grid.in_grid(nx, ny)) continue;
                    auto nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (visited[nidx] || !is_frontier(nx, ny)) continue;
                    visited[nidx] = 1;
                    q.emplace(nx, ny);
                }
            }
            if (static_cast<int>(cluster.cells.size()) < min_cluster_size)
                continue;
            double sx = 0.0, sy = 0.0;
            for (const auto& [cx, cy] : cluster.cells) {
                Point c = grid.cell_center(cx, cy);
                sx += c.x;
                sy += c.y;
            }
            cluster.centroid = Point{sx / cluster.cells.size(),
                                     sy / cluster.cells.size()};
            clusters.push_back(std::move(cluster));
        }
    }
    return clusters;
}

int select_next_frontier(const std::vector<FrontierCluster>& frontiers,
                         const Point& current) {
    int best = -1;
    double best_dist = 0.0;
    for (std::size_t i = 0; i < frontiers.size(); ++i) {
        double d = distance(frontiers[i].centroid, current);
        if (best < 0 || d < best_dist) {
            best = static_cast<int>(i);
            best_dist = d;
        }
    }
    return best;
}

}  // namespace navmem::sim
