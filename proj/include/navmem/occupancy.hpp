#pragma once

#include <cstddef>
#include <vector>

#include "navmem/geometry.hpp"

namespace navmem::sim {

enum class CellState : unsigned char { Unknown, Explored, Obstacle };

// Discretization of the scene bounds. Cell (cx, cy) covers
// [origin + cx*res, origin + (cx+1)*res) on each axis.
class OccupancyGrid {
public:
    OccupancyGrid(const Rect& bounds, double resolution);

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }

    bool in_grid(int cx, int cy) const {
        return cx >= 0 && cx < width_ && cy >= 0 && cy < height_;
    }

    CellState at(int cx, int cy) const { return cells_[index(cx, cy)]; }

    // Unknown -> Explored/Obstacle only; re-marking a known cell is a no-op.
    void mark(int cx, int cy, CellState state);

    Point cell_center(int cx, int cy) const;
    // Cell containing p; p must lie inside the bounds.
    std::pair<int, int> cell_of(const Point& p) const;

    std::size_t known_count() const { return known_count_; }

private:
    std::size_t index(int cx, int cy) const {
        return static_cast<std::size_t>(cy) * width_ + cx;
    }

    Rect bounds_;
    double resolution_;
    int width_;
    int height_;
    std::vector<CellState> cells_;
    std::size_t known_count_ = 0;
};

struct FrontierCluster {
    std::vector<std::pair<int, int>> cells;  // row-major discovery order
    Point centroid;                          // mean of cell centers
};

// Frontier cell: Explored with at least one 4-connected Unknown neighbor.
// Cells are grouped into 4-connected components via BFS; components smaller
// than min_cluster_size are dropped as noise.
std::vector<FrontierCluster> detect_frontiers(const OccupancyGrid& grid,
                                              int min_cluster_size = 2);

// Index of the cluster whose centroid is nearest to `current`; ties go to
// the smallest index. Returns -1 for an empty list (exploration complete).
int select_next_frontier(const std::vector<FrontierCluster>& frontiers,
                         const Point& current);

}  // namespace navmem::sim
