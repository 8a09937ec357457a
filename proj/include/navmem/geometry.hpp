#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace navmem {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point& a, const Point& b) {
        return a.x == b.x && a.y == b.y;
    }
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Axis-aligned rectangle, [min_x, max_x) x [min_y, max_y).
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }

    bool contains(const Point& p) const {
        return p.x >= min_x && p.x < max_x && p.y >= min_y && p.y < max_y;
    }

    bool contains_closed(const Point& p) const {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }

    bool intersects(const Rect& o) const {
        return min_x < o.max_x && o.min_x < max_x && min_y < o.max_y &&
               o.min_y < max_y;
    }
};

// True if the open segment (a,b) passes through the interior of r.
// Endpoints on the boundary do not count as a hit.
bool segment_hits_rect(const Point& a, const Point& b, const Rect& r);

// Deterministic uniform helpers over a 64-bit generator state, so results
// do not depend on libstdc++ distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Approximate standard normal (sum of uniforms is adequate here and
    // keeps the sequence platform-stable).
    double next_normal() {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) s += next_double();
        return s - 6.0;
    }

private:
    std::uint64_t state_;
};

}  // namespace navmem
