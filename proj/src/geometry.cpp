#include "navmem/geometry.hpp"

namespace navmem {

namespace {

// Liang-Barsky clip of the constraint p * t <= q over t in [t0, t1].
// p < 0 is an entering boundary (raises t0), p > 0 a leaving one (lowers t1).
bool clip(double p, double q, double& t0, double& t1) {
    if (p == 0.0) return q >= 0.0;
    double t = q / p;
    if (p < 0.0) {
        if (t > t1) return false;
        t0 = std::max(t0, t);
    } else {
        if (t < t0) return false;
        t1 = std::min(t1, t);
    }
    return t0 <= t1;
}

}  // namespace

bool segment_hits_rect(const Point& a, const Point& b, const Rect& r) {
    double dx = b.x - a.x;
    double dy = b.y - a.y;
    double t0 = 0.0;
    double t1 = 1.0;
    if (!clip(-dx, a.x - r.min_x, t0, t1)) return false;
    if (!clip(dx, r.max_x - a.x, t0, t1)) return false;
    if (!clip(-dy, a.y - r.min_y, t0, t1)) return false;
    if (!clip(dy, r.max_y - a.y, t0, t1)) return false;
    if (t1 - t0 < 1e-12) return false;
    // Grazing along an edge is not a hit; require the clipped midpoint to be
    // strictly interior.
    double tm = 0.5 * (t0 + t1);
    Point m{a.x + tm * dx, a.y + tm * dy};
    const double eps = 1e-12;
    return m.x > r.min_x + eps && m.x < r.max_x - eps && m.y > r.min_y + eps &&
           m.y < r.max_y - eps;
}

}  // namespace navmem
