#pragma once

// Shared builders for synthetic observation streams and memories.

#include <string>
#include <vector>

#include "navmem/explore.hpp"
#include "navmem/geometry.hpp"
#include "navmem/memory.hpp"

namespace navmem::testutil {

inline std::vector<sim::ObservationRecord> make_stream(
    const std::vector<Point>& positions,
    const std::vector<std::string>& tokens) {
    std::vector<sim::ObservationRecord> stream;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        sim::ObservationRecord rec;
        rec.t = static_cast<int>(i);
        rec.pose.position = positions[i];
        rec.obs_token = tokens.empty() ? "open area" : tokens[i % tokens.size()];
        stream.push_back(std::move(rec));
    }
    return stream;
}

inline memory::Memory make_memory(const std::vector<Point>& positions,
                                  const std::vector<std::string>& tokens,
                                  memory::MemoryParams params = {}) {
    return memory::build_memory(make_stream(positions, tokens), params);
}

// Random positions spread far enough apart that no dedup merging happens.
inline std::vector<Point> random_positions(Rng& rng, int n, double extent) {
    std::vector<Point> out;
    while (static_cast<int>(out.size()) < n) {
        Point p{rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
        bool ok = true;
        for (const auto& q : out)
            if (distance(p, q) < 0.75) ok = false;
        if (ok) out.push_back(p);
    }
    return out;
}

}  // namespace navmem::testutil
