#pragma once

// Brute-force area/IoU oracles for cross-checking the clipping-based
// geometry. Deliberately independent of slpr/geom.hpp internals: containment
// uses the winding number (geom uses even-odd crossing counts) and areas come
// from uniform sampling instead of decomposition.

#include <algorithm>
#include <cstdint>

#include "slpr/geom.hpp"
#include "slpr/synth.hpp"

namespace slpr::test {

/// Winding-number containment test (nonzero rule).
inline bool wn_inside(const Pointd& q, const Polygond& poly) {
    auto is_left = [](const Pointd& a, const Pointd& b, const Pointd& p) {
        return (b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y());
    };
    int wn = 0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Pointd& a = poly[j];
        const Pointd& b = poly[i];
        if (a.y() <= q.y()) {
            if (b.y() > q.y() && is_left(a, b, q) > 0) ++wn;
        } else {
            if (b.y() <= q.y() && is_left(a, b, q) < 0) --wn;
        }
    }
    return wn != 0;
}

/// Monte-Carlo IoU: uniform samples over the joint bounding box, ratio of
/// points inside both polygons to points inside either. Standard error is
/// about 0.5/sqrt(samples).
inline double mc_iou(const Polygond& a, const Polygond& b, std::uint64_t seed, long long samples = 200000) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const Polygond* p : {&a, &b}) {
        for (const auto& v : *p) {
            x0 = std::min(x0, v.x());
            y0 = std::min(y0, v.y());
            x1 = std::max(x1, v.x());
            y1 = std::max(y1, v.y());
        }
    }
    SplitMix64 rng(seed);
    long long in_both = 0, in_any = 0;
    for (long long s = 0; s < samples; ++s) {
        const Pointd q(rng.uniform(x0, x1), rng.uniform(y0, y1));
        const bool ia = wn_inside(q, a);
        const bool ib = wn_inside(q, b);
        in_both += (ia && ib) ? 1 : 0;
        in_any += (ia || ib) ? 1 : 0;
    }
    return in_any > 0 ? static_cast<double>(in_both) / static_cast<double>(in_any) : 0.0;
}

/// Monte-Carlo absolute area over the polygon's own bounding box.
inline double mc_area(const Polygond& poly, std::uint64_t seed, long long samples = 200000) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& v : poly) {
        x0 = std::min(x0, v.x());
        y0 = std::min(y0, v.y());
        x1 = std::max(x1, v.x());
        y1 = std::max(y1, v.y());
    }
    SplitMix64 rng(seed);
    long long hits = 0;
    for (long long s = 0; s < samples; ++s) {
        if (wn_inside({rng.uniform(x0, x1), rng.uniform(y0, y1)}, poly)) ++hits;
    }
    return (x1 - x0) * (y1 - y0) * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace slpr::test
