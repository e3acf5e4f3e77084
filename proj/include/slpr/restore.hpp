#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "slpr/codec.hpp"
#include "slpr/errors.hpp"
#include "slpr/geom.hpp"

namespace slpr {

enum class RestoreMethod { kPls, kBhvp };

struct RestoreConfig {
    RestoreMethod method = RestoreMethod::kPls;
    // Aspect-ratio gate shared with the loss (0 < k <= 1); orientation in
    // restore_pls itself uses the plain h <= w rule.
    double aspect_threshold = 0.8;
};

/// Chain-based restoration: walks the sampled points along the two long
/// sides, extends each chain end through its outermost two points until it
/// meets the near rectangle border (free coordinate clamped into the rect),
/// and closes the loop. Output has 2n+4 vertices, traversed clockwise in
/// image (y-down) coordinates.
///
/// Throws DegenerateRestoration when the assembled polygon has area < 1e-9;
/// callers drop such detections.
template <typename Scalar>
Polygon<Scalar> restore_pls(const SlprTarget<Scalar>& t, const RestoreConfig& cfg = {}) {
    (void)cfg;
    validate_target(t);
    const int n = t.num_lines();
    const AxisRect<Scalar>& r = t.rect;
    const bool horizontal = r.height() < r.width();  // exact square counts as vertical

    // first = the chain walked forward (top for horizontal text, right side
    // for vertical), second = the opposite chain, walked back when closing.
    std::vector<Point<Scalar>> first(static_cast<std::size_t>(n)), second(static_cast<std::size_t>(n));
    if (horizontal) {
        const auto xs = vertical_positions(r, n);
        for (int k = 0; k < n; ++k) {
            first[static_cast<std::size_t>(k)] = {xs[static_cast<std::size_t>(k)], t.line_y[2 * k]};
            second[static_cast<std::size_t>(k)] = {xs[static_cast<std::size_t>(k)], t.line_y[2 * k + 1]};
        }
    } else {
        const auto ys = horizontal_positions(r, n);
        for (int k = 0; k < n; ++k) {
            first[static_cast<std::size_t>(k)] = {t.line_x[2 * k + 1], ys[static_cast<std::size_t>(k)]};
            second[static_cast<std::size_t>(k)] = {t.line_x[2 * k], ys[static_cast<std::size_t>(k)]};
        }
    }

    const int run_axis = horizontal ? 0 : 1;  // coordinate the chains advance along
    const Scalar run_lo = horizontal ? r.x_min : r.y_min;
    const Scalar run_hi = horizontal ? r.x_max : r.y_max;
    const Scalar free_lo = horizontal ? r.y_min : r.x_min;
    const Scalar free_hi = horizontal ? r.y_max : r.x_max;

    auto extend = [&](const Point<Scalar>& outer, const Point<Scalar>& inner, Scalar border) {
        const int free_axis = 1 - run_axis;
        Scalar v = outer[free_axis];
        const Scalar run = inner[run_axis] - outer[run_axis];
        if (run != Scalar(0)) {
            v += (border - outer[run_axis]) / run * (inner[free_axis] - outer[free_axis]);
        }
        Point<Scalar> p;
        p[run_axis] = border;
        p[free_axis] = std::clamp(v, free_lo, free_hi);
        return p;
    };

    const std::size_t last = static_cast<std::size_t>(n - 1);
    const Point<Scalar>& first_next = first[n > 1 ? 1 : 0];
    const Point<Scalar>& first_prev = first[n > 1 ? last - 1 : last];
    const Point<Scalar>& second_next = second[n > 1 ? 1 : 0];
    const Point<Scalar>& second_prev = second[n > 1 ? last - 1 : last];

    Polygon<Scalar> out;
    out.reserve(static_cast<std::size_t>(2 * n + 4));
    out.push_back(extend(first[0], first_next, run_lo));
    out.insert(out.end(), first.begin(), first.end());
    out.push_back(extend(first[last], first_prev, run_hi));
    out.push_back(extend(second[last], second_prev, run_hi));
    out.insert(out.end(), second.rbegin(), second.rend());
    out.push_back(extend(second[0], second_next, run_lo));

    if (!(std::abs(signed_area(out)) >= Scalar(kAreaEpsilon))) {
        throw DegenerateRestoration("restored chain polygon has near-zero area");
    }
    return out;
}

namespace detail {

template <typename Scalar>
struct FitLine {
    Point<Scalar> c;  // a point on the line
    Point<Scalar> d;  // unit direction
};

/// Fits four lines to the boundary samples by exhaustive search over all
/// cyclic splits of the angle-ordered points into four contiguous arcs,
/// scoring each split by the summed total-least-squares residual of one line
/// per arc. Exact (zero residual) on points that truly lie on four lines.
template <typename Scalar>
std::array<FitLine<Scalar>, 4> fit_quad_sides(std::vector<Point<Scalar>> pts, Scalar scale2) {
    const std::size_t m = pts.size();
    Point<Scalar> mean = Point<Scalar>::Zero();
    for (const auto& p : pts) mean += p;
    mean /= Scalar(m);
    std::stable_sort(pts.begin(), pts.end(), [&](const Point<Scalar>& a, const Point<Scalar>& b) {
        const Scalar aa = std::atan2(a.y() - mean.y(), a.x() - mean.x());
        const Scalar ab = std::atan2(b.y() - mean.y(), b.x() - mean.x());
        if (aa != ab) return aa < ab;
        if (a.x() != b.x()) return a.x() < b.x();
        return a.y() < b.y();
    });

    // Prefix sums over the doubled sequence make any cyclic arc contiguous.
    const std::size_t mm = 2 * m;
    std::vector<Scalar> sx(mm + 1, 0), sy(mm + 1, 0), sxx(mm + 1, 0), syy(mm + 1, 0), sxy(mm + 1, 0);
    for (std::size_t i = 0; i < mm; ++i) {
        const Point<Scalar>& p = pts[i % m];
        sx[i + 1] = sx[i] + p.x();
        sy[i + 1] = sy[i] + p.y();
        sxx[i + 1] = sxx[i] + p.x() * p.x();
        syy[i + 1] = syy[i] + p.y() * p.y();
        sxy[i + 1] = sxy[i] + p.x() * p.y();
    }

    const Scalar degenerate_spread = scale2 * Scalar(1e-28);
    const Scalar min_turn = Scalar(1e-12);  // |sin| between adjacent side directions

    // Residual (lambda_min of the scatter matrix) of the TLS line through arc
    // [a, a+len); fills `line`. Returns +inf for arcs with no usable spread.
    auto arc_fit = [&](std::size_t a, std::size_t len, FitLine<Scalar>& line) -> Scalar {
        const std::size_t b = a + len;
        const Scalar cnt = Scalar(len);
        const Scalar mx = (sx[b] - sx[a]) / cnt;
        const Scalar my = (sy[b] - sy[a]) / cnt;
        const Scalar A = (sxx[b] - sxx[a]) - cnt * mx * mx;
        const Scalar C = (syy[b] - syy[a]) - cnt * my * my;
        const Scalar B = (sxy[b] - sxy[a]) - cnt * mx * my;
        const Scalar half = (A + C) / 2;
        const Scalar root = std::sqrt(std::max((A - C) * (A - C) / 4 + B * B, Scalar(0)));
        const Scalar lmax = half + root;
        if (!(lmax > degenerate_spread)) return std::numeric_limits<Scalar>::infinity();
        Point<Scalar> dir(B, lmax - A);
        Point<Scalar> alt(lmax - C, B);
        if (alt.squaredNorm() > dir.squaredNorm()) dir = alt;
        if (!(dir.squaredNorm() > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
        line.c = {mx, my};
        line.d = dir.normalized();
        return std::max(half - root, Scalar(0));
    };

    Scalar best_cost = std::numeric_limits<Scalar>::infinity();
    std::array<FitLine<Scalar>, 4> best{}, cand{};
    bool found = false;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 2; b + 6 <= a + m; ++b) {
            const Scalar cost_ab = arc_fit(a, b - a, cand[0]);
            if (!(cost_ab < best_cost)) continue;
            for (std::size_t c = b + 2; c + 4 <= a + m; ++c) {
                const Scalar cost_bc = arc_fit(b, c - b, cand[1]);
                if (!(cost_ab + cost_bc < best_cost)) continue;
                for (std::size_t d = c + 2; d + 2 <= a + m; ++d) {
                    const Scalar cost =
                        cost_ab + cost_bc + arc_fit(c, d - c, cand[2]) + arc_fit(d, a + m - d, cand[3]);
                    if (!(cost < best_cost)) continue;
                    bool ok = true;
                    for (int e = 0; e < 4 && ok; ++e) {
                        const auto& u = cand[static_cast<std::size_t>(e)].d;
                        const auto& v = cand[static_cast<std::size_t>((e + 1) % 4)].d;
                        ok = std::abs(u.x() * v.y() - u.y() * v.x()) >= min_turn;
                    }
                    if (!ok) continue;
                    best_cost = cost;
                    best = cand;
                    found = true;
                }
            }
        }
    }
    if (!found) throw FitFailure("no valid four-side split of the boundary samples");
    return best;
}

template <typename Scalar>
Point<Scalar> line_intersection(const FitLine<Scalar>& p, const FitLine<Scalar>& q) {
    const Scalar det = p.d.x() * q.d.y() - p.d.y() * q.d.x();
    if (std::abs(det) < Scalar(1e-12)) throw FitFailure("adjacent fitted sides are parallel");
    const Point<Scalar> w = q.c - p.c;
    const Scalar s = (w.x() * q.d.y() - w.y() * q.d.x()) / det;
    return p.c + s * p.d;
}

}  // namespace detail

/// Quadrilateral restoration: fits four side lines through all 4n decoded
/// boundary samples and returns their adjacent intersections, clockwise in
/// image (y-down) coordinates starting from the vertex nearest
/// (x_min, y_min). Exact on targets encoded from true quadrilaterals.
///
/// Throws FitFailure when no four-side fit exists (a side with fewer than two
/// usable points, adjacent sides parallel within 1e-12, a degenerate result,
/// or corners far outside the sample rectangle); `restore` maps that to the
/// rectangle fallback.
template <typename Scalar>
Polygon<Scalar> restore_bhvp(const SlprTarget<Scalar>& t) {
    validate_target(t);
    const auto pts = target_points(t);
    if (pts.size() < 8) throw FitFailure("need at least 8 boundary samples for a four-side fit");

    const Scalar diag2 = Point<Scalar>(t.rect.width(), t.rect.height()).squaredNorm();
    const auto sides = detail::fit_quad_sides<Scalar>(pts, diag2);

    Polygon<Scalar> quad(4);
    for (int i = 0; i < 4; ++i) {
        quad[static_cast<std::size_t>(i)] =
            detail::line_intersection(sides[static_cast<std::size_t>(i)], sides[static_cast<std::size_t>((i + 1) % 4)]);
    }
    if (!(std::abs(signed_area(quad)) >= Scalar(kAreaEpsilon))) {
        throw FitFailure("fitted quadrilateral is degenerate");
    }
    // Every sample lies inside t.rect and a quadrilateral's minimal box is
    // that rectangle, so honest corners stay near it; a corner beyond half a
    // diagonal means the split fitted collapsed or crossing chains. The
    // negated comparison also trips on NaN coordinates.
    const Scalar margin = Scalar(0.5) * std::sqrt(diag2);
    for (const auto& v : quad) {
        const bool near_rect = v.x() >= t.rect.x_min - margin && v.x() <= t.rect.x_max + margin &&
                               v.y() >= t.rect.y_min - margin && v.y() <= t.rect.y_max + margin;
        if (!near_rect) throw FitFailure("fitted corner strays outside the sample rectangle");
    }
    // Clockwise on screen (y down) means positive shoelace sum in raw coords.
    if (signed_area(quad) < 0) std::reverse(quad.begin(), quad.end());
    const Point<Scalar> anchor(t.rect.x_min, t.rect.y_min);
    std::size_t start = 0;
    for (std::size_t i = 1; i < 4; ++i) {
        if ((quad[i] - anchor).squaredNorm() < (quad[start] - anchor).squaredNorm()) start = i;
    }
    std::rotate(quad.begin(), quad.begin() + static_cast<std::ptrdiff_t>(start), quad.end());
    return quad;
}

/// Method dispatch with the documented safety net: a quadrilateral fit that
/// fails falls back to the target's rectangle so batch evaluation never stops
/// on one bad region.
template <typename Scalar>
Polygon<Scalar> restore(const SlprTarget<Scalar>& t, const RestoreConfig& cfg = {}) {
    if (cfg.method == RestoreMethod::kPls) return restore_pls(t, cfg);
    try {
        return restore_bhvp(t);
    } catch (const FitFailure&) {
        return t.rect.corners();
    }
}

}  // namespace slpr
