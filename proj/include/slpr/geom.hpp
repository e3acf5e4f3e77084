#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "slpr/errors.hpp"

namespace slpr {

// Areas below this (px^2) count as degenerate, lengths below kLengthEpsilon (px) as zero.
inline constexpr double kAreaEpsilon = 1e-9;
inline constexpr double kLengthEpsilon = 1e-9;

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

/// Ordered vertex chain in pixel coordinates. Functions below expect a simple
/// polygon with nonzero area; `validate_polygon` checks that explicitly.
template <typename Scalar>
using Polygon = std::vector<Point<Scalar>>;

using Pointd = Point<double>;
using Polygond = Polygon<double>;

/// Axis-aligned rectangle, x_min < x_max and y_min < y_max when valid.
template <typename Scalar>
struct AxisRect {
    Scalar x_min{}, y_min{}, x_max{}, y_max{};

    Scalar width() const { return x_max - x_min; }
    Scalar height() const { return y_max - y_min; }
    Scalar area() const { return width() * height(); }

    bool valid() const {
        return std::isfinite(static_cast<double>(x_min)) && std::isfinite(static_cast<double>(y_min)) &&
               std::isfinite(static_cast<double>(x_max)) && std::isfinite(static_cast<double>(y_max)) &&
               x_min < x_max && y_min < y_max;
    }

    bool contains(const Point<Scalar>& p, Scalar tol = Scalar(0)) const {
        return p.x() >= x_min - tol && p.x() <= x_max + tol && p.y() >= y_min - tol && p.y() <= y_max + tol;
    }

    bool contains(const AxisRect& other, Scalar tol = Scalar(0)) const {
        return other.x_min >= x_min - tol && other.y_min >= y_min - tol && other.x_max <= x_max + tol &&
               other.y_max <= y_max + tol;
    }

    Point<Scalar> clamp(const Point<Scalar>& p) const {
        return {std::clamp(p.x(), x_min, x_max), std::clamp(p.y(), y_min, y_max)};
    }

    Polygon<Scalar> corners() const {
        return {{x_min, y_min}, {x_max, y_min}, {x_max, y_max}, {x_min, y_max}};
    }
};

using AxisRectd = AxisRect<double>;

namespace detail {

template <typename Scalar>
Scalar cross(const Point<Scalar>& o, const Point<Scalar>& a, const Point<Scalar>& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

template <typename Scalar>
Scalar point_segment_distance(const Point<Scalar>& p, const Point<Scalar>& a, const Point<Scalar>& b) {
    const Point<Scalar> ab = b - a;
    const Scalar len2 = ab.squaredNorm();
    if (len2 <= Scalar(0)) return (p - a).norm();
    const Scalar t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
    return (p - (a + t * ab)).norm();
}

template <typename Scalar>
bool segments_properly_cross(const Point<Scalar>& a1, const Point<Scalar>& a2, const Point<Scalar>& b1,
                             const Point<Scalar>& b2) {
    const Scalar d1 = cross(b1, b2, a1);
    const Scalar d2 = cross(b1, b2, a2);
    const Scalar d3 = cross(a1, a2, b1);
    const Scalar d4 = cross(a1, a2, b2);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

/// True when the two segments cross or come within `tol` of touching.
template <typename Scalar>
bool segments_within(const Point<Scalar>& a1, const Point<Scalar>& a2, const Point<Scalar>& b1,
                     const Point<Scalar>& b2, Scalar tol) {
    if (segments_properly_cross(a1, a2, b1, b2)) return true;
    return point_segment_distance(a1, b1, b2) <= tol || point_segment_distance(a2, b1, b2) <= tol ||
           point_segment_distance(b1, a1, a2) <= tol || point_segment_distance(b2, a1, a2) <= tol;
}

// Deterministic operand ordering so symmetric binary operations run the exact
// same float sequence regardless of argument order.
template <typename Scalar>
bool canonical_less(const Polygon<Scalar>& a, const Polygon<Scalar>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].x() != b[i].x()) return a[i].x() < b[i].x();
        if (a[i].y() != b[i].y()) return a[i].y() < b[i].y();
    }
    return false;
}

template <typename Scalar>
void raw_minmax(const Polygon<Scalar>& p, Scalar& x0, Scalar& y0, Scalar& x1, Scalar& y1) {
    x0 = y0 = std::numeric_limits<Scalar>::max();
    x1 = y1 = std::numeric_limits<Scalar>::lowest();
    for (const auto& v : p) {
        x0 = std::min(x0, v.x());
        y0 = std::min(y0, v.y());
        x1 = std::max(x1, v.x());
        y1 = std::max(y1, v.y());
    }
}

}  // namespace detail

template <typename Scalar>
Scalar signed_area(const Polygon<Scalar>& p) {
    if (p.size() < 3) return Scalar(0);
    Scalar acc = 0;
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
        acc += p[j].x() * p[i].y() - p[i].x() * p[j].y();
    }
    return acc / Scalar(2);
}

/// Absolute (orientation independent) polygon area.
template <typename Scalar>
Scalar polygon_area(const Polygon<Scalar>& p) {
    const Scalar a = std::abs(signed_area(p));
    if (!(a >= Scalar(kAreaEpsilon))) throw DegeneratePolygon("polygon area below epsilon");
    return a;
}

/// Tightest axis-aligned rectangle containing all vertices.
template <typename Scalar>
AxisRect<Scalar> polygon_bbox(const Polygon<Scalar>& p) {
    if (p.size() < 3) throw DegeneratePolygon("polygon needs at least 3 vertices");
    AxisRect<Scalar> r;
    detail::raw_minmax(p, r.x_min, r.y_min, r.x_max, r.y_max);
    if (!(r.width() >= Scalar(kLengthEpsilon)) || !(r.height() >= Scalar(kLengthEpsilon))) {
        throw DegeneratePolygon("polygon bounding box is degenerate");
    }
    return r;
}

/// O(n^2) check that no two non-adjacent edges cross or touch within `tol`.
template <typename Scalar>
bool is_simple(const Polygon<Scalar>& p, Scalar tol = Scalar(kLengthEpsilon)) {
    const std::size_t n = p.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i2 = (i + 1) % n;
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t j2 = (j + 1) % n;
            if (j == i || j2 == i || j == i2) continue;  // adjacent edges share a vertex
            if (detail::segments_within(p[i], p[i2], p[j], p[j2], tol)) return false;
        }
    }
    return true;
}

/// Full invariant check: vertex count, consecutive duplicates, area, simplicity.
/// Kept out of the hot paths; call it at ingestion boundaries.
template <typename Scalar>
void validate_polygon(const Polygon<Scalar>& p, Scalar tol = Scalar(kLengthEpsilon)) {
    if (p.size() < 3) throw DegeneratePolygon("polygon needs at least 3 vertices");
    for (const auto& v : p) {
        if (!std::isfinite(static_cast<double>(v.x())) || !std::isfinite(static_cast<double>(v.y()))) {
            throw DegeneratePolygon("polygon has non-finite vertex");
        }
    }
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
        if ((p[i] - p[j]).norm() <= tol) throw DegeneratePolygon("consecutive duplicate vertices");
    }
    polygon_area(p);
    if (!is_simple(p, tol)) throw DegeneratePolygon("polygon is self-intersecting");
}

/// Even-odd crossing test. Boundary points are resolved arbitrarily.
template <typename Scalar>
bool point_in_polygon(const Point<Scalar>& q, const Polygon<Scalar>& p) {
    bool inside = false;
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
        const bool above_i = p[i].y() > q.y();
        const bool above_j = p[j].y() > q.y();
        if (above_i != above_j) {
            const Scalar xi =
                p[i].x() + (q.y() - p[i].y()) / (p[j].y() - p[i].y()) * (p[j].x() - p[i].x());
            if (q.x() < xi) inside = !inside;
        }
    }
    return inside;
}

template <typename Scalar>
Scalar distance_to_boundary(const Point<Scalar>& q, const Polygon<Scalar>& p) {
    Scalar best = std::numeric_limits<Scalar>::max();
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
        best = std::min(best, detail::point_segment_distance(q, p[j], p[i]));
    }
    return best;
}

template <typename Scalar>
Polygon<Scalar> translated(const Polygon<Scalar>& p, const Point<Scalar>& d) {
    Polygon<Scalar> out = p;
    for (auto& v : out) v += d;
    return out;
}

template <typename Scalar>
Polygon<Scalar> scaled(const Polygon<Scalar>& p, Scalar s) {
    Polygon<Scalar> out = p;
    for (auto& v : out) v *= s;
    return out;
}

/// Ear-clipping triangulation of a simple polygon, CCW triangles out.
/// Collinear (zero area) corners are dropped without emitting a triangle, so
/// chains of collinear vertices are fine. Guaranteed to terminate: when no
/// clean ear is found the most convex corner is clipped anyway.
template <typename Scalar>
std::vector<std::array<Point<Scalar>, 3>> triangulate(const Polygon<Scalar>& poly) {
    std::vector<std::array<Point<Scalar>, 3>> tris;
    if (poly.size() < 3) return tris;

    Polygon<Scalar> pts = poly;
    if (signed_area(pts) < 0) std::reverse(pts.begin(), pts.end());

    Scalar x0, y0, x1, y1;
    detail::raw_minmax(pts, x0, y0, x1, y1);
    const Scalar diag2 = (Point<Scalar>(x1, y1) - Point<Scalar>(x0, y0)).squaredNorm();
    const Scalar eps_area = std::max(Scalar(1e-12) * diag2, Scalar(1e-300));

    std::vector<std::size_t> idx;
    idx.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (idx.empty() || (pts[i] - pts[idx.back()]).squaredNorm() > Scalar(0)) idx.push_back(i);
    }
    while (idx.size() > 1 && (pts[idx.front()] - pts[idx.back()]).squaredNorm() == Scalar(0)) idx.pop_back();

    // A vertex anywhere on the closed candidate triangle blocks the ear: a
    // reflex vertex exactly on the chord a-c would otherwise let the clip
    // emit a triangle overlapping the rest of the polygon.
    auto blocks_ear = [&](const Point<Scalar>& a, const Point<Scalar>& b, const Point<Scalar>& c,
                          const Point<Scalar>& q) {
        return detail::cross(a, b, q) >= -eps_area && detail::cross(b, c, q) >= -eps_area &&
               detail::cross(c, a, q) >= -eps_area;
    };

    while (idx.size() > 3) {
        const std::size_t m = idx.size();
        bool clipped = false;
        std::size_t best_i = 0;
        Scalar best_cross = std::numeric_limits<Scalar>::lowest();

        for (std::size_t i = 0; i < m; ++i) {
            const Point<Scalar>& a = pts[idx[(i + m - 1) % m]];
            const Point<Scalar>& b = pts[idx[i]];
            const Point<Scalar>& c = pts[idx[(i + 1) % m]];
            const Scalar cr = detail::cross(a, b, c);
            if (std::abs(cr) <= eps_area) {
                // Straight-through or spike corner: remove, nothing to emit.
                idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
            if (cr < 0) continue;  // reflex
            if (cr > best_cross) {
                best_cross = cr;
                best_i = i;
            }
            bool blocked = false;
            for (std::size_t k = 0; k < m && !blocked; ++k) {
                if (k == i || k == (i + m - 1) % m || k == (i + 1) % m) continue;
                blocked = blocks_ear(a, b, c, pts[idx[k]]);
            }
            if (!blocked) {
                tris.push_back({a, b, c});
                idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
        }
        if (!clipped) {
            // Numerically stuck; clip the widest convex corner to make progress.
            const std::size_t m2 = idx.size();
            const Point<Scalar>& a = pts[idx[(best_i + m2 - 1) % m2]];
            const Point<Scalar>& b = pts[idx[best_i]];
            const Point<Scalar>& c = pts[idx[(best_i + 1) % m2]];
            if (best_cross > 0) tris.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best_i));
        }
    }
    if (idx.size() == 3) {
        const Point<Scalar>& a = pts[idx[0]];
        const Point<Scalar>& b = pts[idx[1]];
        const Point<Scalar>& c = pts[idx[2]];
        if (detail::cross(a, b, c) > eps_area) tris.push_back({a, b, c});
    }
    return tris;
}

namespace detail {

/// Area of the intersection of two CCW triangles (Sutherland-Hodgman clip).
template <typename Scalar>
Scalar triangle_clip_area(const std::array<Point<Scalar>, 3>& subject, const std::array<Point<Scalar>, 3>& clip) {
    std::vector<Point<Scalar>> cur(subject.begin(), subject.end());
    std::vector<Point<Scalar>> next;
    next.reserve(8);
    for (std::size_t e = 0; e < 3 && !cur.empty(); ++e) {
        const Point<Scalar>& a = clip[e];
        const Point<Scalar>& b = clip[(e + 1) % 3];
        next.clear();
        for (std::size_t i = 0, j = cur.size() - 1; i < cur.size(); j = i++) {
            const Scalar dj = cross(a, b, cur[j]);
            const Scalar di = cross(a, b, cur[i]);
            if (dj >= 0) next.push_back(cur[j]);
            if ((dj > 0 && di < 0) || (dj < 0 && di > 0)) {
                const Scalar t = dj / (dj - di);
                next.push_back(cur[j] + t * (cur[i] - cur[j]));
            }
        }
        cur = next;
    }
    if (cur.size() < 3) return Scalar(0);
    Scalar acc = 0;
    for (std::size_t i = 0, j = cur.size() - 1; i < cur.size(); j = i++) {
        acc += cur[j].x() * cur[i].y() - cur[i].x() * cur[j].y();
    }
    return std::abs(acc) / Scalar(2);
}

template <typename Scalar>
struct TriBox {
    std::array<Point<Scalar>, 3> tri;
    Scalar x0, y0, x1, y1;
};

template <typename Scalar>
std::vector<TriBox<Scalar>> boxed_triangles(const Polygon<Scalar>& p) {
    std::vector<TriBox<Scalar>> out;
    for (const auto& t : triangulate(p)) {
        TriBox<Scalar> tb;
        tb.tri = t;
        tb.x0 = std::min({t[0].x(), t[1].x(), t[2].x()});
        tb.y0 = std::min({t[0].y(), t[1].y(), t[2].y()});
        tb.x1 = std::max({t[0].x(), t[1].x(), t[2].x()});
        tb.y1 = std::max({t[0].y(), t[1].y(), t[2].y()});
        out.push_back(tb);
    }
    return out;
}

}  // namespace detail

/// Area of a∩b for simple polygons, convex or not: both operands are
/// decomposed into triangles and the pairwise convex intersections summed.
/// Disjoint inputs give 0; the result is symmetric in its arguments.
template <typename Scalar>
Scalar polygon_intersection_area(const Polygon<Scalar>& a, const Polygon<Scalar>& b) {
    const Polygon<Scalar>* first = &a;
    const Polygon<Scalar>* second = &b;
    if (detail::canonical_less(b, a)) std::swap(first, second);

    Scalar ax0, ay0, ax1, ay1, bx0, by0, bx1, by1;
    detail::raw_minmax(*first, ax0, ay0, ax1, ay1);
    detail::raw_minmax(*second, bx0, by0, bx1, by1);
    if (ax1 <= bx0 || bx1 <= ax0 || ay1 <= by0 || by1 <= ay0) return Scalar(0);

    const auto ta = detail::boxed_triangles(*first);
    const auto tb = detail::boxed_triangles(*second);
    Scalar acc = 0;
    for (const auto& ua : ta) {
        for (const auto& ub : tb) {
            if (ua.x1 <= ub.x0 || ub.x1 <= ua.x0 || ua.y1 <= ub.y0 || ub.y1 <= ua.y0) continue;
            acc += detail::triangle_clip_area(ua.tri, ub.tri);
        }
    }
    return acc;
}

/// |a∩b| / (|a|+|b|-|a∩b|), in [0,1]. Throws DegeneratePolygon on zero-area input.
template <typename Scalar>
Scalar polygon_iou(const Polygon<Scalar>& a, const Polygon<Scalar>& b) {
    const Scalar area_a = polygon_area(a);
    const Scalar area_b = polygon_area(b);
    const Scalar inter = polygon_intersection_area(a, b);
    const Scalar uni = area_a + area_b - inter;
    if (uni <= Scalar(0)) return Scalar(0);
    return std::clamp(inter / uni, Scalar(0), Scalar(1));
}

template <typename Scalar>
Scalar rect_iou(const AxisRect<Scalar>& a, const AxisRect<Scalar>& b) {
    if (!a.valid() || !b.valid()) throw InvalidRect("rect_iou requires valid rectangles");
    const Scalar iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const Scalar ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (iw <= 0 || ih <= 0) return Scalar(0);
    const Scalar inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

/// Resample an open polyline to exactly `count` points, uniform in arc length,
/// keeping both endpoints.
template <typename Scalar>
std::vector<Point<Scalar>> resample_polyline(const std::vector<Point<Scalar>>& pts, std::size_t count) {
    if (pts.size() < 2 || count < 2) throw Error("resample_polyline needs >=2 input and output points");
    std::vector<Scalar> cum(pts.size(), Scalar(0));
    for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
    const Scalar total = cum.back();
    std::vector<Point<Scalar>> out;
    out.reserve(count);
    out.push_back(pts.front());
    std::size_t seg = 1;
    for (std::size_t k = 1; k + 1 < count; ++k) {
        const Scalar target = total * Scalar(k) / Scalar(count - 1);
        while (seg + 1 < pts.size() && cum[seg] < target) ++seg;
        const Scalar seg_len = cum[seg] - cum[seg - 1];
        const Scalar t = seg_len > 0 ? (target - cum[seg - 1]) / seg_len : Scalar(0);
        out.push_back(pts[seg - 1] + t * (pts[seg] - pts[seg - 1]));
    }
    out.push_back(pts.back());
    return out;
}

}  // namespace slpr
