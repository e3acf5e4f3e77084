#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "slpr/errors.hpp"
#include "slpr/geom.hpp"

namespace slpr {

/// Sliding lines per direction; 4 rect params + 4n coords = 32 at n = 7.
inline constexpr int kDefaultLines = 7;
inline constexpr int kParamCount = 32;

/// Sliding-line representation of one text region: the minimal axis-aligned
/// rectangle plus, for each of n equally spaced interior lines per direction,
/// the two extreme boundary coordinates along that line.
///
///   line_x: 2n values, (min,max) x on each horizontal line, top to bottom
///   line_y: 2n values, (min,max) y on each vertical line, left to right
template <typename Scalar>
struct SlprTarget {
    AxisRect<Scalar> rect;
    std::vector<Scalar> line_x;
    std::vector<Scalar> line_y;

    int num_lines() const { return static_cast<int>(line_x.size() / 2); }
};

using SlprTargetd = SlprTarget<double>;

/// Interior sliding-line positions lo + (hi-lo)*k/(n+1), k = 1..n.
template <typename Scalar>
std::vector<Scalar> line_positions(Scalar lo, Scalar hi, int n) {
    if (n < 1) throw Error("line count must be positive");
    std::vector<Scalar> pos(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        pos[static_cast<std::size_t>(k - 1)] = lo + (hi - lo) * Scalar(k) / Scalar(n + 1);
    }
    return pos;
}

template <typename Scalar>
std::vector<Scalar> horizontal_positions(const AxisRect<Scalar>& rect, int n) {
    return line_positions(rect.y_min, rect.y_max, n);
}

template <typename Scalar>
std::vector<Scalar> vertical_positions(const AxisRect<Scalar>& rect, int n) {
    return line_positions(rect.x_min, rect.x_max, n);
}

namespace detail {

/// Coordinates along the kept axis where the boundary meets the line
/// {p[cut_axis] == pos}. An edge lying on the line contributes both endpoints;
/// a vertex touching it contributes that vertex (once per adjacent edge).
template <typename Scalar>
std::vector<Scalar> boundary_hits(const Polygon<Scalar>& poly, int cut_axis, Scalar pos) {
    const int keep = 1 - cut_axis;
    std::vector<Scalar> hits;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Scalar pc = poly[j][cut_axis];
        const Scalar qc = poly[i][cut_axis];
        if (pc == pos && qc == pos) {
            hits.push_back(poly[j][keep]);
            hits.push_back(poly[i][keep]);
            continue;
        }
        if ((pc - pos) * (qc - pos) <= 0) {
            const Scalar t = (pos - pc) / (qc - pc);
            hits.push_back(poly[j][keep] + t * (poly[i][keep] - poly[j][keep]));
        }
    }
    return hits;
}

}  // namespace detail

/// All x coordinates where the boundary meets the horizontal line at `y`.
template <typename Scalar>
std::vector<Scalar> horizontal_hits(const Polygon<Scalar>& poly, Scalar y) {
    return detail::boundary_hits(poly, 1, y);
}

/// All y coordinates where the boundary meets the vertical line at `x`.
template <typename Scalar>
std::vector<Scalar> vertical_hits(const Polygon<Scalar>& poly, Scalar x) {
    return detail::boundary_hits(poly, 0, x);
}

/// Checks structural invariants of a target: valid rect, matching even-sized
/// coordinate vectors, every value inside the rect, (min,max) pairs ordered.
template <typename Scalar>
void validate_target(const SlprTarget<Scalar>& t) {
    if (!t.rect.valid()) throw InvalidRect("target rect is invalid");
    if (t.line_x.size() != t.line_y.size()) throw SizeMismatch("line_x/line_y size mismatch");
    if (t.line_x.empty() || t.line_x.size() % 2 != 0) throw SizeMismatch("coordinate count must be even and nonzero");
    for (std::size_t k = 0; k < t.line_x.size(); k += 2) {
        if (!(t.line_x[k] >= t.rect.x_min && t.line_x[k + 1] <= t.rect.x_max && t.line_x[k] <= t.line_x[k + 1])) {
            throw SizeMismatch("line_x values out of rect or unordered");
        }
        if (!(t.line_y[k] >= t.rect.y_min && t.line_y[k + 1] <= t.rect.y_max && t.line_y[k] <= t.line_y[k + 1])) {
            throw SizeMismatch("line_y values out of rect or unordered");
        }
    }
}

/// Ground-truth encoding: for each sliding line take the smallest and largest
/// boundary coordinate along it. The polygon must be simple with nonzero area.
template <typename Scalar>
SlprTarget<Scalar> encode_polygon(const Polygon<Scalar>& poly, int n = kDefaultLines) {
    SlprTarget<Scalar> t;
    t.rect = polygon_bbox(poly);
    t.line_x.reserve(static_cast<std::size_t>(2 * n));
    t.line_y.reserve(static_cast<std::size_t>(2 * n));
    for (const Scalar y : horizontal_positions(t.rect, n)) {
        const auto hits = horizontal_hits(poly, y);
        if (hits.empty()) throw EncodingFailure("horizontal sliding line misses the boundary");
        const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end());
        t.line_x.push_back(*lo);
        t.line_x.push_back(*hi);
    }
    for (const Scalar x : vertical_positions(t.rect, n)) {
        const auto hits = vertical_hits(poly, x);
        if (hits.empty()) throw EncodingFailure("vertical sliding line misses the boundary");
        const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end());
        t.line_y.push_back(*lo);
        t.line_y.push_back(*hi);
    }
    return t;
}

/// Sanitize raw regression output into a well-formed target: coordinates are
/// clamped into the rectangle and each (min,max) pair is put in order.
template <typename Scalar>
SlprTarget<Scalar> decode_params(const AxisRect<Scalar>& rect, std::vector<Scalar> line_x,
                                 std::vector<Scalar> line_y) {
    if (!rect.valid()) throw InvalidRect("decode requires a valid rectangle");
    if (line_x.size() != line_y.size()) throw SizeMismatch("line_x/line_y size mismatch");
    if (line_x.empty() || line_x.size() % 2 != 0) throw SizeMismatch("coordinate count must be even and nonzero");
    for (auto& v : line_x) v = std::clamp(v, rect.x_min, rect.x_max);
    for (auto& v : line_y) v = std::clamp(v, rect.y_min, rect.y_max);
    for (std::size_t k = 0; k < line_x.size(); k += 2) {
        if (line_x[k] > line_x[k + 1]) std::swap(line_x[k], line_x[k + 1]);
        if (line_y[k] > line_y[k + 1]) std::swap(line_y[k], line_y[k + 1]);
    }
    SlprTarget<Scalar> t;
    t.rect = rect;
    t.line_x = std::move(line_x);
    t.line_y = std::move(line_y);
    return t;
}

/// Flatten to [x_min, y_min, x_max, y_max, line_x..., line_y...].
template <typename Scalar>
std::vector<Scalar> to_params(const SlprTarget<Scalar>& t) {
    std::vector<Scalar> p;
    p.reserve(4 + t.line_x.size() + t.line_y.size());
    p.push_back(t.rect.x_min);
    p.push_back(t.rect.y_min);
    p.push_back(t.rect.x_max);
    p.push_back(t.rect.y_max);
    p.insert(p.end(), t.line_x.begin(), t.line_x.end());
    p.insert(p.end(), t.line_y.begin(), t.line_y.end());
    return p;
}

/// Inverse of to_params, sanitizing as decode_params does.
template <typename Scalar>
SlprTarget<Scalar> from_params(const std::vector<Scalar>& p) {
    if (p.size() < 8 || (p.size() - 4) % 4 != 0) throw SizeMismatch("parameter vector must hold 4 + 4n values");
    const std::size_t two_n = (p.size() - 4) / 2;
    AxisRect<Scalar> rect{p[0], p[1], p[2], p[3]};
    std::vector<Scalar> xs(p.begin() + 4, p.begin() + 4 + static_cast<std::ptrdiff_t>(two_n));
    std::vector<Scalar> ys(p.begin() + 4 + static_cast<std::ptrdiff_t>(two_n), p.end());
    return decode_params(rect, std::move(xs), std::move(ys));
}

/// The 4n boundary sample points a target describes: (x, y_line) pairs from
/// the horizontal lines followed by (x_line, y) pairs from the vertical ones.
template <typename Scalar>
std::vector<Point<Scalar>> target_points(const SlprTarget<Scalar>& t) {
    const int n = t.num_lines();
    std::vector<Point<Scalar>> pts;
    pts.reserve(static_cast<std::size_t>(4 * n));
    const auto ys = horizontal_positions(t.rect, n);
    const auto xs = vertical_positions(t.rect, n);
    for (int k = 0; k < n; ++k) {
        pts.emplace_back(t.line_x[2 * k], ys[static_cast<std::size_t>(k)]);
        pts.emplace_back(t.line_x[2 * k + 1], ys[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < n; ++k) {
        pts.emplace_back(xs[static_cast<std::size_t>(k)], t.line_y[2 * k]);
        pts.emplace_back(xs[static_cast<std::size_t>(k)], t.line_y[2 * k + 1]);
    }
    return pts;
}

}  // namespace slpr
