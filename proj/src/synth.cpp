#include "slpr/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

#include "slpr/detail/numio.hpp"
#include "slpr/errors.hpp"

namespace slpr {
namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

void check_spec(const ShapeSpec& s) {
    const double fields[] = {s.x0, s.y0, s.width, s.height, s.angle_deg, s.jitter, s.amplitude, s.period};
    for (const double v : fields) {
        if (!std::isfinite(v)) throw InvalidSpec("shape parameters must be finite");
    }
    if (!(s.width > 0.0) || !(s.height > 0.0)) throw InvalidSpec("width and height must be positive");
    if (s.kind == ShapeKind::kRotatedQuad && s.jitter < 0.0) throw InvalidSpec("jitter must be non-negative");
    if (s.kind == ShapeKind::kSineBand) {
        if (s.samples < 50) throw InvalidSpec("sine band needs at least 50 samples per side");
        if (!(s.period > 0.0)) throw InvalidSpec("period must be positive");
        if (s.amplitude < 0.0) throw InvalidSpec("amplitude must be non-negative");
    }
}

Polygond rect_poly(const ShapeSpec& s) {
    return {{s.x0, s.y0}, {s.x0 + s.width, s.y0}, {s.x0 + s.width, s.y0 + s.height}, {s.x0, s.y0 + s.height}};
}

std::array<Pointd, 4> quad_base_corners(const ShapeSpec& s) {
    const double rad = s.angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double sn = std::sin(rad);
    const Pointd center(s.x0, s.y0);
    const std::array<Pointd, 4> local = {Pointd(-s.width / 2, -s.height / 2), Pointd(s.width / 2, -s.height / 2),
                                         Pointd(s.width / 2, s.height / 2), Pointd(-s.width / 2, s.height / 2)};
    std::array<Pointd, 4> world;
    for (std::size_t i = 0; i < 4; ++i) {
        world[i] = center + Pointd(c * local[i].x() - sn * local[i].y(), sn * local[i].x() + c * local[i].y());
    }
    return world;
}

Polygond quad_poly(const ShapeSpec& s) {
    const auto base = quad_base_corners(s);
    if (s.jitter == 0.0) return Polygond(base.begin(), base.end());
    SplitMix64 rng(s.seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Polygond cand(base.begin(), base.end());
        for (auto& v : cand) {
            v.x() += rng.uniform(-s.jitter, s.jitter);
            v.y() += rng.uniform(-s.jitter, s.jitter);
        }
        try {
            validate_polygon(cand);
            return cand;
        } catch (const DegeneratePolygon&) {
            // jitter collapsed the quad; draw again deterministically
        }
    }
    throw InvalidSpec("jitter too large to form a simple quadrilateral");
}

double centerline(const ShapeSpec& s, double x_local) { return s.amplitude * std::sin(kTau * x_local / s.period); }

Polygond band_poly(const ShapeSpec& s) {
    const int m = s.samples;
    Polygond poly;
    poly.reserve(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < m; ++i) {
        const double xl = s.width * static_cast<double>(i) / static_cast<double>(m - 1);
        poly.emplace_back(s.x0 + xl, s.y0 + centerline(s, xl) - s.height / 2);
    }
    for (int i = m - 1; i >= 0; --i) {
        const double xl = s.width * static_cast<double>(i) / static_cast<double>(m - 1);
        poly.emplace_back(s.x0 + xl, s.y0 + centerline(s, xl) + s.height / 2);
    }
    return poly;
}

/// Edge-by-edge parametric intersection used for the quad oracle; written
/// against the segment equations directly rather than the codec's
/// sign-crossing walk.
LineSpan span_from_edges(const Polygond& poly, int cut_axis, double pos) {
    const int keep = 1 - cut_axis;
    LineSpan span{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
    bool found = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const double a = poly[j][cut_axis];
        const double b = poly[i][cut_axis];
        if (a == pos && b == pos) {
            span.lo = std::min({span.lo, poly[j][keep], poly[i][keep]});
            span.hi = std::max({span.hi, poly[j][keep], poly[i][keep]});
            found = true;
            continue;
        }
        if (a == b) continue;
        const double t = (pos - a) / (b - a);
        if (t < 0.0 || t > 1.0) continue;
        const double v = poly[j][keep] + t * (poly[i][keep] - poly[j][keep]);
        span.lo = std::min(span.lo, v);
        span.hi = std::max(span.hi, v);
        found = true;
    }
    if (!found) throw NoIntersection("line does not meet the shape");
    return span;
}

LineSpan rect_span(const ShapeSpec& s, LineAxis axis, double pos) {
    if (axis == LineAxis::kHorizontal) {
        if (pos < s.y0 || pos > s.y0 + s.height) throw NoIntersection("horizontal line misses the rectangle");
        return {s.x0, s.x0 + s.width};
    }
    if (pos < s.x0 || pos > s.x0 + s.width) throw NoIntersection("vertical line misses the rectangle");
    return {s.y0, s.y0 + s.height};
}

LineSpan band_span(const ShapeSpec& s, LineAxis axis, double pos) {
    if (axis == LineAxis::kVertical) {
        const double xl = pos - s.x0;
        if (xl < 0.0 || xl > s.width) throw NoIntersection("vertical line misses the band");
        const double c = s.y0 + centerline(s, xl);
        return {c - s.height / 2, c + s.height / 2};
    }

    // Horizontal line y = pos: find every x where one of the two boundary
    // curves y0 + c(x) -/+ h/2 crosses it, by sign-change bracketing on a grid
    // well below the curve's half-period, refined by bisection; the two
    // vertical end caps contribute their x when the line passes through them.
    const double g = pos - s.y0;
    std::vector<double> hits;
    if (std::abs(g) <= s.height / 2) hits.push_back(0.0);
    const double c_end = centerline(s, s.width);
    if (g >= c_end - s.height / 2 && g <= c_end + s.height / 2) hits.push_back(s.width);

    const double cells_per_period = 64.0;
    const int grid = static_cast<int>(
        std::clamp(cells_per_period * s.width / s.period, 1024.0, 65536.0));
    for (const double offset : {-s.height / 2, s.height / 2}) {
        auto f = [&](double xl) { return centerline(s, xl) + offset - g; };
        double x_prev = 0.0;
        double f_prev = f(0.0);
        for (int i = 1; i <= grid; ++i) {
            const double x_cur = s.width * static_cast<double>(i) / static_cast<double>(grid);
            const double f_cur = f(x_cur);
            if (std::abs(f_prev) < 1e-15) hits.push_back(x_prev);
            if (f_prev * f_cur < 0.0) {
                double lo = x_prev, hi = x_cur, flo = f_prev;
                for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                    const double mid = (lo + hi) / 2;
                    const double fm = f(mid);
                    if (fm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((flo < 0.0) == (fm < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                hits.push_back((lo + hi) / 2);
            }
            x_prev = x_cur;
            f_prev = f_cur;
        }
        if (std::abs(f_prev) < 1e-15) hits.push_back(x_prev);
    }
    if (hits.empty()) throw NoIntersection("horizontal line misses the band");
    const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end());
    return {s.x0 + *lo, s.x0 + *hi};
}

}  // namespace

Polygond generate(const ShapeSpec& spec) {
    check_spec(spec);
    switch (spec.kind) {
        case ShapeKind::kRect:
            return rect_poly(spec);
        case ShapeKind::kRotatedQuad:
            return quad_poly(spec);
        case ShapeKind::kSineBand:
            return band_poly(spec);
    }
    throw InvalidSpec("unknown shape kind");
}

LineSpan oracle_intersections(const ShapeSpec& spec, LineAxis axis, double pos) {
    check_spec(spec);
    if (!std::isfinite(pos)) throw InvalidSpec("line position must be finite");
    switch (spec.kind) {
        case ShapeKind::kRect:
            return rect_span(spec, axis, pos);
        case ShapeKind::kRotatedQuad:
            return span_from_edges(quad_poly(spec), axis == LineAxis::kHorizontal ? 1 : 0, pos);
        case ShapeKind::kSineBand:
            return band_span(spec, axis, pos);
    }
    throw InvalidSpec("unknown shape kind");
}

double sampling_error_bound(const ShapeSpec& spec) {
    if (spec.kind != ShapeKind::kSineBand) return 0.0;
    const double dx = spec.width / static_cast<double>(spec.samples - 1);
    const double max_curvature = spec.amplitude * (kTau / spec.period) * (kTau / spec.period);
    return max_curvature * dx * dx / 8.0;
}

std::string format_shape_spec(const ShapeSpec& spec) {
    using detail::format_double;
    std::string out = "kind=";
    switch (spec.kind) {
        case ShapeKind::kRect:
            out += "rect";
            break;
        case ShapeKind::kRotatedQuad:
            out += "rotated_quad";
            break;
        case ShapeKind::kSineBand:
            out += "sine_band";
            break;
    }
    const ShapeSpec defaults;
    out += " seed=" + std::to_string(spec.seed);
    if (spec.x0 != defaults.x0) out += " x0=" + format_double(spec.x0);
    if (spec.y0 != defaults.y0) out += " y0=" + format_double(spec.y0);
    if (spec.width != defaults.width) out += " width=" + format_double(spec.width);
    if (spec.height != defaults.height) out += " height=" + format_double(spec.height);
    if (spec.angle_deg != defaults.angle_deg) out += " angle_deg=" + format_double(spec.angle_deg);
    if (spec.jitter != defaults.jitter) out += " jitter=" + format_double(spec.jitter);
    if (spec.amplitude != defaults.amplitude) out += " amplitude=" + format_double(spec.amplitude);
    if (spec.period != defaults.period) out += " period=" + format_double(spec.period);
    if (spec.samples != defaults.samples) out += " samples=" + std::to_string(spec.samples);
    return out;
}

ShapeSpec parse_shape_spec(const std::string& line) {
    ShapeSpec spec;
    bool have_kind = false;
    for (const std::string_view tok : detail::split_ws(line)) {
        const std::size_t eq = tok.find('=');
        if (eq == std::string_view::npos) throw InvalidSpec("expected key=value, got '" + std::string(tok) + "'");
        const std::string_view key = tok.substr(0, eq);
        const std::string_view val = tok.substr(eq + 1);
        bool ok = true;
        if (key == "kind") {
            have_kind = true;
            if (val == "rect") {
                spec.kind = ShapeKind::kRect;
            } else if (val == "rotated_quad") {
                spec.kind = ShapeKind::kRotatedQuad;
            } else if (val == "sine_band") {
                spec.kind = ShapeKind::kSineBand;
            } else {
                ok = false;
            }
        } else if (key == "seed") {
            ok = detail::parse_u64(val, spec.seed);
        } else if (key == "x0") {
            ok = detail::parse_double(val, spec.x0);
        } else if (key == "y0") {
            ok = detail::parse_double(val, spec.y0);
        } else if (key == "width") {
            ok = detail::parse_double(val, spec.width);
        } else if (key == "height") {
            ok = detail::parse_double(val, spec.height);
        } else if (key == "angle_deg") {
            ok = detail::parse_double(val, spec.angle_deg);
        } else if (key == "jitter") {
            ok = detail::parse_double(val, spec.jitter);
        } else if (key == "amplitude") {
            ok = detail::parse_double(val, spec.amplitude);
        } else if (key == "period") {
            ok = detail::parse_double(val, spec.period);
        } else if (key == "samples") {
            ok = detail::parse_int(val, spec.samples);
        } else {
            throw InvalidSpec("unknown shape key '" + std::string(key) + "'");
        }
        if (!ok) throw InvalidSpec("bad value for '" + std::string(key) + "': '" + std::string(val) + "'");
    }
    if (!have_kind) throw InvalidSpec("shape spec needs a kind");
    check_spec(spec);
    return spec;
}

}  // namespace slpr
