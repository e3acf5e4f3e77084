#pragma once

#include <cstdint>
#include <string>

#include "slpr/geom.hpp"

namespace slpr {

/// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
/// generators", OOPSLA 2014). Chosen over std::mt19937_64 because the exact
/// output sequence for a given seed is pinned by these few lines, not by a
/// library implementation: fixtures stay stable across platforms and standard
/// libraries. State advances by the golden-ratio increment; each draw applies
/// the 64-bit finalizer mix.
class SplitMix64 {
   public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

   private:
    std::uint64_t state_;
};

enum class ShapeKind { kRect, kRotatedQuad, kSineBand };

/// Deterministic shape recipe: the same spec always generates the same
/// polygon. Field meaning by kind:
///
///   rect:         axis-aligned, origin (x0, y0), size width x height
///   rotated_quad: width x height rectangle centered at (x0, y0), rotated by
///                 angle_deg, then each corner jittered uniformly in
///                 [-jitter, jitter]^2 using SplitMix64(seed)
///   sine_band:    x in [x0, x0 + width], centerline
///                 y = y0 + amplitude * sin(2*pi*(x - x0)/period), band of
///                 total height `height` around it, sampled at `samples`
///                 points per side (2*samples vertices)
struct ShapeSpec {
    ShapeKind kind = ShapeKind::kRect;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 4.0;
    double height = 1.0;
    double angle_deg = 0.0;
    double jitter = 0.0;
    double amplitude = 0.0;
    double period = 4.0;
    int samples = 128;
};

/// Builds the polygon a spec describes. Throws InvalidSpec on out-of-range
/// parameters (non-positive sizes, samples < 50, non-positive period,
/// negative jitter/amplitude, or jitter so large no simple quad is found).
Polygond generate(const ShapeSpec& spec);

enum class LineAxis { kHorizontal, kVertical };

/// Extreme intersection coordinates of an axis-parallel line with the shape's
/// true (analytic) boundary: x extremes for a horizontal line y = pos, y
/// extremes for a vertical line x = pos. Computed from the shape equations,
/// not the sampled polygon — rect and sine_band spans in closed form (band
/// curve crossings refined by bisection to 1e-9), rotated_quad by per-edge
/// parametric solve. Throws NoIntersection when the line misses the shape.
struct LineSpan {
    double lo = 0.0;
    double hi = 0.0;
};

LineSpan oracle_intersections(const ShapeSpec& spec, LineAxis axis, double pos);

/// Upper bound on how far the sampled sine-band polygon can deviate from the
/// analytic curve: the chord sagitta max|c''| * dx^2 / 8 with
/// dx = width/(samples-1). Zero for the other kinds (their edges are exact).
double sampling_error_bound(const ShapeSpec& spec);

/// Single-line key=value serialization, e.g.
///   "kind=sine_band seed=7 x0=0 y0=0 width=40 height=4 amplitude=1.2 period=10 samples=128".
/// Fields at default values are omitted by format; parse fills defaults for
/// missing keys and throws InvalidSpec on unknown keys or bad values.
std::string format_shape_spec(const ShapeSpec& spec);
ShapeSpec parse_shape_spec(const std::string& line);

}  // namespace slpr
