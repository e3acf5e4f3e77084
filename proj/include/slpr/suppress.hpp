#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "slpr/errors.hpp"
#include "slpr/geom.hpp"

namespace slpr {

/// One scored region proposal. `rect` must contain the polygon's bounding box
/// (within 1e-6); `id` is a stable identifier used to break score ties so the
/// greedy pass is deterministic.
template <typename Scalar>
struct Detection {
    Polygon<Scalar> polygon;
    AxisRect<Scalar> rect;
    Scalar score{};
    std::int64_t id{};
};

using Detectiond = Detection<double>;

template <typename Scalar>
Detection<Scalar> make_detection(Polygon<Scalar> polygon, Scalar score, std::int64_t id) {
    Detection<Scalar> d;
    d.rect = polygon_bbox(polygon);
    d.polygon = std::move(polygon);
    d.score = score;
    d.id = id;
    return d;
}

template <typename Scalar>
void validate_detection(const Detection<Scalar>& d) {
    if (!std::isfinite(static_cast<double>(d.score)) || d.score < Scalar(0) || d.score > Scalar(1)) {
        throw Error("detection score must be finite and in [0, 1]");
    }
    if (!d.rect.contains(polygon_bbox(d.polygon), Scalar(1e-6))) {
        throw InvalidRect("detection rect does not contain its polygon");
    }
}

namespace detail {

/// Greedy suppression: repeatedly keep the best remaining detection (score
/// descending, id ascending on ties) and drop everything overlapping it more
/// than the threshold. The loop is sequential by definition; `overlap` must be
/// a pure function for the result to be reproducible.
template <typename Scalar, typename Overlap>
std::vector<Detection<Scalar>> greedy_suppress(const std::vector<Detection<Scalar>>& dets, Scalar iou_threshold,
                                               Overlap&& overlap) {
    if (!(iou_threshold > Scalar(0) && iou_threshold < Scalar(1))) {
        throw Error("suppression threshold must be in (0, 1)");
    }
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
        return dets[a].id < dets[b].id;
    });

    std::vector<Detection<Scalar>> kept;
    std::vector<bool> suppressed(dets.size(), false);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (suppressed[order[i]]) continue;
        const Detection<Scalar>& top = dets[order[i]];
        kept.push_back(top);
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (suppressed[order[j]]) continue;
            if (overlap(top, dets[order[j]]) > iou_threshold) suppressed[order[j]] = true;
        }
    }
    return kept;
}

}  // namespace detail

/// Rectangle-overlap non-maximum suppression; returns kept detections in keep
/// order. Empty input gives empty output.
template <typename Scalar>
std::vector<Detection<Scalar>> nms(const std::vector<Detection<Scalar>>& dets, Scalar iou_threshold) {
    return detail::greedy_suppress(dets, iou_threshold, [](const Detection<Scalar>& a, const Detection<Scalar>& b) {
        return rect_iou(a.rect, b.rect);
    });
}

/// Polygon-overlap variant: identical greedy pass, but suppression compares
/// the actual region polygons, so thin rotated regions with overlapping
/// bounding boxes survive together.
template <typename Scalar>
std::vector<Detection<Scalar>> pnms(const std::vector<Detection<Scalar>>& dets, Scalar iou_threshold) {
    return detail::greedy_suppress(dets, iou_threshold, [](const Detection<Scalar>& a, const Detection<Scalar>& b) {
        return polygon_iou(a.polygon, b.polygon);
    });
}

}  // namespace slpr
