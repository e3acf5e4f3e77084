#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "slpr/geom.hpp"
#include "slpr/suppress.hpp"

namespace slpr {

template <typename Scalar>
struct GroundTruth {
    Polygon<Scalar> polygon;
    bool dont_care = false;
};

using GroundTruthd = GroundTruth<double>;

struct MatchEntry {
    std::int64_t det_id = 0;
    std::size_t gt_index = 0;
    double iou = 0.0;
};

/// Per-image matching outcome: how many detections were counted (after
/// don't-care exclusion), how many ground truths were scoreable, and which
/// pairs matched.
struct MatchStats {
    long long matched = 0;
    long long counted_dets = 0;
    long long valid_gts = 0;
    std::vector<MatchEntry> matches;
};

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double hmean = 0.0;
    long long matched = 0;
    long long counted_dets = 0;
    long long valid_gts = 0;
    std::vector<MatchEntry> matches;
};

/// Matches one image's detections against its ground truths.
///
/// A detection overlapping any don't-care region beyond the threshold is
/// discarded before counting. The rest are walked in canonical order (score
/// descending, id ascending) and greedily matched one-to-one, each to the
/// unmatched scoreable ground truth of highest IoU, provided that IoU exceeds
/// the threshold.
template <typename Scalar>
MatchStats match_image(const std::vector<Detection<Scalar>>& dets, const std::vector<GroundTruth<Scalar>>& gts,
                       Scalar iou_threshold = Scalar(0.5)) {
    if (!(iou_threshold > Scalar(0) && iou_threshold < Scalar(1))) {
        throw Error("match threshold must be in (0, 1)");
    }
    MatchStats stats;
    for (const auto& gt : gts) {
        if (!gt.dont_care) ++stats.valid_gts;
    }

    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
        return dets[a].id < dets[b].id;
    });

    std::vector<bool> gt_taken(gts.size(), false);
    for (const std::size_t di : order) {
        const Detection<Scalar>& det = dets[di];
        bool excluded = false;
        for (const auto& gt : gts) {
            if (gt.dont_care && polygon_iou(det.polygon, gt.polygon) > iou_threshold) {
                excluded = true;
                break;
            }
        }
        if (excluded) continue;
        ++stats.counted_dets;

        Scalar best_iou = Scalar(0);
        std::size_t best_gt = gts.size();
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (gts[gi].dont_care || gt_taken[gi]) continue;
            const Scalar iou = polygon_iou(det.polygon, gts[gi].polygon);
            if (iou > best_iou) {
                best_iou = iou;
                best_gt = gi;
            }
        }
        if (best_gt < gts.size() && best_iou > iou_threshold) {
            gt_taken[best_gt] = true;
            ++stats.matched;
            stats.matches.push_back({det.id, best_gt, static_cast<double>(best_iou)});
        }
    }
    return stats;
}

/// Corpus-level totals: precision = matched/counted, recall = matched/valid,
/// hmean = 2PR/(P+R); zero denominators give 0.
inline EvalReport aggregate(const std::vector<MatchStats>& per_image) {
    EvalReport r;
    for (const auto& s : per_image) {
        r.matched += s.matched;
        r.counted_dets += s.counted_dets;
        r.valid_gts += s.valid_gts;
        r.matches.insert(r.matches.end(), s.matches.begin(), s.matches.end());
    }
    r.precision = r.counted_dets > 0 ? static_cast<double>(r.matched) / static_cast<double>(r.counted_dets) : 0.0;
    r.recall = r.valid_gts > 0 ? static_cast<double>(r.matched) / static_cast<double>(r.valid_gts) : 0.0;
    r.hmean = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

/// Convenience for scalar precision/recall pairs (reporting identities).
inline double hmean_of(double precision, double recall) {
    return (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace slpr
