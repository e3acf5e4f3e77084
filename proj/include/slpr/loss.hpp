#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "slpr/codec.hpp"
#include "slpr/errors.hpp"
#include "slpr/geom.hpp"

namespace slpr {

/// Loss weights. lambda_r / lambda_b / lambda_s weight the region-proposal,
/// box, and segment terms of the composite objective and are housed here for
/// completeness; the kernels below implement only the sliding-line term they
/// configure. lambda_hw and k drive the aspect-ratio gating of the curved-text
/// variant; n is the default sliding-line count.
struct LossConfig {
    double lambda_r = 1.0;
    double lambda_b = 1.0;
    double lambda_s = 1.0;
    double lambda_hw = 4.0;
    double k = 0.8;
    int n = 7;
};

inline void validate_loss_config(const LossConfig& cfg) {
    if (!(cfg.lambda_r > 0 && cfg.lambda_b > 0 && cfg.lambda_s > 0 && cfg.lambda_hw > 0)) {
        throw Error("loss weights must be positive");
    }
    if (!(cfg.k > 0 && cfg.k <= 1)) throw Error("aspect threshold k must be in (0, 1]");
    if (cfg.n < 1) throw Error("line count must be positive");
}

/// 0.5 d^2 for |d| < 1, |d| - 0.5 otherwise, d = z - z_star.
template <typename Scalar>
Scalar smooth_l1(Scalar z, Scalar z_star) {
    const Scalar d = std::abs(z - z_star);
    return d < Scalar(1) ? Scalar(0.5) * d * d : d - Scalar(0.5);
}

/// d(smooth_l1)/dz = (z - z_star) clipped to [-1, 1].
template <typename Scalar>
Scalar smooth_l1_grad(Scalar z, Scalar z_star) {
    return std::clamp(z - z_star, Scalar(-1), Scalar(1));
}

namespace detail {

template <typename Scalar>
void check_coord_sizes(const std::vector<Scalar>& pred_x, const std::vector<Scalar>& pred_y,
                       const std::vector<Scalar>& gt_x, const std::vector<Scalar>& gt_y) {
    if (pred_x.size() != gt_x.size() || pred_y.size() != gt_y.size() || pred_x.size() != pred_y.size()) {
        throw SizeMismatch("prediction/target coordinate sizes differ");
    }
    if (pred_x.empty() || pred_x.size() % 2 != 0) throw SizeMismatch("coordinate count must be even and nonzero");
}

template <typename Scalar>
Scalar weighted_coord_loss(const std::vector<Scalar>& pred_x, const std::vector<Scalar>& pred_y,
                           const std::vector<Scalar>& gt_x, const std::vector<Scalar>& gt_y, Scalar wx,
                           Scalar wy) {
    check_coord_sizes(pred_x, pred_y, gt_x, gt_y);
    Scalar sum_x = 0, sum_y = 0;
    for (std::size_t j = 0; j < pred_x.size(); ++j) sum_x += smooth_l1(pred_x[j], gt_x[j]);
    for (std::size_t j = 0; j < pred_y.size(); ++j) sum_y += smooth_l1(pred_y[j], gt_y[j]);
    // pred_x holds 2n values, so 4n = pred_x.size() + pred_y.size().
    const Scalar inv = Scalar(1) / Scalar(pred_x.size() + pred_y.size());
    return inv * (wx * sum_x + wy * sum_y);
}

}  // namespace detail

/// Mean smooth-L1 over all 4n sliding-line coordinates.
template <typename Scalar>
Scalar slpr_loss(const std::vector<Scalar>& pred_x, const std::vector<Scalar>& pred_y,
                 const std::vector<Scalar>& gt_x, const std::vector<Scalar>& gt_y,
                 const LossConfig& cfg = {}) {
    validate_loss_config(cfg);
    return detail::weighted_coord_loss(pred_x, pred_y, gt_x, gt_y, Scalar(1), Scalar(1));
}

template <typename Scalar>
Scalar slpr_loss(const SlprTarget<Scalar>& pred, const SlprTarget<Scalar>& gt, const LossConfig& cfg = {}) {
    return slpr_loss(pred.line_x, pred.line_y, gt.line_x, gt.line_y, cfg);
}

/// Curved-text variant: the x term only counts for tall regions (h/w > k,
/// weighted by lambda_hw), the y term only for wide ones (h/w < 1/k); both are
/// active in the near-square band k < h/w < 1/k, neither indicator fires at
/// exact equality.
template <typename Scalar>
Scalar slpr_loss_ctw(const std::vector<Scalar>& pred_x, const std::vector<Scalar>& pred_y,
                     const std::vector<Scalar>& gt_x, const std::vector<Scalar>& gt_y,
                     const AxisRect<Scalar>& rect, const LossConfig& cfg = {}) {
    validate_loss_config(cfg);
    if (!rect.valid()) throw InvalidRect("loss rect is invalid");
    const Scalar ratio = rect.height() / rect.width();
    const Scalar wx = ratio > Scalar(cfg.k) ? Scalar(cfg.lambda_hw) : Scalar(0);
    const Scalar wy = ratio < Scalar(1) / Scalar(cfg.k) ? Scalar(1) : Scalar(0);
    return detail::weighted_coord_loss(pred_x, pred_y, gt_x, gt_y, wx, wy);
}

template <typename Scalar>
Scalar slpr_loss_ctw(const SlprTarget<Scalar>& pred, const SlprTarget<Scalar>& gt, const LossConfig& cfg = {}) {
    return slpr_loss_ctw(pred.line_x, pred.line_y, gt.line_x, gt.line_y, pred.rect, cfg);
}

/// Analytic gradient of slpr_loss with respect to each predicted coordinate.
template <typename Scalar>
struct CoordGrad {
    std::vector<Scalar> d_x;
    std::vector<Scalar> d_y;
};

template <typename Scalar>
CoordGrad<Scalar> slpr_loss_grad(const std::vector<Scalar>& pred_x, const std::vector<Scalar>& pred_y,
                                 const std::vector<Scalar>& gt_x, const std::vector<Scalar>& gt_y,
                                 const LossConfig& cfg = {}) {
    validate_loss_config(cfg);
    detail::check_coord_sizes(pred_x, pred_y, gt_x, gt_y);
    const Scalar inv = Scalar(1) / Scalar(pred_x.size() + pred_y.size());
    CoordGrad<Scalar> g;
    g.d_x.resize(pred_x.size());
    g.d_y.resize(pred_y.size());
    for (std::size_t j = 0; j < pred_x.size(); ++j) g.d_x[j] = inv * smooth_l1_grad(pred_x[j], gt_x[j]);
    for (std::size_t j = 0; j < pred_y.size(); ++j) g.d_y[j] = inv * smooth_l1_grad(pred_y[j], gt_y[j]);
    return g;
}

template <typename Scalar>
CoordGrad<Scalar> slpr_loss_ctw_grad(const std::vector<Scalar>& pred_x, const std::vector<Scalar>& pred_y,
                                     const std::vector<Scalar>& gt_x, const std::vector<Scalar>& gt_y,
                                     const AxisRect<Scalar>& rect, const LossConfig& cfg = {}) {
    validate_loss_config(cfg);
    if (!rect.valid()) throw InvalidRect("loss rect is invalid");
    detail::check_coord_sizes(pred_x, pred_y, gt_x, gt_y);
    const Scalar ratio = rect.height() / rect.width();
    const Scalar wx = ratio > Scalar(cfg.k) ? Scalar(cfg.lambda_hw) : Scalar(0);
    const Scalar wy = ratio < Scalar(1) / Scalar(cfg.k) ? Scalar(1) : Scalar(0);
    const Scalar inv = Scalar(1) / Scalar(pred_x.size() + pred_y.size());
    CoordGrad<Scalar> g;
    g.d_x.resize(pred_x.size());
    g.d_y.resize(pred_y.size());
    for (std::size_t j = 0; j < pred_x.size(); ++j) g.d_x[j] = inv * wx * smooth_l1_grad(pred_x[j], gt_x[j]);
    for (std::size_t j = 0; j < pred_y.size(); ++j) g.d_y[j] = inv * wy * smooth_l1_grad(pred_y[j], gt_y[j]);
    return g;
}

}  // namespace slpr
