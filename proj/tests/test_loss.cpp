#include <doctest.h>

#include <cmath>
#include <vector>

#include "slpr/errors.hpp"
#include "slpr/loss.hpp"
#include "slpr/synth.hpp"

using namespace slpr;

namespace {

// Central finite difference of a scalar function of one coordinate.
template <typename F>
double fd(F&& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("smooth L1 values on both branches") {
    CHECK(smooth_l1(0.0, 0.0) == 0.0);
    CHECK(smooth_l1(0.5, 0.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(smooth_l1(-0.5, 0.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(smooth_l1(1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));   // branch join
    CHECK(smooth_l1(2.0, 0.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(smooth_l1(10.0, 3.0) == doctest::Approx(6.5).epsilon(1e-15));
    CHECK(smooth_l1(3.0, 10.0) == smooth_l1(10.0, 3.0));  // symmetric in its arguments
}

TEST_CASE("smooth L1 is continuous and once-differentiable at the kink") {
    const double eps = 1e-9;
    CHECK(std::abs(smooth_l1(1.0 - eps, 0.0) - smooth_l1(1.0 + eps, 0.0)) <= 3 * eps);
    CHECK(std::abs(smooth_l1_grad(1.0 - eps, 0.0) - smooth_l1_grad(1.0 + eps, 0.0)) <= 3 * eps);
    CHECK(smooth_l1_grad(5.0, 0.0) == 1.0);    // clipped
    CHECK(smooth_l1_grad(-5.0, 0.0) == -1.0);  // clipped
    CHECK(smooth_l1_grad(0.25, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("scalar gradient matches finite differences away from the kink") {
    SplitMix64 rng(8);
    int probes = 0;
    for (int i = 0; i < 300; ++i) {
        const double z = rng.uniform(-3.0, 3.0);
        const double z_star = rng.uniform(-3.0, 3.0);
        if (std::abs(std::abs(z - z_star) - 1.0) < 1e-4) continue;  // kink neighborhood
        const double analytic = smooth_l1_grad(z, z_star);
        const double numeric = fd([&](double v) { return smooth_l1(v, z_star); }, z);
        CHECK(std::abs(analytic - numeric) <= 1e-5);
        ++probes;
    }
    CHECK(probes >= 250);
}

TEST_CASE("sliding-line loss averages over all 4n coordinates") {
    const std::vector<double> gt(14, 0.0);
    std::vector<double> px(14, 0.5), py(14, 0.5);
    // Every residual is 0.5: loss = smooth_l1(0.5) = 0.125.
    CHECK(slpr_loss(px, py, gt, gt) == doctest::Approx(0.125).epsilon(1e-15));

    // One residual of 2 among 28 coordinates.
    px.assign(14, 0.0);
    py.assign(14, 0.0);
    px[3] = 2.0;
    CHECK(slpr_loss(px, py, gt, gt) == doctest::Approx(1.5 / 28.0).epsilon(1e-15));

    // Swapping the roles of prediction and target changes nothing.
    CHECK(slpr_loss(gt, gt, px, py) == doctest::Approx(1.5 / 28.0).epsilon(1e-15));
}

TEST_CASE("loss scales linearly far from the target") {
    const std::vector<double> gt(14, 0.0);
    const std::vector<double> a(14, 10.0), b(14, 20.0);
    const double la = slpr_loss(a, gt, gt, gt);
    const double lb = slpr_loss(b, gt, gt, gt);
    // Linear branch: (d - 0.5) summed over 14 of 28 coordinates.
    CHECK(la == doctest::Approx(9.5 / 2).epsilon(1e-12));
    CHECK(lb - la == doctest::Approx(10.0 / 2).epsilon(1e-12));
}

TEST_CASE("coordinate size mismatches are rejected") {
    const std::vector<double> v14(14, 0.0), v12(12, 0.0), v13(13, 0.0);
    CHECK_THROWS_AS(slpr_loss(v14, v14, v12, v14), SizeMismatch);
    CHECK_THROWS_AS(slpr_loss(v14, v12, v14, v12), SizeMismatch);
    CHECK_THROWS_AS(slpr_loss(v13, v13, v13, v13), SizeMismatch);
    CHECK_THROWS_AS(slpr_loss(std::vector<double>{}, {}, {}, {}), SizeMismatch);
    LossConfig bad;
    bad.k = 0.0;
    CHECK_THROWS_AS(validate_loss_config(bad), Error);
    bad = {};
    bad.lambda_hw = -1;
    CHECK_THROWS_AS(validate_loss_config(bad), Error);
}

TEST_CASE("curved-text weighting gates terms by aspect ratio") {
    const std::vector<double> gt(14, 0.0);
    std::vector<double> px(14, 0.0), py(14, 0.0);
    px[0] = 0.6;  // x-residual sum S_x = smooth_l1(0.6) = 0.18
    py[0] = 0.4;  // y-residual sum S_y = smooth_l1(0.4) = 0.08
    const double sx = 0.5 * 0.6 * 0.6;
    const double sy = 0.5 * 0.4 * 0.4;
    const double inv = 1.0 / 28.0;

    // Wide region (h/w = 0.5 < k): only the y term counts.
    CHECK(slpr_loss_ctw(px, py, gt, gt, AxisRectd{0, 0, 2, 1}) == doctest::Approx(inv * sy).epsilon(1e-12));
    // Tall region (h/w = 2 > 1/k): only the x term counts, weighted by 4.
    CHECK(slpr_loss_ctw(px, py, gt, gt, AxisRectd{0, 0, 1, 2}) == doctest::Approx(inv * 4 * sx).epsilon(1e-12));
    // Near-square (h/w = 1): both count.
    CHECK(slpr_loss_ctw(px, py, gt, gt, AxisRectd{0, 0, 1, 1}) ==
          doctest::Approx(inv * (4 * sx + sy)).epsilon(1e-12));
}

TEST_CASE("aspect gates use strict inequalities at the exact boundaries") {
    const std::vector<double> gt(14, 0.0);
    const std::vector<double> ones(14, 0.6);
    const double sx = 14 * 0.5 * 0.36;
    const double inv = 1.0 / 28.0;

    // h/w == k exactly: 4.0/5.0 and the literal 0.8 round to the same double,
    // so the indicator h/w > k is false by the strict inequality.
    const double at_k = slpr_loss_ctw(ones, gt, gt, gt, AxisRectd{0, 0, 5, 4});
    CHECK(at_k == 0.0);  // x term off, y residuals are zero

    // h/w == 1/k: 1 / 0.8 rounds to exactly 1.25 in double, and height 5,
    // width 4 gives ratio 1.25 exactly, so the y indicator h/w < 1/k is false.
    const double at_inv_k = slpr_loss_ctw(gt, ones, gt, gt, AxisRectd{0, 0, 4, 5});
    CHECK(at_inv_k == 0.0);
    // Just inside the band both terms fire.
    CHECK(slpr_loss_ctw(ones, gt, gt, gt, AxisRectd{0, 0, 5, 4.01}) ==
          doctest::Approx(inv * 4 * sx).epsilon(1e-12));
}

TEST_CASE("vector gradients match finite differences") {
    SplitMix64 rng(99);
    const LossConfig cfg;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> px(14), py(14), gx(14), gy(14);
        for (auto* v : {&px, &py, &gx, &gy}) {
            for (auto& x : *v) x = rng.uniform(-2.0, 2.0);
        }
        const auto g = slpr_loss_grad(px, py, gx, gy, cfg);
        for (std::size_t j = 0; j < 14; ++j) {
            if (std::abs(std::abs(px[j] - gx[j]) - 1.0) > 1e-4) {
                const double numeric = fd(
                    [&](double v) {
                        auto p = px;
                        p[j] = v;
                        return slpr_loss(p, py, gx, gy, cfg);
                    },
                    px[j]);
                CHECK(std::abs(g.d_x[j] - numeric) <= 1e-5);
            }
            if (std::abs(std::abs(py[j] - gy[j]) - 1.0) > 1e-4) {
                const double numeric = fd(
                    [&](double v) {
                        auto p = py;
                        p[j] = v;
                        return slpr_loss(px, p, gx, gy, cfg);
                    },
                    py[j]);
                CHECK(std::abs(g.d_y[j] - numeric) <= 1e-5);
            }
        }
    }
}

TEST_CASE("curved-text gradient respects the gating weights") {
    SplitMix64 rng(7);
    std::vector<double> px(14), py(14), gx(14), gy(14);
    for (auto* v : {&px, &py, &gx, &gy}) {
        for (auto& x : *v) x = rng.uniform(-2.0, 2.0);
    }
    const AxisRectd wide{0, 0, 10, 1};
    const auto g = slpr_loss_ctw_grad(px, py, gx, gy, wide);
    for (std::size_t j = 0; j < 14; ++j) {
        CHECK(g.d_x[j] == 0.0);  // x term gated off for wide regions
        if (std::abs(std::abs(py[j] - gy[j]) - 1.0) > 1e-4) {
            const double numeric = fd(
                [&](double v) {
                    auto p = py;
                    p[j] = v;
                    return slpr_loss_ctw(px, p, gx, gy, wide);
                },
                py[j]);
            CHECK(std::abs(g.d_y[j] - numeric) <= 1e-5);
        }
    }
}
