// This file is part of the vosfuse toolkit.
//
// Copyright 2026 the vosfuse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vos/losses.hpp"

#include "vos/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vos::fusion {

namespace {

constexpr double kClampEpsilon = 1e-7;
constexpr int kWeightWindow = 31; // box side for the border weights

void check(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("losses: " + msg);
}

struct WindowStats {
    double mu_x, mu_y, var_x, var_y, cov;
};

// population moments over the window at (wy, wx)
WindowStats window_stats(const ProbMap& x, const ProbMap& y, int wy, int wx, int k) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int dy = 0; dy < k; ++dy) {
        const double* xr = x.data.data() + static_cast<std::size_t>(wy + dy) * x.width + wx;
        const double* yr = y.data.data() + static_cast<std::size_t>(wy + dy) * y.width + wx;
        for (int dx = 0; dx < k; ++dx) {
            sx += xr[dx];
            sy += yr[dx];
            sxx += xr[dx] * xr[dx];
            syy += yr[dx] * yr[dx];
            sxy += xr[dx] * yr[dx];
        }
    }
    const double n = static_cast<double>(k) * k;
    WindowStats s;
    s.mu_x = sx / n;
    s.mu_y = sy / n;
    s.var_x = sxx / n - s.mu_x * s.mu_x;
    s.var_y = syy / n - s.mu_y * s.mu_y;
    s.cov = sxy / n - s.mu_x * s.mu_y;
    return s;
}

void check_ssim_args(const ProbMap& pred, const ProbMap& target, int window) {
    detail::check_same_size(pred, target, "ssim_loss");
    check(window >= 1 && window % 2 == 1, "window must be odd and positive");
    check(window <= pred.height && window <= pred.width, "window exceeds the image");
}

} // namespace

// box kWeightWindow wide, fixed divisor regardless of border overlap
std::vector<double> border_weights(const BinaryMask& gt) {
    const int h = gt.height, w = gt.width;
    const int r = (kWeightWindow - 1) / 2;
    // summed-area table over the 0/1 mask; integer-valued, exact
    std::vector<double> sat(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            sat[static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1)] =
                static_cast<double>(gt.at(x, y)) + sat[static_cast<std::size_t>(y) * (w + 1) + (x + 1)] +
                sat[static_cast<std::size_t>(y + 1) * (w + 1) + x] -
                sat[static_cast<std::size_t>(y) * (w + 1) + x];
    const double denom = static_cast<double>(kWeightWindow) * kWeightWindow;
    std::vector<double> weights(static_cast<std::size_t>(h) * w);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(y - r, 0), y1 = std::min(y + r + 1, h);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(x - r, 0), x1 = std::min(x + r + 1, w);
            const double box = sat[static_cast<std::size_t>(y1) * (w + 1) + x1] -
                               sat[static_cast<std::size_t>(y0) * (w + 1) + x1] -
                               sat[static_cast<std::size_t>(y1) * (w + 1) + x0] +
                               sat[static_cast<std::size_t>(y0) * (w + 1) + x0];
            weights[static_cast<std::size_t>(y) * w + x] =
                1.0 + 5.0 * std::abs(box / denom - static_cast<double>(gt.at(x, y)));
        }
    }
    return weights;
}

double ssim_loss(const ProbMap& pred, const ProbMap& target, int window, double c1, double c2) {
    check_ssim_args(pred, target, window);
    const int rows = pred.height - window + 1, cols = pred.width - window + 1;
    double acc = 0.0;
    for (int wy = 0; wy < rows; ++wy) {
        for (int wx = 0; wx < cols; ++wx) {
            const WindowStats s = window_stats(pred, target, wy, wx, window);
            const double a1 = 2.0 * s.mu_x * s.mu_y + c1;
            const double a2 = 2.0 * s.cov + c2;
            const double b1 = s.mu_x * s.mu_x + s.mu_y * s.mu_y + c1;
            const double b2 = s.var_x + s.var_y + c2;
            acc += (a1 * a2) / (b1 * b2);
        }
    }
    return 1.0 - acc / (static_cast<double>(rows) * cols);
}

LossGrad ssim_loss_with_grad(const ProbMap& pred, const ProbMap& target, int window, double c1,
                             double c2) {
    check_ssim_args(pred, target, window);
    const int rows = pred.height - window + 1, cols = pred.width - window + 1;
    const double n = static_cast<double>(window) * window;
    const double m = static_cast<double>(rows) * cols;
    LossGrad out;
    out.grad.assign(pred.size(), 0.0);
    double acc = 0.0;
    for (int wy = 0; wy < rows; ++wy) {
        for (int wx = 0; wx < cols; ++wx) {
            const WindowStats s = window_stats(pred, target, wy, wx, window);
            const double a1 = 2.0 * s.mu_x * s.mu_y + c1;
            const double a2 = 2.0 * s.cov + c2;
            const double b1 = s.mu_x * s.mu_x + s.mu_y * s.mu_y + c1;
            const double b2 = s.var_x + s.var_y + c2;
            const double denom = b1 * b2;
            acc += (a1 * a2) / denom;
            // d ssim / d pred_p via the quotient rule; the per-pixel
            // partials of the window moments are
            //   d mu_x = 1/n, d var_x = 2 (x_p - mu_x)/n,
            //   d cov  = (y_p - mu_y)/n.
            for (int dy = 0; dy < window; ++dy) {
                for (int dx = 0; dx < window; ++dx) {
                    const std::size_t idx =
                        static_cast<std::size_t>(wy + dy) * pred.width + (wx + dx);
                    const double xp = pred.data[idx];
                    const double yp = target.data[idx];
                    const double da1 = 2.0 * s.mu_y / n;
                    const double da2 = 2.0 * (yp - s.mu_y) / n;
                    const double db1 = 2.0 * s.mu_x / n;
                    const double db2 = 2.0 * (xp - s.mu_x) / n;
                    const double ds = ((da1 * a2 + a1 * da2) * denom -
                                       a1 * a2 * (db1 * b2 + b1 * db2)) /
                                      (denom * denom);
                    out.grad[idx] -= ds / m;
                }
            }
        }
    }
    out.loss = 1.0 - acc / m;
    return out;
}

double weighted_bce_iou_loss(const ProbMap& pred, const BinaryMask& target) {
    return weighted_bce_iou_loss_with_grad(pred, target).loss;
}

LossGrad weighted_bce_iou_loss_with_grad(const ProbMap& pred, const BinaryMask& target) {
    detail::check_same_size(pred, target, "weighted_bce_iou_loss");
    const std::vector<double> w = border_weights(target);
    LossGrad out;
    out.grad.assign(pred.size(), 0.0);

    double w_total = 0.0, bce_acc = 0.0, inter = 0.0, uni = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double g = target.data[i] ? 1.0 : 0.0;
        const double p = std::clamp(pred.data[i], kClampEpsilon, 1.0 - kClampEpsilon);
        w_total += w[i];
        bce_acc += w[i] * -(g * std::log(p) + (1.0 - g) * std::log(1.0 - p));
        inter += w[i] * p * g;
        uni += w[i] * (p + g);
    }
    const double iou_denom = uni - inter + 1.0;
    out.loss = bce_acc / w_total + (1.0 - (inter + 1.0) / iou_denom);

    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred.data[i] < kClampEpsilon || pred.data[i] > 1.0 - kClampEpsilon)
            continue; // flat inside the clamped region
        const double g = target.data[i] ? 1.0 : 0.0;
        const double p = pred.data[i];
        const double d_bce = w[i] * (-g / p + (1.0 - g) / (1.0 - p)) / w_total;
        const double d_inter = w[i] * g;
        const double d_union = w[i];
        const double d_iou =
            -(d_inter * iou_denom - (inter + 1.0) * (d_union - d_inter)) / (iou_denom * iou_denom);
        out.grad[i] = d_bce + d_iou;
    }
    return out;
}

double l1_loss(const ProbMap& pred, const ProbMap& target) {
    detail::check_same_size(pred, target, "l1_loss");
    return kern::abs_diff_sum(pred.data, target.data) / static_cast<double>(pred.size());
}

} // namespace vos::fusion
