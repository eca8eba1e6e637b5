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

#include "vos/metrics.hpp"

#include "vos/kernels.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vos::metrics {

namespace {

constexpr double kInf = 1e20;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher). Exact for
// integer-valued inputs; f holds 0 at sites and kInf elsewhere.
void edt_1d(const double* f, double* d, int* v, double* z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    auto intersect = [&](int q) {
        return ((f[q] + static_cast<double>(q) * q) -
                (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    };
    for (int q = 1; q < n; ++q) {
        double s = intersect(q);
        while (s <= z[k]) {
            --k;
            s = intersect(q);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

// Squared Euclidean distance to the nearest set pixel; >= kInf when the
// mask is empty.
std::vector<double> squared_edt(const BinaryMask& m) {
    const int w = m.width, h = m.height;
    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = m.at(x, y) ? 0.0 : kInf;
        edt_1d(f.data(), d.data(), v.data(), z.data(), h);
        for (int y = 0; y < h; ++y) tmp[static_cast<std::size_t>(y) * w + x] = d[y];
    }
    std::vector<double> out(tmp.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = tmp[static_cast<std::size_t>(y) * w + x];
        edt_1d(f.data(), d.data(), v.data(), z.data(), w);
        for (int x = 0; x < w; ++x) out[static_cast<std::size_t>(y) * w + x] = d[x];
    }
    return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// 2x/(x^2+1+sigma) over the selected class; background scores 1-pred on
// non-foreground pixels. Two-pass moments keep sigma stable for
// near-constant inputs.
double object_score(const ProbMap& pred, const BinaryMask& gt, bool background) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if ((gt.data[i] != 0) == background) continue;
        sum += background ? 1.0 - pred.data[i] : pred.data[i];
        ++n;
    }
    if (n == 0) return 0.0;
    const double x = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if ((gt.data[i] != 0) == background) continue;
        const double v = (background ? 1.0 - pred.data[i] : pred.data[i]) - x;
        ss += v * v;
    }
    const double sigma = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    return 2.0 * x / (x * x + 1.0 + sigma + DBL_EPSILON);
}

// window SSIM between the map and the indicator over [x0,x1) x [y0,y1)
double region_ssim(const ProbMap& pred, const BinaryMask& gt, int x0, int y0, int x1, int y1) {
    const long long n = static_cast<long long>(x1 - x0) * (y1 - y0);
    if (n <= 0) return 0.0; // empty window; its weight is zero as well
    double sx = 0.0, sy = 0.0;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            sx += pred.at(x, y);
            sy += gt.at(x, y);
        }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double vx = 0.0, vy = 0.0, vxy = 0.0;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            const double dx = pred.at(x, y) - mx;
            const double dy = gt.at(x, y) - my;
            vx += dx * dx;
            vy += dy * dy;
            vxy += dx * dy;
        }
    const double norm = static_cast<double>(n) - 1.0 + DBL_EPSILON;
    vx /= norm;
    vy /= norm;
    vxy /= norm;
    const double a = 4.0 * mx * my * vxy;
    const double b = (mx * mx + my * my) * (vx + vy);
    if (a != 0.0) return a / (b + DBL_EPSILON);
    return b == 0.0 ? 1.0 : 0.0;
}

// 1-based centroid coordinates, rounded half away from zero
void gt_centroid(const BinaryMask& gt, std::size_t fg, int& cx, int& cy) {
    double sx = 0.0, sy = 0.0;
    for (int y = 0; y < gt.height; ++y)
        for (int x = 0; x < gt.width; ++x)
            if (gt.at(x, y)) {
                sx += x + 1;
                sy += y + 1;
            }
    cx = static_cast<int>(std::round(sx / static_cast<double>(fg)));
    cy = static_cast<int>(std::round(sy / static_cast<double>(fg)));
}

} // namespace

int default_boundary_tolerance(int width, int height) {
    const double diag = std::hypot(static_cast<double>(width), static_cast<double>(height));
    return std::max(1, static_cast<int>(std::lround(0.008 * diag)));
}

double region_similarity_j(const BinaryMask& pred, const BinaryMask& gt) {
    detail::check_same_size(pred, gt, "region_similarity_j");
    std::uint64_t inter = 0, uni = 0;
    kern::mask_counts(pred.data, gt.data, inter, uni);
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask boundary_map(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const bool edge = x == 0 || y == 0 || x == mask.width - 1 || y == mask.height - 1;
            if (edge || !mask.at(x - 1, y) || !mask.at(x + 1, y) || !mask.at(x, y - 1) ||
                !mask.at(x, y + 1))
                out.at(x, y) = 1;
        }
    return out;
}

double boundary_f(const BinaryMask& pred, const BinaryMask& gt, double tolerance) {
    detail::check_same_size(pred, gt, "boundary_f");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("boundary_f: tolerance must be >= 0");

    const BinaryMask pb = boundary_map(pred);
    const BinaryMask gb = boundary_map(gt);
    const std::size_t np = pb.foreground_count();
    const std::size_t ng = gb.foreground_count();
    if (np == 0 && ng == 0) return 1.0;
    if (np == 0 || ng == 0) return 0.0;

    const double tol2 = tolerance * tolerance;
    const std::vector<double> to_gt = squared_edt(gb);
    const std::vector<double> to_pred = squared_edt(pb);
    std::size_t hit_p = 0, hit_g = 0;
    for (std::size_t i = 0; i < pb.size(); ++i) {
        if (pb.data[i] && to_gt[i] <= tol2) ++hit_p;
        if (gb.data[i] && to_pred[i] <= tol2) ++hit_g;
    }
    const double precision = static_cast<double>(hit_p) / static_cast<double>(np);
    const double recall = static_cast<double>(hit_g) / static_cast<double>(ng);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double mae(const ProbMap& pred, const BinaryMask& gt) {
    detail::check_same_size(pred, gt, "mae");
    return kern::abs_diff_sum_mask(pred.data, gt.data) / static_cast<double>(pred.size());
}

double s_measure(const ProbMap& pred, const BinaryMask& gt, double alpha) {
    detail::check_same_size(pred, gt, "s_measure");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("s_measure: alpha must be in [0,1]");

    const std::size_t n = pred.size();
    const std::size_t fg = gt.foreground_count();
    if (fg == 0) return clamp01(1.0 - kern::sum(pred.data) / static_cast<double>(n));
    if (fg == n) return clamp01(kern::sum(pred.data) / static_cast<double>(n));

    const double u = static_cast<double>(fg) / static_cast<double>(n);
    const double s_object =
        u * object_score(pred, gt, false) + (1.0 - u) * object_score(pred, gt, true);

    int cx = 0, cy = 0;
    gt_centroid(gt, fg, cx, cy);
    const int w = gt.width, h = gt.height;
    const double area = static_cast<double>(n);
    const double w1 = static_cast<double>(cx) * cy / area;
    const double w2 = static_cast<double>(w - cx) * cy / area;
    const double w3 = static_cast<double>(cx) * (h - cy) / area;
    const double w4 = 1.0 - w1 - w2 - w3;
    const double s_region = w1 * region_ssim(pred, gt, 0, 0, cx, cy) +
                            w2 * region_ssim(pred, gt, cx, 0, w, cy) +
                            w3 * region_ssim(pred, gt, 0, cy, cx, h) +
                            w4 * region_ssim(pred, gt, cx, cy, w, h);

    return clamp01(alpha * s_object + (1.0 - alpha) * s_region);
}

double e_measure_max(const ProbMap& pred, const BinaryMask& gt) {
    detail::check_same_size(pred, gt, "e_measure_max");
    const std::size_t n = pred.size();
    const std::size_t gfg = gt.foreground_count();

    // background pixels forced below every threshold so one count gives
    // the per-threshold intersection size
    std::vector<double> pred_fg(n);
    for (std::size_t i = 0; i < n; ++i) pred_fg[i] = gt.data[i] ? pred.data[i] : -1.0;

    // the alignment term takes one of four values per threshold, one per
    // (prediction, truth) combination; counts carry the rest
    double best = -1.0;
    for (int k = 0; k < 256; ++k) {
        const double thr = k / 255.0;
        const std::size_t cnt = kern::count_gt(pred.data, thr);
        double score;
        if (gfg == 0) {
            score = static_cast<double>(n - cnt) / static_cast<double>(n);
        } else if (gfg == n) {
            score = static_cast<double>(cnt) / static_cast<double>(n);
        } else {
            const std::size_t n11 = kern::count_gt(pred_fg, thr);
            const std::size_t n10 = cnt - n11;
            const std::size_t n01 = gfg - n11;
            const std::size_t n00 = n - cnt - n01;
            const double mu_f = static_cast<double>(cnt) / static_cast<double>(n);
            const double mu_g = static_cast<double>(gfg) / static_cast<double>(n);
            auto cell = [&](double fm, double g, std::size_t count) {
                if (count == 0) return 0.0;
                const double af = fm - mu_f, ag = g - mu_g;
                const double xi = 2.0 * ag * af / (ag * ag + af * af + DBL_EPSILON);
                return static_cast<double>(count) * (xi + 1.0) * (xi + 1.0) / 4.0;
            };
            score = (cell(1, 1, n11) + cell(1, 0, n10) + cell(0, 1, n01) + cell(0, 0, n00)) /
                    static_cast<double>(n);
        }
        if (score > best) best = score; // ties keep the lowest threshold
    }
    return best;
}

MetricScores evaluate_all(const ProbMap& pred, const BinaryMask& gt, double binarize_threshold,
                          double boundary_tolerance) {
    detail::check_same_size(pred, gt, "evaluate_all");
    if (boundary_tolerance < 0.0)
        boundary_tolerance = default_boundary_tolerance(pred.width, pred.height);

    BinaryMask pred_bin(pred.width, pred.height);
    if (!(binarize_threshold >= 0.0 && binarize_threshold <= 1.0))
        throw std::invalid_argument("evaluate_all: binarize threshold must be in [0,1]");
    kern::threshold_gt(pred_bin.data, pred.data, binarize_threshold);

    MetricScores out;
    out.j = region_similarity_j(pred_bin, gt);
    out.f = boundary_f(pred_bin, gt, boundary_tolerance);
    out.mae = mae(pred, gt);
    out.s = s_measure(pred, gt);
    out.e = e_measure_max(pred, gt);
    return out;
}

MetricScores evaluate_all(const ProbMap& pred, const BinaryMask& gt, const MetricConfig& config) {
    detail::check_same_size(pred, gt, "evaluate_all");
    double tol = config.boundary_tolerance;
    if (tol < 0.0) tol = default_boundary_tolerance(pred.width, pred.height);
    if (!(config.binarize_threshold >= 0.0 && config.binarize_threshold <= 1.0))
        throw std::invalid_argument("evaluate_all: binarize threshold must be in [0,1]");

    BinaryMask pred_bin(pred.width, pred.height);
    kern::threshold_gt(pred_bin.data, pred.data, config.binarize_threshold);

    MetricScores out;
    out.j = region_similarity_j(pred_bin, gt);
    out.f = boundary_f(pred_bin, gt, tol);
    out.mae = mae(pred, gt);
    out.s = s_measure(pred, gt, config.s_alpha);
    out.e = e_measure_max(pred, gt);
    return out;
}

} // namespace vos::metrics
