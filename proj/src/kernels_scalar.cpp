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

#include "vos/kernels.hpp"

#include <cmath>

// Reference implementations. Plain sequential loops; the SIMD variants are
// checked against these.

namespace vos::kern {
namespace {

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double abs_diff_sum_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i] - y[i]);
    return s;
}

double abs_diff_sum_mask_scalar(const double* x, const std::uint8_t* m, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i] - (m[i] ? 1.0 : 0.0));
    return s;
}

void blend_scalar(double* out, const double* a, const double* b, double w, std::size_t n) {
    const double cw = 1.0 - w;
    for (std::size_t i = 0; i < n; ++i) out[i] = w * a[i] + cw * b[i];
}

void threshold_gt_scalar(std::uint8_t* out, const double* x, double thr, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > thr ? 1 : 0;
}

std::size_t count_gt_scalar(const double* x, double thr, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += (x[i] > thr);
    return c;
}

void mask_counts_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t n,
                        std::uint64_t* intersection, std::uint64_t* union_) {
    std::uint64_t both = 0, any = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool fa = a[i] != 0, fb = b[i] != 0;
        both += (fa && fb);
        any += (fa || fb);
    }
    *intersection = both;
    *union_ = any;
}

} // namespace

const Backend& scalar_backend() {
    static const Backend impl{
        "scalar",
        &sum_scalar,
        &dot_scalar,
        &abs_diff_sum_scalar,
        &abs_diff_sum_mask_scalar,
        &blend_scalar,
        &threshold_gt_scalar,
        &count_gt_scalar,
        &mask_counts_scalar,
    };
    return impl;
}

} // namespace vos::kern
