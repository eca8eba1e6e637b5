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

// AVX2 kernel variants. This translation unit is compiled with -mavx2 and
// must only be reached through the runtime dispatcher. Element-wise maps
// (blend, threshold) round identically to the scalar path; reductions use
// a fixed 4-lane accumulation order.

#include "vos/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace vos::kern {
namespace {

inline double hsum4(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

inline __m256d abs_pd(__m256d x) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, x);
}

// 4 mask bytes -> 4 doubles in {0.0, 1.0}
inline __m256d mask4_to_pd(const std::uint8_t* m) {
    const __m128i bytes = _mm_cvtsi32_si128(static_cast<int>(
        static_cast<std::uint32_t>(m[0]) | (static_cast<std::uint32_t>(m[1]) << 8) |
        (static_cast<std::uint32_t>(m[2]) << 16) | (static_cast<std::uint32_t>(m[3]) << 24)));
    const __m128i zero = _mm_setzero_si128();
    const __m128i nz = _mm_andnot_si128(_mm_cmpeq_epi8(bytes, zero), _mm_set1_epi8(1));
    return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(nz));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum4(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    double s = hsum4(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double abs_diff_sum_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i))));
    double s = hsum4(acc);
    for (; i < n; ++i) s += std::fabs(x[i] - y[i]);
    return s;
}

double abs_diff_sum_mask_avx2(const double* x, const std::uint8_t* m, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), mask4_to_pd(m + i))));
    double s = hsum4(acc);
    for (; i < n; ++i) s += std::fabs(x[i] - (m[i] ? 1.0 : 0.0));
    return s;
}

void blend_avx2(double* out, const double* a, const double* b, double w, std::size_t n) {
    const double cw = 1.0 - w;
    const __m256d vw = _mm256_set1_pd(w);
    const __m256d vcw = _mm256_set1_pd(cw);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_mul_pd(vw, _mm256_loadu_pd(a + i));
        const __m256d vb = _mm256_mul_pd(vcw, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(va, vb));
    }
    for (; i < n; ++i) out[i] = w * a[i] + cw * b[i];
}

void threshold_gt_avx2(std::uint8_t* out, const double* x, double thr, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(thr);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const int m = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(x + i), vt, _CMP_GT_OQ));
        out[i + 0] = static_cast<std::uint8_t>(m & 1);
        out[i + 1] = static_cast<std::uint8_t>((m >> 1) & 1);
        out[i + 2] = static_cast<std::uint8_t>((m >> 2) & 1);
        out[i + 3] = static_cast<std::uint8_t>((m >> 3) & 1);
    }
    for (; i < n; ++i) out[i] = x[i] > thr ? 1 : 0;
}

std::size_t count_gt_avx2(const double* x, double thr, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(thr);
    std::size_t c = 0, i = 0;
    for (; i + 4 <= n; i += 4) {
        const int m = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(x + i), vt, _CMP_GT_OQ));
        c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(m)));
    }
    for (; i < n; ++i) c += (x[i] > thr);
    return c;
}

void mask_counts_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t n,
                      std::uint64_t* intersection, std::uint64_t* union_) {
    const __m256i zero = _mm256_setzero_si256();
    std::uint64_t both = 0, any = 0;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i za = _mm256_cmpeq_epi8(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)), zero);
        const __m256i zb = _mm256_cmpeq_epi8(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)), zero);
        // za,zb flag zero bytes; both-set and any-set counts follow from De Morgan
        const unsigned neither = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_or_si256(za, zb)));
        const unsigned none = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_and_si256(za, zb)));
        both += 32u - static_cast<unsigned>(__builtin_popcount(neither));
        any += 32u - static_cast<unsigned>(__builtin_popcount(none));
    }
    for (; i < n; ++i) {
        const bool fa = a[i] != 0, fb = b[i] != 0;
        both += (fa && fb);
        any += (fa || fb);
    }
    *intersection = both;
    *union_ = any;
}

} // namespace

namespace detail {

const Backend* avx2_backend_impl() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Backend impl{
        "avx2",
        &sum_avx2,
        &dot_avx2,
        &abs_diff_sum_avx2,
        &abs_diff_sum_mask_avx2,
        &blend_avx2,
        &threshold_gt_avx2,
        &count_gt_avx2,
        &mask_counts_avx2,
    };
    return &impl;
}

} // namespace detail
} // namespace vos::kern
