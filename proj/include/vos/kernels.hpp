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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops behind the metric and fusion code paths.
// Every operation has a scalar reference implementation and, on x86-64
// hardware with AVX2, a vectorized variant selected at runtime. The two
// are equivalence-tested against each other; reductions may differ by
// accumulation order only.

namespace vos::kern {

struct Backend {
    const char* name;
    // reductions
    double (*sum)(const double* x, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*abs_diff_sum)(const double* x, const double* y, std::size_t n);
    // sum of |x_i - m_i| with m_i in {0,1}
    double (*abs_diff_sum_mask)(const double* x, const std::uint8_t* m, std::size_t n);
    // element-wise maps
    void (*blend)(double* out, const double* a, const double* b, double w, std::size_t n);
    void (*threshold_gt)(std::uint8_t* out, const double* x, double thr, std::size_t n);
    // counters
    std::size_t (*count_gt)(const double* x, double thr, std::size_t n);
    void (*mask_counts)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n,
                        std::uint64_t* intersection, std::uint64_t* union_);
};

const Backend& scalar_backend();

/// AVX2 variant, or nullptr when unsupported by the build or the CPU.
const Backend* avx2_backend();

/// Backend in use; picks the widest supported one unless overridden via
/// set_backend() or the VOSFUSE_KERNEL_BACKEND environment variable.
const Backend& active();

/// name: "auto", "scalar" or "avx2". Returns false if unavailable.
bool set_backend(std::string_view name);

// convenience wrappers over the active backend

inline double sum(std::span<const double> x) {
    return active().sum(x.data(), x.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}
inline double abs_diff_sum(std::span<const double> x, std::span<const double> y) {
    return active().abs_diff_sum(x.data(), y.data(), x.size());
}
inline double abs_diff_sum_mask(std::span<const double> x, std::span<const std::uint8_t> m) {
    return active().abs_diff_sum_mask(x.data(), m.data(), x.size());
}
inline void blend(std::span<double> out, std::span<const double> a, std::span<const double> b, double w) {
    active().blend(out.data(), a.data(), b.data(), w, out.size());
}
inline void threshold_gt(std::span<std::uint8_t> out, std::span<const double> x, double thr) {
    active().threshold_gt(out.data(), x.data(), thr, out.size());
}
inline std::size_t count_gt(std::span<const double> x, double thr) {
    return active().count_gt(x.data(), thr, x.size());
}
inline void mask_counts(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                        std::uint64_t& intersection, std::uint64_t& union_) {
    active().mask_counts(a.data(), b.data(), a.size(), &intersection, &union_);
}

} // namespace vos::kern
