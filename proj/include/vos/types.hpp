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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vos {

namespace detail {
inline std::size_t checked_area(int w, int h, const char* type) {
    if (w < 1 || h < 1)
        throw std::invalid_argument(std::string(type) + ": dimensions must be >= 1");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
}
} // namespace detail

/// Per-pixel foreground/background segmentation, row-major, values 0/1.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(detail::checked_area(w, h, "BinaryMask"), fill) {}

    std::size_t size() const { return data.size(); }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (std::uint8_t v : data) n += (v != 0);
        return n;
    }
    bool operator==(const BinaryMask&) const = default;
};

/// Per-pixel probability map in [0,1], row-major. Houses M_sos, M_mos,
/// M_apf and depth maps alike.
struct ProbMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ProbMap() = default;
    ProbMap(int w, int h, double fill = 0.0)
        : width(w), height(h), data(detail::checked_area(w, h, "ProbMap"), fill) {}

    std::size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const ProbMap&) const = default;
};

/// Dense 2-channel optical flow, row-major float planes (u horizontal,
/// v vertical, in pixels). Values with |v| > 1e9 mark unknown flow.
struct FlowField {
    static constexpr float kUnknownThreshold = 1e9f;

    int width = 0;
    int height = 0;
    std::vector<float> u;
    std::vector<float> v;

    FlowField() = default;
    FlowField(int w, int h)
        : width(w), height(h),
          u(detail::checked_area(w, h, "FlowField"), 0.f),
          v(static_cast<std::size_t>(w) * h, 0.f) {}

    std::size_t size() const { return u.size(); }
    static bool is_unknown(float fu, float fv) {
        return std::abs(fu) > kUnknownThreshold || std::abs(fv) > kUnknownThreshold;
    }
    bool operator==(const FlowField&) const = default;
};

/// 8-bit 3-channel image, row-major interleaved RGB.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h), data(detail::checked_area(w, h, "RgbImage") * 3, 0) {}

    std::uint8_t* pixel(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    bool operator==(const RgbImage&) const = default;
};

namespace detail {
template <class A, class B>
void check_same_size(const A& a, const B& b, const char* where) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                                    std::to_string(b.width) + "x" + std::to_string(b.height) + ")");
}
} // namespace detail

} // namespace vos
