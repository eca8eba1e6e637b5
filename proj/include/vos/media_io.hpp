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

#include "vos/types.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace vos::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- PNG ----------------------------------------------------------------
// 8-bit grayscale and RGB only; palette images are expanded, alpha channels
// stripped, 16-bit files rejected.

/// Foreground iff first-channel value > 127.
BinaryMask read_mask(const std::filesystem::path& path);

/// Single-channel 8-bit image mapped to value/255.
ProbMap read_prob_map(const std::filesystem::path& path);

/// 0/255 single-channel output.
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

/// Quantizes with round-half-away-from-zero to 8 bits.
void write_prob_map(const std::filesystem::path& path, const ProbMap& map);

void write_rgb(const std::filesystem::path& path, const RgbImage& image);

// ---- Middlebury .flo ----------------------------------------------------
// Little-endian: float magic 202021.25, int32 width, int32 height, then
// width*height interleaved (u,v) float pairs. Round-trips bit-exactly.

FlowField read_flo(const std::vector<std::byte>& bytes);
std::vector<std::byte> write_flo(const FlowField& flow);

FlowField read_flo_file(const std::filesystem::path& path);
void write_flo_file(const std::filesystem::path& path, const FlowField& flow);

// ---- Flow visualization --------------------------------------------------

/// Middlebury color-wheel rendering: hue from direction, saturation from
/// magnitude normalized by the largest finite magnitude. Unknown-flow
/// pixels come out black, zero flow white.
RgbImage flow_to_color(const FlowField& flow);

// ---- Binarization ---------------------------------------------------------

/// Pixel is foreground iff value > threshold (strict).
BinaryMask binarize(const ProbMap& map, double threshold);

} // namespace vos::io
