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

namespace vos::metrics {

/// The five per-frame segmentation quality scores. All fields in [0,1].
/// Higher is better except mae, where lower is better.
struct MetricScores {
    double j = 0.0;
    double f = 0.0;
    double mae = 0.0;
    double s = 0.0;
    double e = 0.0;
};

struct MetricConfig {
    double binarize_threshold = 0.5;
    /// Euclidean pixel tolerance for boundary matching; negative selects
    /// the resolution-dependent default.
    double boundary_tolerance = -1.0;
    double s_alpha = 0.5;
};

/// max(1, round(0.008 * image diagonal)), the common benchmark convention.
int default_boundary_tolerance(int width, int height);

/// Intersection-over-union. Both masks empty -> 1, exactly one empty -> 0.
double region_similarity_j(const BinaryMask& pred, const BinaryMask& gt);

/// F-score of boundary precision/recall. A foreground pixel is boundary
/// iff any 4-neighbor is background or out of bounds; a boundary pixel
/// matches when some counterpart boundary pixel lies within `tolerance`
/// (Euclidean). Both boundaries empty -> 1; P + R == 0 -> 0.
double boundary_f(const BinaryMask& pred, const BinaryMask& gt, double tolerance);

/// Mean absolute error between the map and the 0/1 indicator.
double mae(const ProbMap& pred, const BinaryMask& gt);

/// Structure measure: alpha * object term + (1-alpha) * region term, the
/// region term being window SSIM over the 4 sub-windows split at the
/// ground-truth centroid. Degenerate ground truth short-circuits:
/// all background -> 1 - mean(pred), all foreground -> mean(pred).
double s_measure(const ProbMap& pred, const BinaryMask& gt, double alpha = 0.5);

/// Maximum enhanced-alignment score over the 256-threshold sweep k/255.
/// Ties resolve to the lowest threshold.
double e_measure_max(const ProbMap& pred, const BinaryMask& gt);

/// Bundles the five metrics; j and f are computed on the thresholded map.
MetricScores evaluate_all(const ProbMap& pred, const BinaryMask& gt,
                          double binarize_threshold, double boundary_tolerance);
MetricScores evaluate_all(const ProbMap& pred, const BinaryMask& gt, const MetricConfig& config);

/// 1-pixel-wide object contour used by boundary_f; exposed for testing.
BinaryMask boundary_map(const BinaryMask& mask);

} // namespace vos::metrics
