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

#include <vector>

// Training objectives for the fusion blocks, with hand-derived
// gradients. No autodiff: each *_with_grad returns d loss / d pred as a
// row-major field matching the prediction.

namespace vos::fusion {

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad; // H*W, row-major
};

inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr int kSsimWindow = 11;

/// One minus the mean local structural similarity over every odd square
/// window fully inside the image. Uniform window weights, population
/// moments. The window must fit inside both dimensions.
double ssim_loss(const ProbMap& pred, const ProbMap& target, int window = kSsimWindow,
                 double c1 = kSsimC1, double c2 = kSsimC2);
LossGrad ssim_loss_with_grad(const ProbMap& pred, const ProbMap& target, int window = kSsimWindow,
                             double c1 = kSsimC1, double c2 = kSsimC2);

/// Per-pixel weights shared by both terms of weighted_bce_iou_loss:
/// 1 + 5 |boxmean31(gt) - gt|, zero padded, constant divisor.
std::vector<double> border_weights(const BinaryMask& gt);

/// Border-weighted binary cross-entropy plus soft-IoU. Pixel weights are
/// 1 + 5 |boxmean31(gt) - gt| with zero padding and a constant divisor;
/// both terms share them. Predictions are clamped away from {0,1}.
double weighted_bce_iou_loss(const ProbMap& pred, const BinaryMask& target);
LossGrad weighted_bce_iou_loss_with_grad(const ProbMap& pred, const BinaryMask& target);

/// Mean absolute difference between two maps.
double l1_loss(const ProbMap& pred, const ProbMap& target);

} // namespace vos::fusion
