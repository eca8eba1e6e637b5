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

#include <array>
#include <cstdint>
#include <vector>

// Forward reference implementations of the multi-source fusion blocks on
// a minimal dense tensor core: interoceptive spatial attention, motion
// enhancement with channel/spatial attention, and feature purification.
// Desk scale, double precision, no autodiff.

namespace vos::fusion {

/// Dense row-major C x H x W block of reals.
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
    double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    double at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    bool operator==(const FeatureMap&) const = default;

    static FeatureMap from_prob_map(const ProbMap& map); // 1 x H x W
};

/// Single-channel modulation field. Sigmoid-producing operations emit
/// values strictly in (0,1); the motion-enhanced map shares this
/// container but has no closing nonlinearity and is unbounded.
struct AttentionMap {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    AttentionMap() = default;
    AttentionMap(int h, int w, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const AttentionMap&) const = default;

    FeatureMap as_feature() const; // 1 x H x W view copy
};

/// Same-size cross-correlation parameters: stride 1, zero padding
/// (kh-1)/2 x (kw-1)/2, odd kernels only.
struct ConvParams {
    int out_channels = 0;
    int in_channels = 0;
    int kh = 0;
    int kw = 0;
    std::vector<double> weights; // out x in x kh x kw
    std::vector<double> bias;    // out

    void validate() const;
    double weight(int o, int i, int y, int x) const {
        return weights[((static_cast<std::size_t>(o) * in_channels + i) * kh + y) * kw + x];
    }

    static ConvParams zeros(int out, int in, int kh, int kw);
    /// 1x1 kernel routing channel i of the input to output i unchanged.
    static ConvParams identity(int channels);
    /// Deterministic uniform values in [-scale, scale].
    static ConvParams seeded(int out, int in, int kh, int kw, std::uint64_t seed, double scale = 0.1);
};

/// Two fully connected layers with a ReLU between them; the bottleneck
/// factory reduces the hidden width by `ratio`.
struct MlpParams {
    int in_dim = 0;
    int hidden_dim = 0;
    int out_dim = 0;
    std::vector<double> w1, b1; // hidden x in, hidden
    std::vector<double> w2, b2; // out x hidden, out

    void validate() const;
    std::vector<double> forward(const std::vector<double>& x, bool sigmoid_output = false) const;

    static MlpParams zeros(int in, int hidden, int out);
    static MlpParams bottleneck(int channels, int ratio, std::uint64_t seed, double scale = 0.1);
    /// Weights zero, output bias one: forward() is all ones.
    static MlpParams ones(int channels);
};

// ---- primitives -----------------------------------------------------------

/// Same-spatial-size cross-correlation with zero padding.
FeatureMap conv2d(const FeatureMap& input, const ConvParams& params);

/// Align-corners-false bilinear resampling.
FeatureMap bilinear_upsample(const FeatureMap& input, int out_h, int out_w);

/// Mean over bin [floor(i*H/out), ceil((i+1)*H/out)) per axis.
FeatureMap adaptive_avg_pool(const FeatureMap& input, int out_h, int out_w);

FeatureMap concat_channels(const std::vector<const FeatureMap*>& parts);

/// Per-pixel product with the map broadcast across channels.
FeatureMap broadcast_multiply(const FeatureMap& input, const AttentionMap& map);

struct PyramidScale {
    int k = 1;
    bool is_global = false;
    static PyramidScale of(int k) { return {k, false}; }
    static PyramidScale global() { return {1, true}; }
};

/// The standard scale set {1, 2, 4, 6, global}.
std::vector<PyramidScale> default_pyramid_scales();

/// Per scale k: adaptive average pool to k x k, then bilinear upsample
/// back. Scale 1 passes the input through; global pools to 1 x 1. All
/// branches concatenate along channels.
FeatureMap pyramid_pool(const FeatureMap& input, const std::vector<PyramidScale>& scales);

// ---- interoceptive spatial attention ---------------------------------------

struct IsamSourceParams {
    ConvParams reduce;    // 1x1 over the 4-source concatenation
    ConvParams collapse;  // 3x3 down to one channel
    ConvParams attention; // 3x3 over the pyramid stack, one channel out
    ConvParams enhance;   // 3x3, channel-preserving
};

struct IsamSourceOutput {
    AttentionMap isa;
    FeatureMap enhanced;
};

/// For each static source: collapse the 4-source concatenation to one
/// channel, expand it through the pooling pyramid into an attention map,
/// and additively enhance the source feature with its gated copy.
std::array<IsamSourceOutput, 3> interoceptive_attention(const FeatureMap& f_rgb,
                                                        const FeatureMap& f_d,
                                                        const FeatureMap& f_ss,
                                                        const FeatureMap& f_op,
                                                        const std::array<IsamSourceParams, 3>& params);

// ---- motion enhancement -----------------------------------------------------

/// Channel attention: per-channel spatial mean through the MLP, scaling
/// each channel. No output nonlinearity unless sigmoid_output is set.
FeatureMap channel_attention(const FeatureMap& f_op, const MlpParams& mlp,
                             bool sigmoid_output = false);

/// Spatial attention: sigmoid(7x7 conv over [channel-mean, channel-max]).
AttentionMap spatial_attention(const FeatureMap& f_op_ca, const ConvParams& conv7);

struct MotionEnhanceParams {
    ConvParams me;  // 2 channels in (prediction + attention), 1 out
    ConvParams sta; // applied to the gated static concatenation
    ConvParams op;  // applied to the gated flow features
};

struct MotionEnhanceResult {
    AttentionMap f_me; // unbounded: no closing nonlinearity
    FeatureMap e_sta_me;
    FeatureMap e_op_me;
};

/// The static prediction is resampled to feature resolution, fused with
/// the flow attention into a motion-enhanced map, which then gates both
/// the concatenated static features and the flow features.
MotionEnhanceResult motion_enhance(const ProbMap& m_sos, const AttentionMap& f_op_ca_sa,
                                   const FeatureMap& e_rgb, const FeatureMap& e_d,
                                   const FeatureMap& e_ss, const FeatureMap& f_op,
                                   const MotionEnhanceParams& params);

// ---- feature purification ---------------------------------------------------

/// Difference of two convolutions of the same concatenation with
/// independent parameters: common-context branch minus exclusive branch.
FeatureMap feature_purify(const FeatureMap& e_sta_me, const FeatureMap& e_op_me,
                          const ConvParams& params_comm, const ConvParams& params_exclu);

} // namespace vos::fusion
