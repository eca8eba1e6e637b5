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

#include "vos/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace vos::fusion {

namespace {

void check(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("fusion: " + msg);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Deterministic uniform values in [-scale, scale]. mt19937_64 output is
// pinned by the standard; the mapping avoids distribution objects whose
// streams vary across library implementations.
std::vector<double> seeded_uniform(std::size_t n, std::uint64_t seed, double scale) {
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (double& v : out) {
        double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53; // [0,1)
        v = scale * (2.0 * unit - 1.0);
    }
    return out;
}

void check_same_plane(const FeatureMap& a, const FeatureMap& b, const char* where) {
    check(a.height == b.height && a.width == b.width,
          std::string(where) + ": spatial dimension mismatch (" + std::to_string(a.width) + "x" +
              std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
              std::to_string(b.height) + ")");
}

} // namespace

FeatureMap::FeatureMap(int c, int h, int w, double fill) : channels(c), height(h), width(w) {
    check(c >= 1 && h >= 1 && w >= 1, "FeatureMap dimensions must be >= 1");
    data.assign(static_cast<std::size_t>(c) * h * w, fill);
}

FeatureMap FeatureMap::from_prob_map(const ProbMap& map) {
    FeatureMap out(1, map.height, map.width);
    out.data = map.data; // both row-major, single plane
    return out;
}

AttentionMap::AttentionMap(int h, int w, double fill) : height(h), width(w) {
    check(h >= 1 && w >= 1, "AttentionMap dimensions must be >= 1");
    data.assign(static_cast<std::size_t>(h) * w, fill);
}

FeatureMap AttentionMap::as_feature() const {
    FeatureMap out(1, height, width);
    out.data = data;
    return out;
}

void ConvParams::validate() const {
    check(out_channels >= 1 && in_channels >= 1, "conv channel counts must be >= 1");
    check(kh >= 1 && kw >= 1 && kh % 2 == 1 && kw % 2 == 1, "conv kernels must be odd-sized");
    check(weights.size() == static_cast<std::size_t>(out_channels) * in_channels * kh * kw,
          "conv weight count does not match its shape");
    check(bias.size() == static_cast<std::size_t>(out_channels),
          "conv bias count does not match the output channels");
}

ConvParams ConvParams::zeros(int out, int in, int kh, int kw) {
    ConvParams p{out, in, kh, kw, {}, {}};
    p.weights.assign(static_cast<std::size_t>(out) * in * kh * kw, 0.0);
    p.bias.assign(static_cast<std::size_t>(out), 0.0);
    p.validate();
    return p;
}

ConvParams ConvParams::identity(int channels) {
    ConvParams p = zeros(channels, channels, 1, 1);
    for (int c = 0; c < channels; ++c)
        p.weights[static_cast<std::size_t>(c) * channels + c] = 1.0;
    return p;
}

ConvParams ConvParams::seeded(int out, int in, int kh, int kw, std::uint64_t seed, double scale) {
    ConvParams p = zeros(out, in, kh, kw);
    std::vector<double> draw = seeded_uniform(p.weights.size() + p.bias.size(), seed, scale);
    std::copy_n(draw.begin(), p.weights.size(), p.weights.begin());
    std::copy_n(draw.begin() + p.weights.size(), p.bias.size(), p.bias.begin());
    return p;
}

void MlpParams::validate() const {
    check(in_dim >= 1 && hidden_dim >= 1 && out_dim >= 1, "mlp dimensions must be >= 1");
    check(w1.size() == static_cast<std::size_t>(hidden_dim) * in_dim &&
              b1.size() == static_cast<std::size_t>(hidden_dim),
          "mlp first layer size does not match its shape");
    check(w2.size() == static_cast<std::size_t>(out_dim) * hidden_dim &&
              b2.size() == static_cast<std::size_t>(out_dim),
          "mlp second layer size does not match its shape");
}

std::vector<double> MlpParams::forward(const std::vector<double>& x, bool sigmoid_output) const {
    validate();
    check(x.size() == static_cast<std::size_t>(in_dim), "mlp input size mismatch");
    std::vector<double> hidden(hidden_dim);
    for (int h = 0; h < hidden_dim; ++h) {
        double acc = b1[h];
        for (int i = 0; i < in_dim; ++i) acc += w1[static_cast<std::size_t>(h) * in_dim + i] * x[i];
        hidden[h] = std::max(acc, 0.0);
    }
    std::vector<double> out(out_dim);
    for (int o = 0; o < out_dim; ++o) {
        double acc = b2[o];
        for (int h = 0; h < hidden_dim; ++h)
            acc += w2[static_cast<std::size_t>(o) * hidden_dim + h] * hidden[h];
        out[o] = sigmoid_output ? sigmoid(acc) : acc;
    }
    return out;
}

MlpParams MlpParams::zeros(int in, int hidden, int out) {
    MlpParams p;
    p.in_dim = in;
    p.hidden_dim = hidden;
    p.out_dim = out;
    p.w1.assign(static_cast<std::size_t>(hidden) * in, 0.0);
    p.b1.assign(static_cast<std::size_t>(hidden), 0.0);
    p.w2.assign(static_cast<std::size_t>(out) * hidden, 0.0);
    p.b2.assign(static_cast<std::size_t>(out), 0.0);
    p.validate();
    return p;
}

MlpParams MlpParams::bottleneck(int channels, int ratio, std::uint64_t seed, double scale) {
    check(ratio >= 1, "mlp reduction ratio must be >= 1");
    int hidden = std::max(channels / ratio, 1);
    MlpParams p = zeros(channels, hidden, channels);
    std::size_t total = p.w1.size() + p.b1.size() + p.w2.size() + p.b2.size();
    std::vector<double> draw = seeded_uniform(total, seed, scale);
    auto it = draw.begin();
    for (auto* dst : {&p.w1, &p.b1, &p.w2, &p.b2}) {
        std::copy_n(it, dst->size(), dst->begin());
        it += static_cast<std::ptrdiff_t>(dst->size());
    }
    return p;
}

MlpParams MlpParams::ones(int channels) {
    MlpParams p = zeros(channels, 1, channels);
    std::fill(p.b2.begin(), p.b2.end(), 1.0);
    return p;
}

FeatureMap conv2d(const FeatureMap& input, const ConvParams& params) {
    params.validate();
    check(input.channels == params.in_channels,
          "conv2d: input has " + std::to_string(input.channels) + " channels, kernel expects " +
              std::to_string(params.in_channels));
    const int h = input.height, w = input.width;
    const int py = (params.kh - 1) / 2, px = (params.kw - 1) / 2;
    FeatureMap out(params.out_channels, h, w);
    for (int o = 0; o < params.out_channels; ++o) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = params.bias[o];
                for (int i = 0; i < params.in_channels; ++i) {
                    for (int ky = 0; ky < params.kh; ++ky) {
                        const int sy = y + ky - py;
                        if (sy < 0 || sy >= h) continue;
                        for (int kx = 0; kx < params.kw; ++kx) {
                            const int sx = x + kx - px;
                            if (sx < 0 || sx >= w) continue;
                            acc += params.weight(o, i, ky, kx) * input.at(i, sy, sx);
                        }
                    }
                }
                out.at(o, y, x) = acc;
            }
        }
    }
    return out;
}

FeatureMap bilinear_upsample(const FeatureMap& input, int out_h, int out_w) {
    check(out_h >= 1 && out_w >= 1, "bilinear_upsample: output dimensions must be >= 1");
    if (out_h == input.height && out_w == input.width) return input;
    FeatureMap out(input.channels, out_h, out_w);
    const double sy_scale = static_cast<double>(input.height) / out_h;
    const double sx_scale = static_cast<double>(input.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        // half-pixel centers, no corner alignment
        const double sy = (y + 0.5) * sy_scale - 0.5;
        const int y0 = static_cast<int>(std::floor(sy));
        const double wy = sy - y0;
        const int yl = std::clamp(y0, 0, input.height - 1);
        const int yh = std::clamp(y0 + 1, 0, input.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const double sx = (x + 0.5) * sx_scale - 0.5;
            const int x0 = static_cast<int>(std::floor(sx));
            const double wx = sx - x0;
            const int xl = std::clamp(x0, 0, input.width - 1);
            const int xh = std::clamp(x0 + 1, 0, input.width - 1);
            for (int c = 0; c < input.channels; ++c) {
                const double top = (1.0 - wx) * input.at(c, yl, xl) + wx * input.at(c, yl, xh);
                const double bot = (1.0 - wx) * input.at(c, yh, xl) + wx * input.at(c, yh, xh);
                out.at(c, y, x) = (1.0 - wy) * top + wy * bot;
            }
        }
    }
    return out;
}

FeatureMap adaptive_avg_pool(const FeatureMap& input, int out_h, int out_w) {
    check(out_h >= 1 && out_w >= 1, "adaptive_avg_pool: output dimensions must be >= 1");
    check(out_h <= input.height && out_w <= input.width,
          "adaptive_avg_pool: output exceeds the input size");
    FeatureMap out(input.channels, out_h, out_w);
    for (int y = 0; y < out_h; ++y) {
        const int ys = (y * input.height) / out_h;
        const int ye = ((y + 1) * input.height + out_h - 1) / out_h;
        for (int x = 0; x < out_w; ++x) {
            const int xs = (x * input.width) / out_w;
            const int xe = ((x + 1) * input.width + out_w - 1) / out_w;
            const double n = static_cast<double>(ye - ys) * (xe - xs);
            for (int c = 0; c < input.channels; ++c) {
                double acc = 0.0;
                for (int sy = ys; sy < ye; ++sy)
                    for (int sx = xs; sx < xe; ++sx) acc += input.at(c, sy, sx);
                out.at(c, y, x) = acc / n;
            }
        }
    }
    return out;
}

FeatureMap concat_channels(const std::vector<const FeatureMap*>& parts) {
    check(!parts.empty(), "concat_channels: no inputs");
    int total = 0;
    for (const FeatureMap* p : parts) {
        check_same_plane(*parts.front(), *p, "concat_channels");
        total += p->channels;
    }
    FeatureMap out(total, parts.front()->height, parts.front()->width);
    auto dst = out.data.begin();
    for (const FeatureMap* p : parts) dst = std::copy(p->data.begin(), p->data.end(), dst);
    return out;
}

FeatureMap broadcast_multiply(const FeatureMap& input, const AttentionMap& map) {
    check(input.height == map.height && input.width == map.width,
          "broadcast_multiply: spatial dimension mismatch");
    FeatureMap out = input;
    const std::size_t plane = input.plane();
    for (int c = 0; c < input.channels; ++c) {
        double* dst = out.data.data() + static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) dst[i] *= map.data[i];
    }
    return out;
}

std::vector<PyramidScale> default_pyramid_scales() {
    return {PyramidScale::of(1), PyramidScale::of(2), PyramidScale::of(4), PyramidScale::of(6),
            PyramidScale::global()};
}

FeatureMap pyramid_pool(const FeatureMap& input, const std::vector<PyramidScale>& scales) {
    check(!scales.empty(), "pyramid_pool: no scales");
    std::vector<FeatureMap> branches;
    branches.reserve(scales.size());
    for (const PyramidScale& s : scales) {
        if (s.is_global) {
            branches.push_back(bilinear_upsample(adaptive_avg_pool(input, 1, 1), input.height, input.width));
            continue;
        }
        check(s.k >= 1, "pyramid_pool: scale must be >= 1");
        check(s.k <= input.height && s.k <= input.width,
              "pyramid_pool: scale " + std::to_string(s.k) + " exceeds the input size");
        if (s.k == 1) {
            branches.push_back(input); // pass-through branch
            continue;
        }
        branches.push_back(bilinear_upsample(adaptive_avg_pool(input, s.k, s.k), input.height, input.width));
    }
    std::vector<const FeatureMap*> parts;
    parts.reserve(branches.size());
    for (const FeatureMap& b : branches) parts.push_back(&b);
    return concat_channels(parts);
}

namespace {

AttentionMap sigmoid_plane(const FeatureMap& single) {
    AttentionMap out(single.height, single.width);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = sigmoid(single.data[i]);
    return out;
}

} // namespace

std::array<IsamSourceOutput, 3> interoceptive_attention(const FeatureMap& f_rgb,
                                                        const FeatureMap& f_d,
                                                        const FeatureMap& f_ss,
                                                        const FeatureMap& f_op,
                                                        const std::array<IsamSourceParams, 3>& params) {
    check_same_plane(f_rgb, f_d, "interoceptive_attention");
    check_same_plane(f_rgb, f_ss, "interoceptive_attention");
    check_same_plane(f_rgb, f_op, "interoceptive_attention");
    const FeatureMap cat = concat_channels({&f_rgb, &f_d, &f_ss, &f_op});
    const std::array<const FeatureMap*, 3> sources = {&f_rgb, &f_d, &f_ss};
    const int n_scales = static_cast<int>(default_pyramid_scales().size());

    std::array<IsamSourceOutput, 3> out;
    for (int s = 0; s < 3; ++s) {
        const IsamSourceParams& p = params[s];
        const FeatureMap& f_src = *sources[s];
        check(p.reduce.in_channels == cat.channels,
              "interoceptive_attention: reduce kernel does not cover the source concatenation");
        check(p.collapse.in_channels == p.reduce.out_channels && p.collapse.out_channels == 1,
              "interoceptive_attention: collapse kernel must map the reduced stack to one channel");
        check(p.attention.in_channels == n_scales && p.attention.out_channels == 1,
              "interoceptive_attention: attention kernel must map the pyramid stack to one channel");
        check(p.enhance.in_channels == f_src.channels && p.enhance.out_channels == f_src.channels,
              "interoceptive_attention: enhance kernel must preserve the source channels");

        const FeatureMap collapsed = conv2d(conv2d(cat, p.reduce), p.collapse);
        const FeatureMap pyramid = pyramid_pool(collapsed, default_pyramid_scales());
        out[s].isa = sigmoid_plane(conv2d(pyramid, p.attention));
        const FeatureMap gated = conv2d(broadcast_multiply(f_src, out[s].isa), p.enhance);
        out[s].enhanced = f_src;
        for (std::size_t i = 0; i < gated.data.size(); ++i) out[s].enhanced.data[i] += gated.data[i];
    }
    return out;
}

FeatureMap channel_attention(const FeatureMap& f_op, const MlpParams& mlp, bool sigmoid_output) {
    mlp.validate();
    check(mlp.in_dim == f_op.channels && mlp.out_dim == f_op.channels,
          "channel_attention: mlp dimensions must match the channel count");
    const std::size_t plane = f_op.plane();
    std::vector<double> means(f_op.channels);
    for (int c = 0; c < f_op.channels; ++c) {
        double acc = 0.0;
        const double* src = f_op.data.data() + static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) acc += src[i];
        means[c] = acc / static_cast<double>(plane);
    }
    const std::vector<double> scale = mlp.forward(means, sigmoid_output);
    FeatureMap out = f_op;
    for (int c = 0; c < f_op.channels; ++c) {
        double* dst = out.data.data() + static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) dst[i] *= scale[c];
    }
    return out;
}

AttentionMap spatial_attention(const FeatureMap& f_op_ca, const ConvParams& conv7) {
    conv7.validate();
    check(conv7.in_channels == 2 && conv7.out_channels == 1,
          "spatial_attention: kernel must map [mean, max] planes to one channel");
    check(conv7.kh == 7 && conv7.kw == 7, "spatial_attention: kernel must be 7x7");
    FeatureMap stats(2, f_op_ca.height, f_op_ca.width);
    const std::size_t plane = f_op_ca.plane();
    for (std::size_t i = 0; i < plane; ++i) {
        double acc = 0.0;
        double best = f_op_ca.data[i];
        for (int c = 0; c < f_op_ca.channels; ++c) {
            const double v = f_op_ca.data[static_cast<std::size_t>(c) * plane + i];
            acc += v;
            best = std::max(best, v);
        }
        stats.data[i] = acc / f_op_ca.channels;
        stats.data[plane + i] = best;
    }
    return sigmoid_plane(conv2d(stats, conv7));
}

MotionEnhanceResult motion_enhance(const ProbMap& m_sos, const AttentionMap& f_op_ca_sa,
                                   const FeatureMap& e_rgb, const FeatureMap& e_d,
                                   const FeatureMap& e_ss, const FeatureMap& f_op,
                                   const MotionEnhanceParams& params) {
    check_same_plane(e_rgb, e_d, "motion_enhance");
    check_same_plane(e_rgb, e_ss, "motion_enhance");
    check_same_plane(e_rgb, f_op, "motion_enhance");
    check(f_op_ca_sa.height == e_rgb.height && f_op_ca_sa.width == e_rgb.width,
          "motion_enhance: attention map does not match the feature resolution");
    check(params.me.in_channels == 2 && params.me.out_channels == 1,
          "motion_enhance: the map kernel must fuse [prediction, attention] into one channel");

    const FeatureMap sos_resampled =
        bilinear_upsample(FeatureMap::from_prob_map(m_sos), e_rgb.height, e_rgb.width);
    const FeatureMap sa = f_op_ca_sa.as_feature();
    const FeatureMap me_plane = conv2d(concat_channels({&sos_resampled, &sa}), params.me);

    MotionEnhanceResult out;
    out.f_me = AttentionMap(me_plane.height, me_plane.width);
    out.f_me.data = me_plane.data;

    const FeatureMap e_sta = concat_channels({&e_rgb, &e_d, &e_ss});
    check(params.sta.in_channels == e_sta.channels,
          "motion_enhance: static kernel does not cover the static concatenation");
    check(params.op.in_channels == f_op.channels,
          "motion_enhance: flow kernel does not cover the flow channels");

    FeatureMap sta_gated = broadcast_multiply(e_sta, out.f_me);
    for (std::size_t i = 0; i < sta_gated.data.size(); ++i) sta_gated.data[i] += e_sta.data[i];
    out.e_sta_me = conv2d(sta_gated, params.sta);

    FeatureMap op_gated = broadcast_multiply(f_op, out.f_me);
    for (std::size_t i = 0; i < op_gated.data.size(); ++i) op_gated.data[i] += f_op.data[i];
    out.e_op_me = conv2d(op_gated, params.op);
    return out;
}

FeatureMap feature_purify(const FeatureMap& e_sta_me, const FeatureMap& e_op_me,
                          const ConvParams& params_comm, const ConvParams& params_exclu) {
    check_same_plane(e_sta_me, e_op_me, "feature_purify");
    const FeatureMap cat = concat_channels({&e_sta_me, &e_op_me});
    check(params_comm.in_channels == cat.channels && params_exclu.in_channels == cat.channels,
          "feature_purify: kernels must cover the concatenated channels");
    check(params_comm.out_channels == params_exclu.out_channels,
          "feature_purify: branch output channels must agree");
    FeatureMap p = conv2d(cat, params_comm);
    const FeatureMap excl = conv2d(cat, params_exclu);
    for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] -= excl.data[i];
    return p;
}

} // namespace vos::fusion
