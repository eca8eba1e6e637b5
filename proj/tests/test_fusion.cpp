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
#include "vos/param_store.hpp"

#include "test_rng.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace vos::fusion;

namespace {

FeatureMap random_feature(SplitMix64& rng, int c, int h, int w, double lo = -1.0, double hi = 1.0) {
    FeatureMap f(c, h, w);
    for (double& v : f.data) v = rng.next_in(lo, hi);
    return f;
}

double max_abs_diff(const FeatureMap& a, const FeatureMap& b) {
    REQUIRE(a.channels == b.channels);
    REQUIRE(a.height == b.height);
    REQUIRE(a.width == b.width);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

// direct convolution transcription: kernel-position outer loops, explicit
// border handling, independent of the library's traversal order
FeatureMap naive_conv(const FeatureMap& in, const ConvParams& p) {
    FeatureMap out(p.out_channels, in.height, in.width);
    for (int o = 0; o < p.out_channels; ++o)
        for (int ky = 0; ky < p.kh; ++ky)
            for (int kx = 0; kx < p.kw; ++kx)
                for (int i = 0; i < p.in_channels; ++i)
                    for (int y = 0; y < in.height; ++y)
                        for (int x = 0; x < in.width; ++x) {
                            const int sy = y + ky - (p.kh - 1) / 2;
                            const int sx = x + kx - (p.kw - 1) / 2;
                            if (sy < 0 || sy >= in.height || sx < 0 || sx >= in.width) continue;
                            out.at(o, y, x) += p.weight(o, i, ky, kx) * in.at(i, sy, sx);
                        }
    for (int o = 0; o < p.out_channels; ++o)
        for (int y = 0; y < in.height; ++y)
            for (int x = 0; x < in.width; ++x) out.at(o, y, x) += p.bias[o];
    return out;
}

FeatureMap slice_channels(const FeatureMap& in, int first, int count) {
    FeatureMap out(count, in.height, in.width);
    for (int c = 0; c < count; ++c)
        for (int y = 0; y < in.height; ++y)
            for (int x = 0; x < in.width; ++x) out.at(c, y, x) = in.at(first + c, y, x);
    return out;
}

AttentionMap sigmoid_of(const FeatureMap& plane) {
    REQUIRE(plane.channels == 1);
    AttentionMap out(plane.height, plane.width);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = 1.0 / (1.0 + std::exp(-plane.data[i]));
    return out;
}

FeatureMap add(const FeatureMap& a, const FeatureMap& b) {
    REQUIRE(a.data.size() == b.data.size());
    FeatureMap out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

} // namespace

TEST_CASE("conv2d with an identity kernel reproduces the input") {
    SplitMix64 rng(0xC0111D01u);
    const FeatureMap x = random_feature(rng, 3, 5, 6);
    CHECK(conv2d(x, ConvParams::identity(3)) == x);
}

TEST_CASE("conv2d with zero parameters yields a zero map") {
    SplitMix64 rng(0xC0111D02u);
    const FeatureMap x = random_feature(rng, 2, 4, 7);
    const FeatureMap out = conv2d(x, ConvParams::zeros(4, 2, 3, 3));
    CHECK(out.channels == 4);
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("conv2d matches the direct summation oracle") {
    SplitMix64 rng(0xC0111D03u);
    const FeatureMap x = random_feature(rng, 1, 4, 4);
    const ConvParams p = ConvParams::seeded(1, 1, 3, 3, 11, 0.5);
    CHECK(max_abs_diff(conv2d(x, p), naive_conv(x, p)) <= 1e-12);

    const FeatureMap y = random_feature(rng, 3, 5, 7);
    const ConvParams q = ConvParams::seeded(2, 3, 3, 5, 12, 0.3);
    CHECK(max_abs_diff(conv2d(y, q), naive_conv(y, q)) <= 1e-12);
}

TEST_CASE("conv2d rejects inconsistent shapes") {
    SplitMix64 rng(0xC0111D04u);
    const FeatureMap x = random_feature(rng, 3, 4, 4);
    CHECK_THROWS_AS(conv2d(x, ConvParams::zeros(1, 2, 3, 3)), std::invalid_argument);
    ConvParams even = ConvParams::zeros(1, 3, 3, 3);
    even.kw = 2;
    even.weights.resize(static_cast<std::size_t>(1) * 3 * 3 * 2);
    CHECK_THROWS_AS(conv2d(x, even), std::invalid_argument);
}

TEST_CASE("bilinear upsampling keeps constant fields constant") {
    const FeatureMap x(2, 3, 4, 0.3);
    const FeatureMap out = bilinear_upsample(x, 7, 9);
    CHECK(out.channels == 2);
    CHECK(out.height == 7);
    CHECK(out.width == 9);
    for (double v : out.data) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("bilinear upsampling to the same size is the identity") {
    SplitMix64 rng(0xB111EA01u);
    const FeatureMap x = random_feature(rng, 2, 5, 6);
    CHECK(bilinear_upsample(x, 5, 6) == x);
}

TEST_CASE("bilinear upsampling of a 2x2 block matches the hand-computed weights") {
    FeatureMap x(1, 2, 2);
    const double a = 1.0, b = 3.0, c = -2.0, d = 5.0;
    x.at(0, 0, 0) = a;
    x.at(0, 0, 1) = b;
    x.at(0, 1, 0) = c;
    x.at(0, 1, 1) = d;
    const FeatureMap out = bilinear_upsample(x, 4, 4);

    // half-pixel sampling hits source offsets -0.25, 0.25, 0.75, 1.25,
    // so the 1-D stencils are (1,0), (3/4,1/4), (1/4,3/4), (0,1)
    const std::array<std::array<double, 2>, 4> st = {{{1.0, 0.0}, {0.75, 0.25}, {0.25, 0.75}, {0.0, 1.0}}};
    for (int y = 0; y < 4; ++y)
        for (int x2 = 0; x2 < 4; ++x2) {
            const double expected = st[y][0] * (st[x2][0] * a + st[x2][1] * b) +
                                    st[y][1] * (st[x2][0] * c + st[x2][1] * d);
            CHECK(out.at(0, y, x2) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("adaptive average pooling averages the covering bins") {
    FeatureMap ramp(1, 5, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) ramp.at(0, y, x) = y * 5 + x;
    const FeatureMap out = adaptive_avg_pool(ramp, 2, 2);
    // 5 rows over 2 bins: rows {0,1,2} and {2,3,4}, overlapping at 2
    CHECK(out.at(0, 0, 0) == doctest::Approx(6.0));
    CHECK(out.at(0, 0, 1) == doctest::Approx(8.0));
    CHECK(out.at(0, 1, 0) == doctest::Approx(16.0));
    CHECK(out.at(0, 1, 1) == doctest::Approx(18.0));
    CHECK_THROWS_AS(adaptive_avg_pool(ramp, 6, 2), std::invalid_argument);
}

TEST_CASE("pyramid pooling of a constant map is constant in every branch") {
    const FeatureMap x(1, 24, 24, 0.4);
    const FeatureMap out = pyramid_pool(x, default_pyramid_scales());
    CHECK(out.channels == 5);
    CHECK(out.height == 24);
    CHECK(out.width == 24);
    for (double v : out.data) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("pyramid pooling branches reduce to the declared intermediate sizes") {
    SplitMix64 rng(0x9A3A9D01u);
    const FeatureMap x = random_feature(rng, 1, 24, 24);
    const std::vector<PyramidScale> scales = {PyramidScale::of(2), PyramidScale::of(4),
                                              PyramidScale::of(6)};
    const FeatureMap out = pyramid_pool(x, scales);
    CHECK(out.channels == 3);
    int c = 0;
    for (const PyramidScale& s : scales) {
        const FeatureMap pooled = adaptive_avg_pool(x, s.k, s.k);
        CHECK(pooled.height == s.k);
        CHECK(pooled.width == s.k);
        CHECK(slice_channels(out, c, 1) == bilinear_upsample(pooled, 24, 24));
        ++c;
    }
}

TEST_CASE("pyramid pooling passes scale one through and broadcasts the global mean") {
    SplitMix64 rng(0x9A3A9D02u);
    const FeatureMap x = random_feature(rng, 2, 7, 9);
    const FeatureMap out = pyramid_pool(x, {PyramidScale::of(1), PyramidScale::global()});
    CHECK(out.channels == 4);
    CHECK(slice_channels(out, 0, 2) == x);
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (int y = 0; y < 7; ++y)
            for (int x2 = 0; x2 < 9; ++x2) mean += x.at(c, y, x2);
        mean /= 63.0;
        for (int y = 0; y < 7; ++y)
            for (int x2 = 0; x2 < 9; ++x2)
                CHECK(out.at(2 + c, y, x2) == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("pyramid pooling rejects scales beyond the input size") {
    const FeatureMap x(1, 4, 4, 1.0);
    CHECK_THROWS_AS(pyramid_pool(x, {PyramidScale::of(6)}), std::invalid_argument);
}

namespace {

std::array<IsamSourceParams, 3> zero_isam_params(int c_rgb, int c_d, int c_ss, int c_op, int reduced) {
    const int total = c_rgb + c_d + c_ss + c_op;
    const std::array<int, 3> source_channels = {c_rgb, c_d, c_ss};
    std::array<IsamSourceParams, 3> params;
    for (int s = 0; s < 3; ++s) {
        params[s].reduce = ConvParams::zeros(reduced, total, 1, 1);
        params[s].collapse = ConvParams::zeros(1, reduced, 3, 3);
        params[s].attention = ConvParams::zeros(1, 5, 3, 3);
        params[s].enhance = ConvParams::zeros(source_channels[s], source_channels[s], 3, 3);
    }
    return params;
}

std::array<IsamSourceParams, 3> seeded_isam_params(int c_rgb, int c_d, int c_ss, int c_op,
                                                   int reduced, std::uint64_t seed) {
    const int total = c_rgb + c_d + c_ss + c_op;
    const std::array<int, 3> source_channels = {c_rgb, c_d, c_ss};
    std::array<IsamSourceParams, 3> params;
    for (int s = 0; s < 3; ++s) {
        params[s].reduce = ConvParams::seeded(reduced, total, 1, 1, seed + 4 * s, 0.2);
        params[s].collapse = ConvParams::seeded(1, reduced, 3, 3, seed + 4 * s + 1, 0.2);
        params[s].attention = ConvParams::seeded(1, 5, 3, 3, seed + 4 * s + 2, 0.4);
        params[s].enhance =
            ConvParams::seeded(source_channels[s], source_channels[s], 3, 3, seed + 4 * s + 3, 0.2);
    }
    return params;
}

} // namespace

TEST_CASE("interoceptive attention with zero parameters passes every source through") {
    SplitMix64 rng(0x15A20001u);
    const FeatureMap f_rgb = random_feature(rng, 2, 8, 8);
    const FeatureMap f_d = random_feature(rng, 2, 8, 8);
    const FeatureMap f_ss = random_feature(rng, 2, 8, 8);
    const FeatureMap f_op = random_feature(rng, 2, 8, 8);
    const auto out = interoceptive_attention(f_rgb, f_d, f_ss, f_op, zero_isam_params(2, 2, 2, 2, 4));
    const std::array<const FeatureMap*, 3> sources = {&f_rgb, &f_d, &f_ss};
    for (int s = 0; s < 3; ++s) {
        for (double v : out[s].isa.data) CHECK(v == 0.5);
        CHECK(out[s].enhanced == *sources[s]);
    }
}

TEST_CASE("interoceptive attention maps stay strictly inside the unit interval") {
    SplitMix64 rng(0x15A20002u);
    const FeatureMap f_rgb = random_feature(rng, 3, 8, 8, -2.0, 2.0);
    const FeatureMap f_d = random_feature(rng, 3, 8, 8, -2.0, 2.0);
    const FeatureMap f_ss = random_feature(rng, 3, 8, 8, -2.0, 2.0);
    const FeatureMap f_op = random_feature(rng, 3, 8, 8, -2.0, 2.0);
    const auto out =
        interoceptive_attention(f_rgb, f_d, f_ss, f_op, seeded_isam_params(3, 3, 3, 3, 6, 77));
    for (int s = 0; s < 3; ++s) {
        REQUIRE(out[s].isa.data.size() == 64);
        for (double v : out[s].isa.data) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
    }
}

TEST_CASE("interoceptive attention equals the step-by-step primitive composition") {
    SplitMix64 rng(0x15A20003u);
    const FeatureMap f_rgb = random_feature(rng, 8, 8, 8);
    const FeatureMap f_d = random_feature(rng, 8, 8, 8);
    const FeatureMap f_ss = random_feature(rng, 8, 8, 8);
    const FeatureMap f_op = random_feature(rng, 8, 8, 8);
    const auto params = seeded_isam_params(8, 8, 8, 8, 12, 1234);
    const auto out = interoceptive_attention(f_rgb, f_d, f_ss, f_op, params);

    const FeatureMap cat = concat_channels({&f_rgb, &f_d, &f_ss, &f_op});
    const std::array<const FeatureMap*, 3> sources = {&f_rgb, &f_d, &f_ss};
    for (int s = 0; s < 3; ++s) {
        const FeatureMap f_src = conv2d(conv2d(cat, params[s].reduce), params[s].collapse);
        const FeatureMap pyramid = pyramid_pool(f_src, default_pyramid_scales());
        const AttentionMap isa = sigmoid_of(conv2d(pyramid, params[s].attention));
        for (std::size_t i = 0; i < isa.data.size(); ++i)
            CHECK(out[s].isa.data[i] == doctest::Approx(isa.data[i]).epsilon(1e-12));
        const FeatureMap expected =
            add(*sources[s], conv2d(broadcast_multiply(*sources[s], isa), params[s].enhance));
        CHECK(max_abs_diff(out[s].enhanced, expected) <= 1e-12);
    }
}

TEST_CASE("channel attention identity and zero responses") {
    SplitMix64 rng(0xCA000001u);
    const FeatureMap f_op = random_feature(rng, 4, 6, 5);
    CHECK(channel_attention(f_op, MlpParams::ones(4)) == f_op);
    const FeatureMap zeroed = channel_attention(f_op, MlpParams::zeros(4, 2, 4));
    for (double v : zeroed.data) CHECK(v == 0.0);
    CHECK_THROWS_AS(channel_attention(f_op, MlpParams::ones(3)), std::invalid_argument);
}

TEST_CASE("channel attention scales each channel by its pooled response") {
    SplitMix64 rng(0xCA000002u);
    const FeatureMap f_op = random_feature(rng, 4, 6, 5);
    const MlpParams mlp = MlpParams::bottleneck(4, 2, 99, 0.7);

    // independent recomputation: pooled means through the two layers
    std::vector<double> means(4, 0.0);
    for (int c = 0; c < 4; ++c) {
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 5; ++x) means[c] += f_op.at(c, y, x);
        means[c] /= 30.0;
    }
    std::vector<double> hidden(mlp.hidden_dim, 0.0);
    for (int h = 0; h < mlp.hidden_dim; ++h) {
        double acc = mlp.b1[h];
        for (int i = 0; i < 4; ++i) acc += mlp.w1[static_cast<std::size_t>(h) * 4 + i] * means[i];
        hidden[h] = std::max(acc, 0.0);
    }
    std::vector<double> scale(4, 0.0);
    for (int o = 0; o < 4; ++o) {
        scale[o] = mlp.b2[o];
        for (int h = 0; h < mlp.hidden_dim; ++h)
            scale[o] += mlp.w2[static_cast<std::size_t>(o) * mlp.hidden_dim + h] * hidden[h];
    }

    const FeatureMap out = channel_attention(f_op, mlp);
    for (int c = 0; c < 4; ++c)
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 5; ++x)
                CHECK(out.at(c, y, x) ==
                      doctest::Approx(f_op.at(c, y, x) * scale[c]).epsilon(1e-12));

    const FeatureMap gated = channel_attention(f_op, mlp, true);
    for (int c = 0; c < 4; ++c) {
        const double sig = 1.0 / (1.0 + std::exp(-scale[c]));
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 5; ++x)
                CHECK(gated.at(c, y, x) ==
                      doctest::Approx(f_op.at(c, y, x) * sig).epsilon(1e-12));
    }
}

TEST_CASE("spatial attention of zero weights is one half everywhere") {
    SplitMix64 rng(0x59A00001u);
    const FeatureMap f = random_feature(rng, 3, 9, 9);
    const AttentionMap out = spatial_attention(f, ConvParams::zeros(1, 2, 7, 7));
    for (double v : out.data) CHECK(v == 0.5);
}

TEST_CASE("spatial attention stays strictly inside the unit interval") {
    SplitMix64 rng(0x59A00002u);
    const FeatureMap f = random_feature(rng, 3, 9, 9, -3.0, 3.0);
    const AttentionMap out = spatial_attention(f, ConvParams::seeded(1, 2, 7, 7, 5, 0.3));
    for (double v : out.data) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    CHECK_THROWS_AS(spatial_attention(f, ConvParams::seeded(1, 2, 3, 3, 5, 0.3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(spatial_attention(f, ConvParams::seeded(1, 3, 7, 7, 5, 0.3)),
                    std::invalid_argument);
}

TEST_CASE("spatial attention of a constant field is constant by symmetry") {
    // zero field: every window sees identical (zero-padded) support
    const FeatureMap zeros(3, 9, 9, 0.0);
    const ConvParams conv7 = ConvParams::seeded(1, 2, 7, 7, 21, 0.3);
    const AttentionMap flat = spatial_attention(zeros, conv7);
    for (double v : flat.data) CHECK(v == flat.data[0]);

    // nonzero constant: translation symmetry holds where the window
    // avoids the zero padding
    const FeatureMap c(3, 12, 12, 0.7);
    const AttentionMap out = spatial_attention(c, conv7);
    const double interior = out.at(3, 3);
    for (int y = 3; y < 9; ++y)
        for (int x = 3; x < 9; ++x) CHECK(out.at(y, x) == interior);
}

namespace {

struct MotionFixture {
    vos::ProbMap m_sos;
    AttentionMap f_op_ca_sa;
    FeatureMap e_rgb, e_d, e_ss, f_op;

    explicit MotionFixture(SplitMix64& rng)
        : m_sos(10, 7),
          f_op_ca_sa(8, 8),
          e_rgb(random_feature(rng, 2, 8, 8)),
          e_d(random_feature(rng, 3, 8, 8)),
          e_ss(random_feature(rng, 1, 8, 8)),
          f_op(random_feature(rng, 4, 8, 8)) {
        for (double& v : m_sos.data) v = rng.next_unit();
        for (double& v : f_op_ca_sa.data) v = rng.next_in(0.05, 0.95);
    }
};

} // namespace

TEST_CASE("motion enhancement with a zero map and identity convs preserves the statics") {
    SplitMix64 rng(0x30E00001u);
    MotionFixture fx(rng);
    MotionEnhanceParams params;
    params.me = ConvParams::zeros(1, 2, 3, 3);
    params.sta = ConvParams::identity(6);
    params.op = ConvParams::identity(4);
    const MotionEnhanceResult out =
        motion_enhance(fx.m_sos, fx.f_op_ca_sa, fx.e_rgb, fx.e_d, fx.e_ss, fx.f_op, params);
    for (double v : out.f_me.data) CHECK(v == 0.0);
    CHECK(out.e_sta_me == concat_channels({&fx.e_rgb, &fx.e_d, &fx.e_ss}));
    CHECK(out.e_op_me == fx.f_op);
    CHECK(out.e_sta_me.channels == fx.e_rgb.channels + fx.e_d.channels + fx.e_ss.channels);
}

TEST_CASE("motion enhancement equals the primitive composition") {
    SplitMix64 rng(0x30E00002u);
    MotionFixture fx(rng);
    MotionEnhanceParams params;
    params.me = ConvParams::seeded(1, 2, 3, 3, 31, 0.4);
    params.sta = ConvParams::seeded(5, 6, 3, 3, 32, 0.2);
    params.op = ConvParams::seeded(3, 4, 3, 3, 33, 0.2);
    const MotionEnhanceResult out =
        motion_enhance(fx.m_sos, fx.f_op_ca_sa, fx.e_rgb, fx.e_d, fx.e_ss, fx.f_op, params);

    const FeatureMap sos = bilinear_upsample(FeatureMap::from_prob_map(fx.m_sos), 8, 8);
    const FeatureMap sa = fx.f_op_ca_sa.as_feature();
    const FeatureMap me_plane = conv2d(concat_channels({&sos, &sa}), params.me);
    REQUIRE(me_plane.channels == 1);
    AttentionMap f_me(8, 8);
    f_me.data = me_plane.data;
    CHECK(out.f_me == f_me);

    const FeatureMap e_sta = concat_channels({&fx.e_rgb, &fx.e_d, &fx.e_ss});
    const FeatureMap sta_expected = conv2d(add(broadcast_multiply(e_sta, f_me), e_sta), params.sta);
    const FeatureMap op_expected = conv2d(add(broadcast_multiply(fx.f_op, f_me), fx.f_op), params.op);
    CHECK(max_abs_diff(out.e_sta_me, sta_expected) <= 1e-12);
    CHECK(max_abs_diff(out.e_op_me, op_expected) <= 1e-12);
}

TEST_CASE("motion enhancement rejects mismatched spatial dimensions") {
    SplitMix64 rng(0x30E00003u);
    MotionFixture fx(rng);
    MotionEnhanceParams params;
    params.me = ConvParams::zeros(1, 2, 3, 3);
    params.sta = ConvParams::identity(6);
    params.op = ConvParams::identity(4);
    const FeatureMap wrong = random_feature(rng, 4, 6, 8);
    CHECK_THROWS_AS(motion_enhance(fx.m_sos, fx.f_op_ca_sa, fx.e_rgb, fx.e_d, fx.e_ss, wrong, params),
                    std::invalid_argument);
}

TEST_CASE("feature purification cancels identical branch parameters") {
    SplitMix64 rng(0xF9000001u);
    const FeatureMap a = random_feature(rng, 3, 6, 6);
    const FeatureMap b = random_feature(rng, 2, 6, 6);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ConvParams p = ConvParams::seeded(4, 5, 3, 3, seed, 0.5);
        const FeatureMap out = feature_purify(a, b, p, p);
        for (double v : out.data) CHECK(v == 0.0);
    }
}

TEST_CASE("feature purification with a zero exclusive branch returns the common branch") {
    SplitMix64 rng(0xF9000002u);
    const FeatureMap a = random_feature(rng, 3, 6, 6);
    const FeatureMap b = random_feature(rng, 2, 6, 6);
    const ConvParams comm = ConvParams::seeded(4, 5, 3, 3, 7, 0.5);
    const FeatureMap cat = concat_channels({&a, &b});
    CHECK(feature_purify(a, b, comm, ConvParams::zeros(4, 5, 3, 3)) == conv2d(cat, comm));
}

TEST_CASE("feature purification is the exact difference of both branches") {
    SplitMix64 rng(0xF9000003u);
    const FeatureMap a = random_feature(rng, 3, 6, 6);
    const FeatureMap b = random_feature(rng, 2, 6, 6);
    const ConvParams comm = ConvParams::seeded(4, 5, 3, 3, 8, 0.5);
    const ConvParams exclu = ConvParams::seeded(4, 5, 1, 1, 9, 0.5);
    const FeatureMap cat = concat_channels({&a, &b});
    const FeatureMap p_comm = conv2d(cat, comm);
    const FeatureMap p_exclu = conv2d(cat, exclu);
    const FeatureMap p = feature_purify(a, b, comm, exclu);
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        CHECK(p.data[i] == p_comm.data[i] - p_exclu.data[i]);
        CHECK(p.data[i] + p_exclu.data[i] == doctest::Approx(p_comm.data[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(feature_purify(a, b, comm, ConvParams::zeros(3, 5, 3, 3)),
                    std::invalid_argument);
}

TEST_CASE("parameter stores round-trip text serialization bit-exactly") {
    ParamStore store;
    store.put_conv("isam.rgb.reduce", ConvParams::seeded(4, 8, 1, 1, 42, 0.3));
    store.put_mlp("mem.ca", MlpParams::bottleneck(8, 4, 43, 0.2));
    store.set("misc", {5}, {std::numbers::pi, 1.0 / 3.0, -0.0, 1e-17, 123456789.123456789});

    const std::string text = store.to_text();
    const ParamStore parsed = ParamStore::from_text(text);
    CHECK(parsed == store);

    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "vosfuse_params_test.txt";
    store.save(path);
    const ParamStore loaded = ParamStore::load(path);
    std::filesystem::remove(path);
    CHECK(loaded == store);

    const ConvParams conv = loaded.conv("isam.rgb.reduce");
    const ConvParams original = ConvParams::seeded(4, 8, 1, 1, 42, 0.3);
    CHECK(conv.weights == original.weights);
    CHECK(conv.bias == original.bias);
    const MlpParams mlp = loaded.mlp("mem.ca");
    CHECK(mlp.w1 == MlpParams::bottleneck(8, 4, 43, 0.2).w1);
    CHECK(mlp.hidden_dim == 2);
}

TEST_CASE("parameter stores reject malformed input") {
    CHECK_THROWS_AS(ParamStore::from_text("bogus\n"), std::runtime_error);
    CHECK_THROWS_AS(ParamStore::from_text("vosfuse-params 1\ntensor t 1 2\n1.0\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(ParamStore::from_text("vosfuse-params 1\ntensor t 1 2\n1.0 2.0 3.0\n"),
                    std::runtime_error);
    ParamStore store;
    CHECK_THROWS_AS(store.get("absent"), std::runtime_error);
    CHECK_THROWS_AS(store.set("bad name", {1}, {1.0}), std::runtime_error);
    CHECK_THROWS_AS(store.set("t", {0}, {}), std::runtime_error);
}

TEST_CASE("seeded parameter draws are deterministic and bounded") {
    const ConvParams a = ConvParams::seeded(2, 3, 3, 3, 555, 0.25);
    const ConvParams b = ConvParams::seeded(2, 3, 3, 3, 555, 0.25);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    const ConvParams c = ConvParams::seeded(2, 3, 3, 3, 556, 0.25);
    CHECK(a.weights != c.weights);
    for (double v : a.weights) {
        CHECK(v >= -0.25);
        CHECK(v <= 0.25);
    }
}
