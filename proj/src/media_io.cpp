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

#include "vos/media_io.hpp"

#include "vos/kernels.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <numbers>

namespace vos::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct Gray8OrRgb8 {
    int width = 0, height = 0, channels = 0; // channels 1 or 3
    std::vector<std::uint8_t> data;
};

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

Gray8OrRgb8 decode_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("missing file: " + path.string());

    std::array<std::uint8_t, 8> sig{};
    if (std::fread(sig.data(), 1, sig.size(), fp.get()) != sig.size() ||
        png_sig_cmp(sig.data(), 0, sig.size()) != 0)
        throw IoError("not a PNG file: " + path.string());

    PngReadGuard g;
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng init failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng init failed");

    Gray8OrRgb8 img;
    std::vector<png_bytep> rows;
    // longjmp lands here on any decode error; only libpng frames are skipped
    if (setjmp(png_jmpbuf(g.png)))
        throw IoError("undecodable image: " + path.string());

    png_init_io(g.png, fp.get());
    png_set_sig_bytes(g.png, static_cast<int>(sig.size()));
    png_read_info(g.png, g.info);

    const int bit_depth = png_get_bit_depth(g.png, g.info);
    const int color_type = png_get_color_type(g.png, g.info);
    if (bit_depth != 8)
        throw IoError("unsupported bit depth " + std::to_string(bit_depth) +
                      " (only 8-bit supported): " + path.string());

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(g.png);
    if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_strip_alpha(g.png);
    png_read_update_info(g.png, g.info);

    img.width = static_cast<int>(png_get_image_width(g.png, g.info));
    img.height = static_cast<int>(png_get_image_height(g.png, g.info));
    img.channels = png_get_channels(g.png, g.info);
    if (img.width < 1 || img.height < 1) throw IoError("zero-sized image: " + path.string());
    if (img.channels != 1 && img.channels != 3)
        throw IoError("unsupported channel count " + std::to_string(img.channels) + ": " + path.string());

    img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    rows.resize(img.height);
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) rows[y] = img.data.data() + y * stride;
    png_read_image(g.png, rows.data());
    png_read_end(g.png, nullptr);
    return img;
}

void encode_png(const std::filesystem::path& path, int width, int height, int channels,
                const std::uint8_t* data) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path.string());

    PngWriteGuard g;
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng init failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng init failed");

    std::vector<png_bytep> rows(height);
    if (setjmp(png_jmpbuf(g.png)))
        throw IoError("PNG encode failed: " + path.string());

    png_init_io(g.png, fp.get());
    png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (int y = 0; y < height; ++y) rows[y] = const_cast<png_bytep>(data + y * stride);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

// little-endian scalar access into byte buffers
float get_f32le(const std::byte* p) {
    std::uint32_t u = static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[0])) |
                      (static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[1])) << 8) |
                      (static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[2])) << 16) |
                      (static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[3])) << 24);
    return std::bit_cast<float>(u);
}

std::int32_t get_i32le(const std::byte* p) {
    std::uint32_t u = static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[0])) |
                      (static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[1])) << 8) |
                      (static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[2])) << 16) |
                      (static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[3])) << 24);
    return static_cast<std::int32_t>(u);
}

void put_u32le(std::vector<std::byte>& out, std::uint32_t u) {
    out.push_back(static_cast<std::byte>(u & 0xff));
    out.push_back(static_cast<std::byte>((u >> 8) & 0xff));
    out.push_back(static_cast<std::byte>((u >> 16) & 0xff));
    out.push_back(static_cast<std::byte>((u >> 24) & 0xff));
}

constexpr float kFloMagic = 202021.25f;

// Middlebury color wheel: 55 hue bins over six color transitions.
constexpr int kRY = 15, kYG = 6, kGC = 4, kCB = 11, kBM = 13, kMR = 6;
constexpr int kWheelSize = kRY + kYG + kGC + kCB + kBM + kMR;

std::array<std::array<int, 3>, kWheelSize> make_color_wheel() {
    std::array<std::array<int, 3>, kWheelSize> wheel{};
    int k = 0;
    for (int i = 0; i < kRY; ++i, ++k) wheel[k] = {255, 255 * i / kRY, 0};
    for (int i = 0; i < kYG; ++i, ++k) wheel[k] = {255 - 255 * i / kYG, 255, 0};
    for (int i = 0; i < kGC; ++i, ++k) wheel[k] = {0, 255, 255 * i / kGC};
    for (int i = 0; i < kCB; ++i, ++k) wheel[k] = {0, 255 - 255 * i / kCB, 255};
    for (int i = 0; i < kBM; ++i, ++k) wheel[k] = {255 * i / kBM, 0, 255};
    for (int i = 0; i < kMR; ++i, ++k) wheel[k] = {255, 0, 255 - 255 * i / kMR};
    return wheel;
}

void compute_color(double fx, double fy, std::uint8_t* pix) {
    static const auto wheel = make_color_wheel();
    const double rad = std::sqrt(fx * fx + fy * fy);
    const double a = std::atan2(-fy, -fx) / std::numbers::pi;
    const double fk = (a + 1.0) / 2.0 * (kWheelSize - 1);
    const int k0 = static_cast<int>(fk);
    const int k1 = (k0 + 1) % kWheelSize;
    const double f = fk - k0;
    for (int b = 0; b < 3; ++b) {
        const double col0 = wheel[k0][b] / 255.0;
        const double col1 = wheel[k1][b] / 255.0;
        double col = (1.0 - f) * col0 + f * col1;
        if (rad <= 1.0)
            col = 1.0 - rad * (1.0 - col); // saturate towards white near zero motion
        else
            col *= 0.75;
        pix[b] = static_cast<std::uint8_t>(255.0 * col);
    }
}

} // namespace

BinaryMask read_mask(const std::filesystem::path& path) {
    const Gray8OrRgb8 img = decode_png(path);
    BinaryMask mask(img.width, img.height);
    const std::size_t n = mask.size();
    for (std::size_t i = 0; i < n; ++i)
        mask.data[i] = img.data[i * img.channels] > 127 ? 1 : 0;
    return mask;
}

ProbMap read_prob_map(const std::filesystem::path& path) {
    const Gray8OrRgb8 img = decode_png(path);
    if (img.channels != 1)
        throw IoError("probability map must be single-channel: " + path.string());
    ProbMap map(img.width, img.height);
    const std::size_t n = map.size();
    for (std::size_t i = 0; i < n; ++i)
        map.data[i] = img.data[i] / 255.0;
    return map;
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> bytes(mask.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    encode_png(path, mask.width, mask.height, 1, bytes.data());
}

void write_prob_map(const std::filesystem::path& path, const ProbMap& map) {
    std::vector<std::uint8_t> bytes(map.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const long q = std::lround(map.data[i] * 255.0); // round half away from zero
        bytes[i] = static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    }
    encode_png(path, map.width, map.height, 1, bytes.data());
}

void write_rgb(const std::filesystem::path& path, const RgbImage& image) {
    encode_png(path, image.width, image.height, 3, image.data.data());
}

FlowField read_flo(const std::vector<std::byte>& bytes) {
    if (bytes.size() < 12) throw IoError(".flo: truncated header");
    const float magic = get_f32le(bytes.data());
    if (magic != kFloMagic) throw IoError(".flo: bad magic");
    const std::int32_t w = get_i32le(bytes.data() + 4);
    const std::int32_t h = get_i32le(bytes.data() + 8);
    if (w <= 0 || h <= 0) throw IoError(".flo: non-positive dimensions");
    const std::size_t expected = 12 + 8 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() < expected) throw IoError(".flo: truncated payload");
    if (bytes.size() > expected) throw IoError(".flo: trailing bytes");
    FlowField flow(w, h);
    const std::byte* p = bytes.data() + 12;
    for (std::size_t i = 0; i < flow.size(); ++i, p += 8) {
        flow.u[i] = get_f32le(p);
        flow.v[i] = get_f32le(p + 4);
    }
    return flow;
}

std::vector<std::byte> write_flo(const FlowField& flow) {
    std::vector<std::byte> out;
    out.reserve(12 + 8 * flow.size());
    put_u32le(out, std::bit_cast<std::uint32_t>(kFloMagic));
    put_u32le(out, static_cast<std::uint32_t>(flow.width));
    put_u32le(out, static_cast<std::uint32_t>(flow.height));
    for (std::size_t i = 0; i < flow.size(); ++i) {
        put_u32le(out, std::bit_cast<std::uint32_t>(flow.u[i]));
        put_u32le(out, std::bit_cast<std::uint32_t>(flow.v[i]));
    }
    return out;
}

FlowField read_flo_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("missing file: " + path.string());
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<std::byte> bytes(static_cast<std::size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw IoError("read failed: " + path.string());
    return read_flo(bytes);
}

void write_flo_file(const std::filesystem::path& path, const FlowField& flow) {
    const std::vector<std::byte> bytes = write_flo(flow);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

RgbImage flow_to_color(const FlowField& flow) {
    // normalize by the largest finite magnitude; sentinels do not participate
    double maxrad = 0.0;
    for (std::size_t i = 0; i < flow.size(); ++i) {
        if (FlowField::is_unknown(flow.u[i], flow.v[i])) continue;
        const double fu = flow.u[i], fv = flow.v[i];
        maxrad = std::max(maxrad, std::sqrt(fu * fu + fv * fv));
    }
    if (maxrad <= 0.0) maxrad = 1.0;

    RgbImage img(flow.width, flow.height);
    for (std::size_t i = 0; i < flow.size(); ++i) {
        std::uint8_t* pix = img.data.data() + i * 3;
        if (FlowField::is_unknown(flow.u[i], flow.v[i])) {
            pix[0] = pix[1] = pix[2] = 0;
            continue;
        }
        compute_color(flow.u[i] / maxrad, flow.v[i] / maxrad, pix);
    }
    return img;
}

BinaryMask binarize(const ProbMap& map, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw std::invalid_argument("binarize: threshold must be in [0,1]");
    BinaryMask mask(map.width, map.height);
    kern::threshold_gt(mask.data, map.data, threshold);
    return mask;
}

} // namespace vos::io
