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

#include "vos/param_store.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vos::fusion {

namespace {

constexpr const char* kHeader = "vosfuse-params 1";

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("params: " + msg);
}

std::size_t shape_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 1) fail("tensor dimensions must be >= 1");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

void append_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::vector<std::string> ParamStore::names() const {
    std::vector<std::string> out;
    out.reserve(tensors_.size());
    for (const auto& [name, t] : tensors_) out.push_back(name);
    return out;
}

void ParamStore::set(const std::string& name, std::vector<int> shape, std::vector<double> values) {
    if (name.empty()) fail("tensor name must not be empty");
    for (char c : name)
        if (std::isspace(static_cast<unsigned char>(c))) fail("tensor name must not contain whitespace");
    if (shape.empty()) fail("tensor shape must not be empty");
    if (values.size() != shape_size(shape)) fail("value count does not match the shape of '" + name + "'");
    tensors_[name] = NamedTensor{std::move(shape), std::move(values)};
}

const NamedTensor& ParamStore::get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) fail("missing tensor '" + name + "'");
    return it->second;
}

void ParamStore::put_conv(const std::string& prefix, const ConvParams& params) {
    params.validate();
    set(prefix + ".weight", {params.out_channels, params.in_channels, params.kh, params.kw},
        params.weights);
    set(prefix + ".bias", {params.out_channels}, params.bias);
}

ConvParams ParamStore::conv(const std::string& prefix) const {
    const NamedTensor& w = get(prefix + ".weight");
    const NamedTensor& b = get(prefix + ".bias");
    if (w.shape.size() != 4) fail("'" + prefix + ".weight' must have 4 dimensions");
    if (b.shape.size() != 1 || b.shape[0] != w.shape[0])
        fail("'" + prefix + ".bias' does not match the kernel output channels");
    ConvParams p{w.shape[0], w.shape[1], w.shape[2], w.shape[3], w.values, b.values};
    p.validate();
    return p;
}

void ParamStore::put_mlp(const std::string& prefix, const MlpParams& params) {
    params.validate();
    set(prefix + ".w1", {params.hidden_dim, params.in_dim}, params.w1);
    set(prefix + ".b1", {params.hidden_dim}, params.b1);
    set(prefix + ".w2", {params.out_dim, params.hidden_dim}, params.w2);
    set(prefix + ".b2", {params.out_dim}, params.b2);
}

MlpParams ParamStore::mlp(const std::string& prefix) const {
    const NamedTensor& w1 = get(prefix + ".w1");
    const NamedTensor& b1 = get(prefix + ".b1");
    const NamedTensor& w2 = get(prefix + ".w2");
    const NamedTensor& b2 = get(prefix + ".b2");
    if (w1.shape.size() != 2 || w2.shape.size() != 2 || b1.shape.size() != 1 || b2.shape.size() != 1)
        fail("'" + prefix + "' layers have unexpected ranks");
    MlpParams p;
    p.hidden_dim = w1.shape[0];
    p.in_dim = w1.shape[1];
    p.out_dim = w2.shape[0];
    if (w2.shape[1] != p.hidden_dim || b1.shape[0] != p.hidden_dim || b2.shape[0] != p.out_dim)
        fail("'" + prefix + "' layer shapes are inconsistent");
    p.w1 = w1.values;
    p.b1 = b1.values;
    p.w2 = w2.values;
    p.b2 = b2.values;
    p.validate();
    return p;
}

std::string ParamStore::to_text() const {
    std::string out = kHeader;
    out += '\n';
    for (const auto& [name, t] : tensors_) {
        out += "tensor ";
        out += name;
        out += ' ';
        out += std::to_string(t.shape.size());
        for (int d : t.shape) {
            out += ' ';
            out += std::to_string(d);
        }
        out += '\n';
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            if (i) out += ' ';
            append_double(out, t.values[i]);
        }
        out += '\n';
    }
    return out;
}

ParamStore ParamStore::from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) fail("bad or missing header line");
    ParamStore store;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream head(line);
        std::string tag, name;
        std::size_t ndim = 0;
        if (!(head >> tag >> name >> ndim) || tag != "tensor") fail("malformed tensor line: " + line);
        if (ndim == 0 || ndim > 8) fail("unreasonable rank for '" + name + "'");
        std::vector<int> shape(ndim);
        for (int& d : shape)
            if (!(head >> d)) fail("truncated shape for '" + name + "'");
        std::string extra;
        if (head >> extra) fail("trailing tokens after the shape of '" + name + "'");
        if (!std::getline(in, line)) fail("missing values for '" + name + "'");
        std::istringstream vals(line);
        std::vector<double> values(shape_size(shape));
        for (double& v : values)
            if (!(vals >> v)) fail("truncated values for '" + name + "'");
        if (vals >> extra) fail("trailing values for '" + name + "'");
        if (store.contains(name)) fail("duplicate tensor '" + name + "'");
        store.set(name, std::move(shape), std::move(values));
    }
    return store;
}

void ParamStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path.string() + "' for writing");
    const std::string text = to_text();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail("short write to '" + path.string() + "'");
}

ParamStore ParamStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) fail("cannot open '" + path.string() + "'");
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::string text(static_cast<std::size_t>(size), '\0');
    in.read(text.data(), size);
    if (!in) fail("short read from '" + path.string() + "'");
    return from_text(text);
}

} // namespace vos::fusion
