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

#include "vos/fusion.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vos::fusion {

struct NamedTensor {
    std::vector<int> shape;
    std::vector<double> values; // row-major
    bool operator==(const NamedTensor&) const = default;
};

/// Flat container of named parameter tensors with a line-oriented text
/// serialization. Values round-trip bit-exactly (shortest-17 decimal).
class ParamStore {
public:
    bool contains(const std::string& name) const { return tensors_.contains(name); }
    std::size_t tensor_count() const { return tensors_.size(); }
    std::vector<std::string> names() const;

    void set(const std::string& name, std::vector<int> shape, std::vector<double> values);
    const NamedTensor& get(const std::string& name) const;

    // Conv parameters live under <prefix>.weight / <prefix>.bias, MLP
    // parameters under <prefix>.w1/.b1/.w2/.b2.
    void put_conv(const std::string& prefix, const ConvParams& params);
    ConvParams conv(const std::string& prefix) const;
    void put_mlp(const std::string& prefix, const MlpParams& params);
    MlpParams mlp(const std::string& prefix) const;

    std::string to_text() const;
    static ParamStore from_text(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static ParamStore load(const std::filesystem::path& path);

    bool operator==(const ParamStore&) const = default;

private:
    std::map<std::string, NamedTensor> tensors_;
};

} // namespace vos::fusion
