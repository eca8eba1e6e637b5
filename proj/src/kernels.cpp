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

#include "vos/kernels.hpp"

#include <cstdlib>

namespace vos::kern {

namespace detail {
#ifdef VOSFUSE_HAVE_AVX2
const Backend* avx2_backend_impl();
#else
inline const Backend* avx2_backend_impl() { return nullptr; }
#endif
} // namespace detail

const Backend* avx2_backend() {
    static const Backend* impl = detail::avx2_backend_impl();
    return impl;
}

namespace {

const Backend* pick_auto() {
    if (const Backend* v = avx2_backend()) return v;
    return &scalar_backend();
}

const Backend* pick_named(std::string_view name) {
    if (name == "scalar") return &scalar_backend();
    if (name == "avx2") return avx2_backend();
    if (name == "auto") return pick_auto();
    return nullptr;
}

const Backend*& active_slot() {
    static const Backend* slot = [] {
        if (const char* env = std::getenv("VOSFUSE_KERNEL_BACKEND")) {
            if (const Backend* b = pick_named(env)) return b;
        }
        return pick_auto();
    }();
    return slot;
}

} // namespace

const Backend& active() { return *active_slot(); }

bool set_backend(std::string_view name) {
    const Backend* b = pick_named(name);
    if (!b) return false;
    active_slot() = b;
    return true;
}

} // namespace vos::kern
