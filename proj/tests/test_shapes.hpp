#pragma once

#include "test_rng.hpp"
#include "vos/types.hpp"

#include <algorithm>
#include <cmath>

// Small deterministic input factories shared by the test suites.

inline vos::BinaryMask bernoulli_mask(SplitMix64& rng, int w, int h, double p = 0.5) {
    vos::BinaryMask m(w, h);
    for (auto& v : m.data) v = rng.next_unit() < p ? 1 : 0;
    return m;
}

/// Filled ellipse with random center/radii; never empty, rarely full.
inline vos::BinaryMask blob_mask(SplitMix64& rng, int w, int h) {
    vos::BinaryMask m(w, h);
    const double cx = rng.next_in(0.25 * w, 0.75 * w);
    const double cy = rng.next_in(0.25 * h, 0.75 * h);
    const double rx = rng.next_in(0.15 * w, 0.4 * w);
    const double ry = rng.next_in(0.15 * h, 0.4 * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double dx = (x - cx) / rx;
            const double dy = (y - cy) / ry;
            if (dx * dx + dy * dy <= 1.0) m.at(x, y) = 1;
        }
    if (m.foreground_count() == 0) m.at(w / 2, h / 2) = 1;
    return m;
}

inline vos::ProbMap random_map(SplitMix64& rng, int w, int h) {
    vos::ProbMap p(w, h);
    for (auto& v : p.data) v = rng.next_unit();
    return p;
}

/// The 0/1 indicator of gt with +-noise, clamped back into [0,1].
inline vos::ProbMap noisy_indicator(SplitMix64& rng, const vos::BinaryMask& gt, double noise) {
    vos::ProbMap p(gt.width, gt.height);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const double base = gt.data[i] ? 1.0 : 0.0;
        p.data[i] = std::clamp(base + rng.next_in(-noise, noise), 0.0, 1.0);
    }
    return p;
}

inline vos::ProbMap indicator_map(const vos::BinaryMask& gt) {
    vos::ProbMap p(gt.width, gt.height);
    for (std::size_t i = 0; i < gt.size(); ++i) p.data[i] = gt.data[i] ? 1.0 : 0.0;
    return p;
}
