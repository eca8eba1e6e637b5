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

#include "vos/synth.hpp"

#include "vos/media_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace vos::synth {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument("synth: " + msg);
}

// Standard-pinned deterministic stream: mt19937_64 with manual mapping,
// consumed in a fixed order (sequence by sequence, frame by frame).
struct Stream {
    std::mt19937_64 gen;
    explicit Stream(std::uint64_t seed) : gen(seed) {}
    double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; } // [0,1)
    double in(double lo, double hi) { return lo + unit() * (hi - lo); }
};

struct Path {
    double cx0, cy0, cx1, cy1; // linear center track
    double rx, ry;             // half extents
};

Path draw_path(Stream& rng, const SynthScenario& sc) {
    Path p;
    const double m = std::min(sc.width, sc.height);
    p.rx = rng.in(0.12 * m, 0.22 * m);
    p.ry = rng.in(0.12 * m, 0.22 * m);
    const double x_lo = p.rx + 1.0, x_hi = sc.width - p.rx - 2.0;
    const double y_lo = p.ry + 1.0, y_hi = sc.height - p.ry - 2.0;
    p.cx0 = rng.in(x_lo, x_hi);
    p.cy0 = rng.in(y_lo, y_hi);
    p.cx1 = rng.in(x_lo, x_hi);
    p.cy1 = rng.in(y_lo, y_hi);
    return p;
}

BinaryMask render_mask(const SynthScenario& sc, const Path& p, double t) {
    const double cx = p.cx0 + t * (p.cx1 - p.cx0);
    const double cy = p.cy0 + t * (p.cy1 - p.cy0);
    BinaryMask mask(sc.width, sc.height);
    for (int y = 0; y < sc.height; ++y) {
        for (int x = 0; x < sc.width; ++x) {
            bool inside;
            if (sc.motion == MotionModel::Rectangle) {
                inside = std::abs(x - cx) <= p.rx && std::abs(y - cy) <= p.ry;
            } else {
                const double dx = (x - cx) / p.rx, dy = (y - cy) / p.ry;
                inside = dx * dx + dy * dy <= 1.0;
            }
            mask.at(x, y) = inside ? 1 : 0;
        }
    }
    return mask;
}

/// Per-frame flow degradation level per schedule.
double draw_quality(Stream& rng, const SynthScenario& sc) {
    switch (sc.schedule) {
    case FlowSchedule::Clean:
        return 0.0;
    case FlowSchedule::Noisy:
        return rng.in(0.3, 0.7);
    case FlowSchedule::Dropout:
        return rng.unit() < sc.dropout_rate ? 1.0 : 0.0;
    case FlowSchedule::Mixed: {
        const double pick = rng.unit();
        if (pick < 1.0 / 3.0) return 0.0;
        if (pick < 2.0 / 3.0) return rng.in(0.3, 0.7);
        return 1.0;
    }
    }
    return 0.0;
}

/// GT corrupted by lam: lam = 0 reproduces the indicator exactly.
ProbMap corrupt(Stream& rng, const BinaryMask& gt, double lam) {
    ProbMap out(gt.width, gt.height);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const double base = gt.data[i] ? 1.0 : 0.0;
        out.data[i] = std::clamp((1.0 - lam) * base + lam * rng.unit(), 0.0, 1.0);
    }
    return out;
}

} // namespace

MotionModel parse_motion(std::string_view name) {
    if (name == "rectangle") return MotionModel::Rectangle;
    if (name == "ellipse") return MotionModel::Ellipse;
    throw std::invalid_argument("synth: unknown motion model '" + std::string(name) + "'");
}

FlowSchedule parse_schedule(std::string_view name) {
    if (name == "clean") return FlowSchedule::Clean;
    if (name == "noisy") return FlowSchedule::Noisy;
    if (name == "dropout") return FlowSchedule::Dropout;
    if (name == "mixed") return FlowSchedule::Mixed;
    throw std::invalid_argument("synth: unknown flow schedule '" + std::string(name) + "'");
}

std::string_view motion_name(MotionModel model) {
    return model == MotionModel::Rectangle ? "rectangle" : "ellipse";
}

std::string_view schedule_name(FlowSchedule schedule) {
    switch (schedule) {
    case FlowSchedule::Clean: return "clean";
    case FlowSchedule::Noisy: return "noisy";
    case FlowSchedule::Dropout: return "dropout";
    case FlowSchedule::Mixed: return "mixed";
    }
    return "mixed";
}

void SynthScenario::validate() const {
    require(sequences >= 1, "at least one sequence");
    require(frames >= 1, "at least one frame per sequence");
    require(width >= 16 && height >= 16, "canvas must be at least 16x16");
    require(sos_noise >= 0.0 && sos_noise <= 1.0, "sos_noise must be in [0,1]");
    require(mos_noise_scale >= 0.0 && mos_noise_scale <= 1.0, "mos_noise_scale must be in [0,1]");
    require(dropout_rate >= 0.0 && dropout_rate <= 1.0, "dropout_rate must be in [0,1]");
}

std::vector<SynthSequence> generate_scenario(const SynthScenario& scenario) {
    scenario.validate();
    Stream rng(scenario.seed);
    std::vector<SynthSequence> sequences;
    sequences.reserve(static_cast<std::size_t>(scenario.sequences));
    for (int s = 0; s < scenario.sequences; ++s) {
        SynthSequence seq;
        char id[16];
        std::snprintf(id, sizeof id, "seq_%03d", s);
        seq.id = id;

        const Path path = draw_path(rng, scenario);
        const double steps = scenario.frames > 1 ? scenario.frames - 1.0 : 1.0;
        const double vel_x = (path.cx1 - path.cx0) / steps;
        const double vel_y = (path.cy1 - path.cy0) / steps;

        seq.frames.reserve(static_cast<std::size_t>(scenario.frames));
        for (int f = 0; f < scenario.frames; ++f) {
            SynthFrame frame;
            frame.gt = render_mask(scenario, path, scenario.frames > 1 ? f / steps : 0.0);

            frame.flow_quality = draw_quality(rng, scenario);
            frame.flow = FlowField(scenario.width, scenario.height);
            if (frame.flow_quality < 1.0) {
                // exact object displacement, zero background
                for (std::size_t i = 0; i < frame.gt.size(); ++i) {
                    if (!frame.gt.data[i]) continue;
                    frame.flow.u[i] = static_cast<float>(vel_x);
                    frame.flow.v[i] = static_cast<float>(vel_y);
                }
                if (frame.flow_quality > 0.0) {
                    const double amp =
                        frame.flow_quality * (std::hypot(vel_x, vel_y) + 1.0);
                    for (std::size_t i = 0; i < frame.flow.size(); ++i) {
                        frame.flow.u[i] += static_cast<float>(rng.in(-amp, amp));
                        frame.flow.v[i] += static_cast<float>(rng.in(-amp, amp));
                    }
                }
            } // full dropout keeps the all-zero field

            frame.mos = corrupt(rng, frame.gt,
                                std::clamp(frame.flow_quality * scenario.mos_noise_scale, 0.0, 1.0));
            const double sos_lam = std::clamp(scenario.sos_noise * rng.in(0.4, 1.6), 0.0, 1.0);
            frame.sos = corrupt(rng, frame.gt, sos_lam);
            seq.frames.push_back(std::move(frame));
        }
        sequences.push_back(std::move(seq));
    }
    return sequences;
}

void write_scenario(const SynthScenario& scenario, const std::filesystem::path& root) {
    const std::vector<SynthSequence> sequences = generate_scenario(scenario);
    for (const SynthSequence& seq : sequences) {
        for (const char* sub : {"gt", "sos", "mos", "flow"})
            std::filesystem::create_directories(root / sub / seq.id);
        for (std::size_t f = 0; f < seq.frames.size(); ++f) {
            char stem[16];
            std::snprintf(stem, sizeof stem, "%05zu", f);
            const SynthFrame& frame = seq.frames[f];
            io::write_mask(root / "gt" / seq.id / (std::string(stem) + ".png"), frame.gt);
            io::write_prob_map(root / "sos" / seq.id / (std::string(stem) + ".png"), frame.sos);
            io::write_prob_map(root / "mos" / seq.id / (std::string(stem) + ".png"), frame.mos);
            io::write_flo_file(root / "flow" / seq.id / (std::string(stem) + ".flo"), frame.flow);
        }
    }
}

} // namespace vos::synth
