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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Synthetic benchmark scenarios: a shape moving on a linear path renders
// the ground truth, the flow field is its exact displacement degraded per
// schedule, and the two predictors corrupt the ground truth in different
// ways. The motion-driven predictor degrades with the flow; the static
// one drifts independently. Everything derives from the seed.

namespace vos::synth {

enum class MotionModel { Rectangle, Ellipse };
enum class FlowSchedule { Clean, Noisy, Dropout, Mixed };

MotionModel parse_motion(std::string_view name);     // "rectangle" | "ellipse"
FlowSchedule parse_schedule(std::string_view name);  // "clean" | "noisy" | "dropout" | "mixed"
std::string_view motion_name(MotionModel model);
std::string_view schedule_name(FlowSchedule schedule);

struct SynthScenario {
    int sequences = 2;
    int frames = 10; // per sequence
    int width = 32;
    int height = 32;
    MotionModel motion = MotionModel::Rectangle;
    FlowSchedule schedule = FlowSchedule::Mixed;
    /// Static-predictor corruption level in [0,1], flow-independent.
    double sos_noise = 0.25;
    /// Motion-predictor corruption per unit of flow degradation, in [0,1].
    double mos_noise_scale = 0.9;
    /// Fraction of frames losing their flow under the dropout schedule.
    double dropout_rate = 0.5;
    std::uint64_t seed = 0;

    void validate() const; // throws std::invalid_argument
};

struct SynthFrame {
    BinaryMask gt;
    ProbMap sos;
    ProbMap mos;
    FlowField flow;
    /// Flow degradation in [0,1]: 0 pristine, 1 destroyed.
    double flow_quality = 0.0;
};

struct SynthSequence {
    std::string id; // "seq_000", ...
    std::vector<SynthFrame> frames;
};

/// Deterministic in-memory dataset for the scenario.
std::vector<SynthSequence> generate_scenario(const SynthScenario& scenario);

/// Renders the scenario to root/{gt,sos,mos,flow}/<sequence>/<frame>.{png,flo}
/// with zero-padded five-digit frame stems. Same scenario, same bytes.
void write_scenario(const SynthScenario& scenario, const std::filesystem::path& root);

} // namespace vos::synth
