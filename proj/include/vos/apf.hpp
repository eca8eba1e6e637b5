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

#include "vos/metrics.hpp"
#include "vos/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace vos::apf {

/// Per-metric votes comparing the static prediction against the
/// motion-driven one. 1 is a vote for the motion prediction.
struct SubLabels {
    std::uint8_t y1 = 0; // region similarity
    std::uint8_t y2 = 0; // boundary accuracy
    std::uint8_t y3 = 0; // mean absolute error (tie votes 1, see sub_labels)
    std::uint8_t y4 = 0; // structure measure
    std::uint8_t y5 = 0; // enhanced alignment
    int sum() const { return y1 + y2 + y3 + y4 + y5; }
    bool operator==(const SubLabels&) const = default;
};

/// Majority vote over the five sub-labels: 1 selects the motion prediction.
struct FusionLabel {
    std::uint8_t y = 0;
    bool operator==(const FusionLabel&) const = default;
};

/// Fusion score in the open interval (0,1). Raw values at or beyond the
/// endpoints are clamped to [epsilon, 1-epsilon] and flagged.
class FusionWeight {
public:
    static constexpr double kEpsilon = 1e-7;

    static FusionWeight from_raw(double raw);

    double value() const { return value_; }
    bool clamped() const { return clamped_; }

private:
    FusionWeight(double v, bool c) : value_(v), clamped_(c) {}
    double value_;
    bool clamped_;
};

/// Planes a scorer may consult. rs stack = rgb + m_sos; rm stack = rgb +
/// flow rendering + m_mos. Pointers a given scorer does not read may stay
/// null; planes that are present must share spatial dimensions.
struct ScorerInput {
    const RgbImage* rgb = nullptr;
    const ProbMap* m_sos = nullptr;
    const ProbMap* m_mos = nullptr;
    const FlowField* flow = nullptr;
    const BinaryMask* gt = nullptr; // consulted by the oracle scorer only
};

/// Deterministic mapping from a frame's planes to a fusion score.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual FusionWeight score(const ScorerInput& input) const = 0;
    virtual std::string_view name() const = 0;
};

/// Fixed score regardless of input.
class ConstantScorer final : public Scorer {
public:
    explicit ConstantScorer(double value = 0.5) : value_(value) {}
    FusionWeight score(const ScorerInput&) const override;
    std::string_view name() const override { return "constant"; }

private:
    double value_;
};

/// Ground-truth-informed upper bound: emits the majority label pushed to
/// the open interval, i.e. epsilon or 1-epsilon.
class OracleScorer final : public Scorer {
public:
    explicit OracleScorer(metrics::MetricConfig config = {}) : config_(config) {}
    FusionWeight score(const ScorerInput& input) const override;
    std::string_view name() const override { return "oracle"; }

private:
    metrics::MetricConfig config_;
};

/// Training-free stand-in for the learned scorer: sigmoid of
/// a * (IoU between the binarized motion prediction and the
/// above-median-magnitude flow region) + b * (region coverage) + c.
/// All-constant flow magnitude falls back to 0.5.
class HeuristicScorer final : public Scorer {
public:
    HeuristicScorer(double a = 4.0, double b = 0.0, double c = -2.0) : a_(a), b_(b), c_(c) {}
    FusionWeight score(const ScorerInput& input) const override;
    std::string_view name() const override { return "heuristic"; }

private:
    double a_, b_, c_;
};

/// "oracle", "constant[:v]", "heuristic[:a,b,c]". Throws
/// std::invalid_argument on anything else.
std::unique_ptr<Scorer> make_scorer(std::string_view spec);

/// Vote per metric: y1/y2/y4/y5 are 1 iff the motion prediction scores
/// strictly higher on J/F/S/E; y3 is 1 iff the static prediction's MAE is
/// greater than or equal to the motion prediction's. Ties therefore give
/// 0 on four votes but 1 on the MAE vote.
SubLabels sub_labels(const ProbMap& m_sos, const ProbMap& m_mos, const BinaryMask& gt,
                     const metrics::MetricConfig& config = {});

/// Same votes computed from already-evaluated scores.
SubLabels sub_labels(const metrics::MetricScores& sos, const metrics::MetricScores& mos);

/// y = 1 iff at least three votes favor the motion prediction.
FusionLabel majority_label(const SubLabels& subs);

/// -(y log w + (1-y) log(1-w)); finite because w lives in (0,1).
double bce_loss(const FusionWeight& y_hat, const FusionLabel& y);

/// d bce_loss / d w = -y/w + (1-y)/(1-w).
double bce_grad(const FusionWeight& y_hat, const FusionLabel& y);

/// Pixel-wise y_hat * m_mos + (1 - y_hat) * m_sos. Accepts the closed
/// interval; the endpoints return bit-identical copies of the input.
/// The FusionWeight overload restores a clamped weight to its endpoint
/// first: the clamp guards the BCE, not the blend.
ProbMap soft_fuse(double y_hat, const ProbMap& m_mos, const ProbMap& m_sos);
ProbMap soft_fuse(const FusionWeight& y_hat, const ProbMap& m_mos, const ProbMap& m_sos);

/// m_mos if y_hat > 0.5 else m_sos (ties select the static prediction).
ProbMap hard_select(double y_hat, const ProbMap& m_mos, const ProbMap& m_sos);
ProbMap hard_select(const FusionWeight& y_hat, const ProbMap& m_mos, const ProbMap& m_sos);

enum class MetricId { J, F, MAE, S, E };
enum class Choice { Sos, Mos };

struct MetricSelection {
    ProbMap map;
    Choice choice = Choice::Sos;
};

struct MajoritySelection {
    ProbMap map;
    FusionLabel label;
};

/// Whichever prediction scores better on one metric (lower wins for MAE,
/// higher for the rest); ties keep the static prediction.
MetricSelection ideal_select_by_metric(const ProbMap& m_sos, const ProbMap& m_mos,
                                       const BinaryMask& gt, MetricId metric,
                                       const metrics::MetricConfig& config = {});

/// Majority-vote selection; equivalent to soft_fuse at the label value.
MajoritySelection ideal_select_majority(const ProbMap& m_sos, const ProbMap& m_mos,
                                        const BinaryMask& gt,
                                        const metrics::MetricConfig& config = {});

} // namespace vos::apf
