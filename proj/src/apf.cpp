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

#include "vos/apf.hpp"

#include "vos/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vos::apf {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double parse_number(std::string_view s, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument(std::string("make_scorer: bad ") + what + " '" + std::string(s) + "'");
    return v;
}

} // namespace

FusionWeight FusionWeight::from_raw(double raw) {
    require(!std::isnan(raw), "FusionWeight: score is NaN");
    if (raw < kEpsilon) return FusionWeight(kEpsilon, true);
    if (raw > 1.0 - kEpsilon) return FusionWeight(1.0 - kEpsilon, true);
    return FusionWeight(raw, false);
}

SubLabels sub_labels(const ProbMap& m_sos, const ProbMap& m_mos, const BinaryMask& gt,
                     const metrics::MetricConfig& config) {
    detail::check_same_size(m_sos, m_mos, "sub_labels");
    detail::check_same_size(m_sos, gt, "sub_labels");
    return sub_labels(metrics::evaluate_all(m_sos, gt, config),
                      metrics::evaluate_all(m_mos, gt, config));
}

SubLabels sub_labels(const metrics::MetricScores& sos, const metrics::MetricScores& mos) {
    SubLabels out;
    out.y1 = sos.j < mos.j ? 1 : 0;
    out.y2 = sos.f < mos.f ? 1 : 0;
    out.y3 = sos.mae >= mos.mae ? 1 : 0; // the one vote whose tie goes to 1
    out.y4 = sos.s < mos.s ? 1 : 0;
    out.y5 = sos.e < mos.e ? 1 : 0;
    return out;
}

FusionLabel majority_label(const SubLabels& subs) {
    FusionLabel out;
    out.y = subs.sum() >= 3 ? 1 : 0;
    return out;
}

double bce_loss(const FusionWeight& y_hat, const FusionLabel& y) {
    const double w = y_hat.value();
    return -(y.y * std::log(w) + (1.0 - y.y) * std::log(1.0 - w));
}

double bce_grad(const FusionWeight& y_hat, const FusionLabel& y) {
    const double w = y_hat.value();
    return -y.y / w + (1.0 - y.y) / (1.0 - w);
}

ProbMap soft_fuse(double y_hat, const ProbMap& m_mos, const ProbMap& m_sos) {
    detail::check_same_size(m_mos, m_sos, "soft_fuse");
    require(y_hat >= 0.0 && y_hat <= 1.0, "soft_fuse: weight must be in [0,1]");
    if (y_hat == 0.0) return m_sos; // endpoints reproduce the input exactly
    if (y_hat == 1.0) return m_mos;
    ProbMap out(m_mos.width, m_mos.height);
    kern::blend(out.data, m_mos.data, m_sos.data, y_hat);
    return out;
}

ProbMap soft_fuse(const FusionWeight& y_hat, const ProbMap& m_mos, const ProbMap& m_sos) {
    // A clamped weight stands for a raw score at or beyond an endpoint
    // (the clamp only keeps the BCE finite); fuse at the endpoint itself
    // so oracle-style weights reproduce the chosen map bit-exactly.
    const double w = y_hat.clamped() ? std::round(y_hat.value()) : y_hat.value();
    return soft_fuse(w, m_mos, m_sos);
}

ProbMap hard_select(double y_hat, const ProbMap& m_mos, const ProbMap& m_sos) {
    detail::check_same_size(m_mos, m_sos, "hard_select");
    require(y_hat >= 0.0 && y_hat <= 1.0, "hard_select: weight must be in [0,1]");
    return y_hat > 0.5 ? m_mos : m_sos;
}

ProbMap hard_select(const FusionWeight& y_hat, const ProbMap& m_mos, const ProbMap& m_sos) {
    return hard_select(y_hat.value(), m_mos, m_sos);
}

MetricSelection ideal_select_by_metric(const ProbMap& m_sos, const ProbMap& m_mos,
                                       const BinaryMask& gt, MetricId metric,
                                       const metrics::MetricConfig& config) {
    detail::check_same_size(m_sos, m_mos, "ideal_select_by_metric");
    detail::check_same_size(m_sos, gt, "ideal_select_by_metric");

    double tol = config.boundary_tolerance;
    if (tol < 0.0) tol = metrics::default_boundary_tolerance(gt.width, gt.height);

    auto score_one = [&](const ProbMap& pred) {
        switch (metric) {
            case MetricId::MAE:
                return metrics::mae(pred, gt);
            case MetricId::S:
                return metrics::s_measure(pred, gt, config.s_alpha);
            case MetricId::E:
                return metrics::e_measure_max(pred, gt);
            case MetricId::J:
            case MetricId::F: {
                BinaryMask bin(pred.width, pred.height);
                kern::threshold_gt(bin.data, pred.data, config.binarize_threshold);
                return metric == MetricId::J ? metrics::region_similarity_j(bin, gt)
                                             : metrics::boundary_f(bin, gt, tol);
            }
        }
        throw std::invalid_argument("ideal_select_by_metric: unknown metric");
    };

    const double sos = score_one(m_sos);
    const double mos = score_one(m_mos);
    const bool mos_wins = metric == MetricId::MAE ? mos < sos : mos > sos; // ties keep sos
    if (mos_wins) return {m_mos, Choice::Mos};
    return {m_sos, Choice::Sos};
}

MajoritySelection ideal_select_majority(const ProbMap& m_sos, const ProbMap& m_mos,
                                        const BinaryMask& gt,
                                        const metrics::MetricConfig& config) {
    const FusionLabel label = majority_label(sub_labels(m_sos, m_mos, gt, config));
    return {label.y ? m_mos : m_sos, label};
}

FusionWeight ConstantScorer::score(const ScorerInput&) const {
    return FusionWeight::from_raw(value_);
}

FusionWeight OracleScorer::score(const ScorerInput& input) const {
    require(input.m_sos && input.m_mos && input.gt, "OracleScorer: needs m_sos, m_mos and gt");
    const FusionLabel label = majority_label(sub_labels(*input.m_sos, *input.m_mos, *input.gt, config_));
    return FusionWeight::from_raw(label.y ? 1.0 : 0.0); // clamps to the open interval
}

FusionWeight HeuristicScorer::score(const ScorerInput& input) const {
    require(input.m_mos && input.flow, "HeuristicScorer: needs m_mos and flow");
    const FlowField& flow = *input.flow;
    detail::check_same_size(*input.m_mos, flow, "HeuristicScorer");

    const std::size_t n = flow.size();
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (FlowField::is_unknown(flow.u[i], flow.v[i])) {
            mag[i] = 0.0;
            continue;
        }
        mag[i] = std::hypot(static_cast<double>(flow.u[i]), static_cast<double>(flow.v[i]));
    }
    const auto [lo, hi] = std::minmax_element(mag.begin(), mag.end());
    if (*lo == *hi) return FusionWeight::from_raw(0.5); // no motion contrast to score

    std::vector<double> sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double median = sorted[n / 2];

    BinaryMask moving(flow.width, flow.height);
    kern::threshold_gt(moving.data, mag, median);
    BinaryMask mos_bin(flow.width, flow.height);
    kern::threshold_gt(mos_bin.data, input.m_mos->data, 0.5);

    const double iou = metrics::region_similarity_j(mos_bin, moving);
    const double coverage = static_cast<double>(moving.foreground_count()) / static_cast<double>(n);
    return FusionWeight::from_raw(sigmoid(a_ * iou + b_ * coverage + c_));
}

std::unique_ptr<Scorer> make_scorer(std::string_view spec) {
    std::string_view head = spec;
    std::string_view args;
    if (const auto colon = spec.find(':'); colon != std::string_view::npos) {
        head = spec.substr(0, colon);
        args = spec.substr(colon + 1);
    }

    if (head == "oracle") {
        require(args.empty(), "make_scorer: oracle takes no arguments");
        return std::make_unique<OracleScorer>();
    }
    if (head == "constant") {
        if (args.empty()) return std::make_unique<ConstantScorer>();
        return std::make_unique<ConstantScorer>(parse_number(args, "constant value"));
    }
    if (head == "heuristic") {
        if (args.empty()) return std::make_unique<HeuristicScorer>();
        std::vector<double> vals;
        std::size_t start = 0;
        while (start <= args.size()) {
            const auto comma = args.find(',', start);
            const auto end = comma == std::string_view::npos ? args.size() : comma;
            vals.push_back(parse_number(args.substr(start, end - start), "heuristic coefficient"));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        require(vals.size() == 3, "make_scorer: heuristic takes three coefficients a,b,c");
        return std::make_unique<HeuristicScorer>(vals[0], vals[1], vals[2]);
    }
    throw std::invalid_argument("make_scorer: unknown scorer '" + std::string(spec) + "'");
}

} // namespace vos::apf
