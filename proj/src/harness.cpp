// Copyright 2026 the vosfuse authors
// SPDX-License-Identifier: Apache-2.0

#include "vos/harness.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <utility>

#include "vos/media_io.hpp"

namespace vos::harness {

namespace fs = std::filesystem;

namespace {

// One row per fusion variant: which dataset-level mean it feeds and which
// per-frame scores it reads. Keeps the three aggregation loops in sync.
constexpr std::array<std::pair<VariantMeans VariantSet::*, metrics::MetricScores FrameRecord::*>, 6>
    kVariants = {{
        {&VariantSet::sos, &FrameRecord::sos},
        {&VariantSet::mos, &FrameRecord::mos},
        {&VariantSet::aps, &FrameRecord::aps},
        {&VariantSet::apf, &FrameRecord::apf},
        {&VariantSet::ideal, &FrameRecord::ideal},
        {&VariantSet::ideal_majority, &FrameRecord::ideal_majority},
    }};

void accumulate(VariantSet& sums, const FrameRecord& record) {
    for (const auto& [mean, scores] : kVariants) {
        (sums.*mean).j += (record.*scores).j;
        (sums.*mean).f += (record.*scores).f;
    }
}

void accumulate(VariantSet& sums, const VariantSet& means) {
    for (const auto& [mean, scores] : kVariants) {
        (sums.*mean).j += (means.*mean).j;
        (sums.*mean).f += (means.*mean).f;
    }
}

void divide(VariantSet& sums, double n) {
    for (const auto& [mean, scores] : kVariants) {
        (sums.*mean).j /= n;
        (sums.*mean).f /= n;
    }
}

std::vector<std::string> sorted_entries(const fs::path& dir, bool directories,
                                        const std::string& extension) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (directories) {
            if (entry.is_directory()) names.push_back(entry.path().filename().string());
        } else if (entry.is_regular_file() && entry.path().extension() == extension) {
            names.push_back(entry.path().stem().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

struct FrameInputs {
    ProbMap sos;
    ProbMap mos;
    BinaryMask gt;
    FlowField flow;
    bool has_flow = false;
};

// Loads one frame's maps, or records a skip when a counterpart map is
// missing. IoError and dimension mismatches become DataError with the
// frame named.
bool load_frame(const RunConfig& config, const std::string& seq, const std::string& stem,
                FrameInputs& out, std::vector<std::string>& skipped) {
    const std::string where = seq + "/" + stem;
    const fs::path gt_path = config.root / config.gt_dir / seq / (stem + ".png");
    const fs::path sos_path = config.root / config.sos_dir / seq / (stem + ".png");
    const fs::path mos_path = config.root / config.mos_dir / seq / (stem + ".png");

    if (!fs::exists(sos_path)) {
        skipped.push_back(where + ": missing sos map");
        return false;
    }
    if (!fs::exists(mos_path)) {
        skipped.push_back(where + ": missing mos map");
        return false;
    }

    try {
        out.gt = io::read_mask(gt_path.string());
        out.sos = io::read_prob_map(sos_path.string());
        out.mos = io::read_prob_map(mos_path.string());
        out.has_flow = false;
        if (!config.flow_dir.empty()) {
            const fs::path flow_path = config.root / config.flow_dir / seq / (stem + ".flo");
            if (fs::exists(flow_path)) {
                out.flow = io::read_flo_file(flow_path.string());
                out.has_flow = true;
            }
        }
    } catch (const io::IoError& e) {
        throw DataError(where + ": " + e.what());
    }

    if (out.sos.width != out.gt.width || out.sos.height != out.gt.height ||
        out.mos.width != out.gt.width || out.mos.height != out.gt.height) {
        throw DataError(where + ": map dimensions disagree with ground truth");
    }
    if (out.has_flow && (out.flow.width != out.gt.width || out.flow.height != out.gt.height)) {
        throw DataError(where + ": flow dimensions disagree with ground truth");
    }
    return true;
}

void require_tree(const RunConfig& config) {
    config.validate();
    if (!fs::is_directory(config.root)) {
        throw ConfigError("harness: root is not a directory: " + config.root.string());
    }
    for (const std::string* dir : {&config.gt_dir, &config.sos_dir, &config.mos_dir}) {
        if (!fs::is_directory(config.root / *dir)) {
            throw ConfigError("harness: missing map directory: " + (config.root / *dir).string());
        }
    }
}

}  // namespace

metrics::MetricConfig RunConfig::metric_config() const {
    metrics::MetricConfig config;
    config.binarize_threshold = binarize_threshold;
    config.boundary_tolerance = boundary_tolerance;
    return config;
}

void RunConfig::validate() const {
    if (root.empty()) throw ConfigError("harness: root path is empty");
    if (gt_dir.empty() || sos_dir.empty() || mos_dir.empty()) {
        throw ConfigError("harness: map directory names must be non-empty");
    }
    if (!(binarize_threshold >= 0.0 && binarize_threshold <= 1.0)) {
        throw ConfigError("harness: binarize threshold outside [0, 1]");
    }
    try {
        (void)apf::make_scorer(scorer);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("harness: ") + e.what());
    }
}

FrameRecord evaluate_frame(std::string sequence, std::string frame, const ProbMap& m_sos,
                           const ProbMap& m_mos, const BinaryMask& gt, const FlowField* flow,
                           const apf::Scorer& scorer, const metrics::MetricConfig& config) {
    FrameRecord record;
    record.sequence = std::move(sequence);
    record.frame = std::move(frame);
    record.sos = metrics::evaluate_all(m_sos, gt, config);
    record.mos = metrics::evaluate_all(m_mos, gt, config);
    record.labels = apf::sub_labels(record.sos, record.mos);
    record.majority = apf::majority_label(record.labels);

    apf::ScorerInput input;
    input.m_sos = &m_sos;
    input.m_mos = &m_mos;
    input.gt = &gt;
    input.flow = flow;
    const apf::FusionWeight weight = scorer.score(input);
    record.weight = weight.value();

    // Selection variants copy an input map verbatim, so their scores are the
    // chosen predictor's scores. Only the blend needs a fresh evaluation.
    record.aps = weight.value() > 0.5 ? record.mos : record.sos;
    record.ideal = record.mos.j > record.sos.j ? record.mos : record.sos;
    record.ideal_majority = record.majority.y ? record.mos : record.sos;
    record.apf = metrics::evaluate_all(apf::soft_fuse(weight, m_mos, m_sos), gt, config);
    return record;
}

DatasetReport build_report(std::vector<FrameRecord> frames, RunConfig config) {
    if (frames.empty()) throw DataError("harness: no frames evaluated");

    DatasetReport report;
    report.config = std::move(config);
    report.frames = std::move(frames);
    report.frames_evaluated = report.frames.size();

    // Sequence ids sort the same way the walker visits them, so a std::map
    // reproduces walk order while tolerating interleaved records.
    std::map<std::string, SequenceSummary> by_sequence;
    VariantSet frame_sums;
    for (const FrameRecord& record : report.frames) {
        SequenceSummary& summary = by_sequence[record.sequence];
        summary.id = record.sequence;
        summary.frames += 1;
        accumulate(summary.means, record);
        accumulate(frame_sums, record);
        if (record.sos.j > record.mos.j) {
            report.sos_wins += 1;
        } else if (record.mos.j > record.sos.j) {
            report.mos_wins += 1;
        } else {
            report.ties += 1;
        }
    }

    VariantSet sequence_sums;
    for (auto& [id, summary] : by_sequence) {
        divide(summary.means, static_cast<double>(summary.frames));
        accumulate(sequence_sums, summary.means);
        report.sequences.push_back(std::move(summary));
    }

    if (report.config.frame_weighted) {
        report.dataset = frame_sums;
        divide(report.dataset, static_cast<double>(report.frames.size()));
    } else {
        report.dataset = sequence_sums;
        divide(report.dataset, static_cast<double>(report.sequences.size()));
    }
    return report;
}

DatasetReport evaluate_dataset(const RunConfig& config) {
    require_tree(config);
    const std::unique_ptr<apf::Scorer> scorer = apf::make_scorer(config.scorer);
    const metrics::MetricConfig metric_config = config.metric_config();

    std::vector<FrameRecord> frames;
    std::vector<std::string> skipped;
    for (const std::string& seq : sorted_entries(config.root / config.gt_dir, true, "")) {
        for (const std::string& stem :
             sorted_entries(config.root / config.gt_dir / seq, false, ".png")) {
            FrameInputs inputs;
            if (!load_frame(config, seq, stem, inputs, skipped)) continue;
            try {
                frames.push_back(evaluate_frame(seq, stem, inputs.sos, inputs.mos, inputs.gt,
                                                inputs.has_flow ? &inputs.flow : nullptr,
                                                *scorer, metric_config));
            } catch (const std::invalid_argument& e) {
                throw DataError(seq + "/" + stem + ": " + e.what());
            }
        }
    }

    if (frames.empty()) throw DataError("harness: no frames evaluated");
    DatasetReport report = build_report(std::move(frames), config);
    report.frames_skipped = skipped.size();
    report.skipped = std::move(skipped);
    return report;
}

std::vector<fs::path> fuse_dataset(const RunConfig& config) {
    require_tree(config);
    if (config.output_dir.empty()) throw ConfigError("harness: output directory is empty");
    const std::unique_ptr<apf::Scorer> scorer = apf::make_scorer(config.scorer);

    std::vector<fs::path> written;
    std::vector<std::string> skipped;
    for (const std::string& seq : sorted_entries(config.root / config.gt_dir, true, "")) {
        for (const std::string& stem :
             sorted_entries(config.root / config.gt_dir / seq, false, ".png")) {
            FrameInputs inputs;
            if (!load_frame(config, seq, stem, inputs, skipped)) continue;

            apf::ScorerInput input;
            input.m_sos = &inputs.sos;
            input.m_mos = &inputs.mos;
            input.gt = &inputs.gt;
            input.flow = inputs.has_flow ? &inputs.flow : nullptr;
            ProbMap fused;
            try {
                fused = apf::soft_fuse(scorer->score(input), inputs.mos, inputs.sos);
            } catch (const std::invalid_argument& e) {
                throw DataError(seq + "/" + stem + ": " + e.what());
            }

            const fs::path out_dir = config.output_dir / seq;
            fs::create_directories(out_dir);
            const fs::path out_path = out_dir / (stem + ".png");
            io::write_prob_map(out_path.string(), fused);
            written.push_back(out_path);
        }
    }
    if (written.empty()) throw DataError("harness: no frames fused");
    return written;
}

}  // namespace vos::harness
