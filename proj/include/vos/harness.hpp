// Copyright 2026 the vosfuse authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset walker and report builder.  Given a DAVIS-style tree
//
//   root/gt/<sequence>/<frame>.png      ground-truth masks
//   root/sos/<sequence>/<frame>.png     static-stream probability maps
//   root/mos/<sequence>/<frame>.png     motion-stream probability maps
//   root/flow/<sequence>/<frame>.flo    optical flow (optional)
//
// evaluate_dataset scores every frame for which all required inputs exist,
// runs the fusion decision chain (sub-labels, majority vote, scorer weight,
// soft fusion), and aggregates per-sequence and dataset means for six
// variants: sos, mos, aps (hard selection at the scorer weight), apf (soft
// fusion), ideal (frame-wise best-by-J), and ideal_majority (majority-vote
// selection).  Frames missing a counterpart map are skipped and logged;
// frames whose inputs disagree on dimensions raise DataError.
//
// Aggregation is per-sequence first: each sequence contributes the mean over
// its frames, and the dataset mean is the unweighted mean over sequences.
// RunConfig::frame_weighted switches the dataset mean to a direct mean over
// all frames instead.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vos/apf.hpp"
#include "vos/metrics.hpp"
#include "vos/types.hpp"

namespace vos::harness {

/// Bad option values, unparseable scorer specs, unusable roots.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or inconsistent data encountered mid-run.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::filesystem::path root;
    std::string gt_dir = "gt";
    std::string sos_dir = "sos";
    std::string mos_dir = "mos";
    std::string flow_dir = "flow";  ///< empty string disables flow ingestion
    double binarize_threshold = 0.5;
    double boundary_tolerance = -1.0;  ///< <0: resolution-scaled default
    std::string scorer = "oracle";     ///< apf::make_scorer spec string
    std::filesystem::path output_dir;  ///< fuse_dataset destination
    std::uint64_t seed = 0;
    bool frame_weighted = false;

    metrics::MetricConfig metric_config() const;

    /// Throws ConfigError on out-of-range thresholds, an empty root, or a
    /// scorer spec make_scorer rejects.  Directory existence is checked at
    /// run start, not here.
    void validate() const;
};

/// Everything measured for one frame.  The aps / ideal / ideal_majority
/// variants select an exact copy of one input map, so their scores are
/// copies of that predictor's scores; apf is evaluated on the blended map.
struct FrameRecord {
    std::string sequence;
    std::string frame;  ///< stem without extension, e.g. "00004"
    metrics::MetricScores sos;
    metrics::MetricScores mos;
    metrics::MetricScores aps;
    metrics::MetricScores apf;
    metrics::MetricScores ideal;           ///< frame-wise best by J
    metrics::MetricScores ideal_majority;  ///< majority-vote selection
    apf::SubLabels labels;
    apf::FusionLabel majority;
    double weight = 0.5;  ///< scorer output after clamping
};

struct VariantMeans {
    double j = 0.0;
    double f = 0.0;
};

struct VariantSet {
    VariantMeans sos;
    VariantMeans mos;
    VariantMeans aps;
    VariantMeans apf;
    VariantMeans ideal;
    VariantMeans ideal_majority;
};

struct SequenceSummary {
    std::string id;
    std::size_t frames = 0;
    VariantSet means;
};

struct DatasetReport {
    RunConfig config;
    std::vector<FrameRecord> frames;
    std::vector<SequenceSummary> sequences;
    VariantSet dataset;
    std::size_t frames_evaluated = 0;
    std::size_t frames_skipped = 0;
    std::size_t sos_wins = 0;  ///< frames where sos J strictly beats mos J
    std::size_t mos_wins = 0;
    std::size_t ties = 0;
    std::vector<std::string> skipped;  ///< "<sequence>/<frame>: reason"
};

/// Scores one frame against ground truth.  `flow` may be null; scorers that
/// need it reject the frame (reported as DataError by the dataset walkers).
FrameRecord evaluate_frame(std::string sequence, std::string frame,
                           const ProbMap& m_sos, const ProbMap& m_mos,
                           const BinaryMask& gt, const FlowField* flow,
                           const apf::Scorer& scorer,
                           const metrics::MetricConfig& config);

/// Aggregates records into per-sequence and dataset means.  Records may
/// arrive in any order; sequences are reported sorted by id.  Throws
/// DataError if `frames` is empty.
DatasetReport build_report(std::vector<FrameRecord> frames, RunConfig config);

/// Walks the tree and scores every frame.  Throws ConfigError for a missing
/// root or map directories, DataError for unreadable files, dimension
/// mismatches, or an empty dataset.
DatasetReport evaluate_dataset(const RunConfig& config);

/// Writes soft-fused maps to config.output_dir, mirroring the input layout
/// (<output_dir>/<sequence>/<frame>.png).  Returns the written paths in
/// walk order.  Same skip and error behaviour as evaluate_dataset.
std::vector<std::filesystem::path> fuse_dataset(const RunConfig& config);

}  // namespace vos::harness
