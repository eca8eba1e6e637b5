// Copyright 2026 the vosfuse authors
// SPDX-License-Identifier: Apache-2.0

#include "vos/report.hpp"

#include <array>
#include <cstdio>
#include <utility>

#include <json.hpp>

namespace vos::report {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<const char*, harness::VariantMeans harness::VariantSet::*>, 6>
    kVariants = {{
        {"sos", &harness::VariantSet::sos},
        {"mos", &harness::VariantSet::mos},
        {"aps", &harness::VariantSet::aps},
        {"apf", &harness::VariantSet::apf},
        {"ideal", &harness::VariantSet::ideal},
        {"ideal_majority", &harness::VariantSet::ideal_majority},
    }};

std::string printf_string(const char* fmt, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, value);
    return buf;
}

// %.17g round-trips doubles exactly, so CSV carries the same values as the
// JSON emission even though the spellings differ.
std::string full_precision(double value) { return printf_string("%.17g", value); }

json means_json(const harness::VariantMeans& means) {
    return json{{"j", means.j}, {"f", means.f}};
}

harness::VariantMeans means_from_json(const json& j) {
    harness::VariantMeans means;
    means.j = j.at("j").get<double>();
    means.f = j.at("f").get<double>();
    return means;
}

json variant_set_json(const harness::VariantSet& set) {
    json out = json::object();
    for (const auto& [name, member] : kVariants) out[name] = means_json(set.*member);
    return out;
}

harness::VariantSet variant_set_from_json(const json& j) {
    harness::VariantSet set;
    for (const auto& [name, member] : kVariants) set.*member = means_from_json(j.at(name));
    return set;
}

std::string render_csv(const harness::DatasetReport& report) {
    std::string out = "scope,id,variant,mean_j,mean_f,gap_percent\n";
    const double ideal = report.dataset.ideal.j;
    for (const auto& [name, member] : kVariants) {
        const harness::VariantMeans& means = report.dataset.*member;
        out += "dataset,,";
        out += name;
        out += ',' + full_precision(means.j) + ',' + full_precision(means.f) + ',' +
               full_precision(gap_percent(means.j, ideal)) + '\n';
    }
    for (const harness::SequenceSummary& seq : report.sequences) {
        const double seq_ideal = seq.means.ideal.j;
        for (const auto& [name, member] : kVariants) {
            const harness::VariantMeans& means = seq.means.*member;
            out += "sequence," + seq.id + ',';
            out += name;
            out += ',' + full_precision(means.j) + ',' + full_precision(means.f) + ',' +
                   full_precision(gap_percent(means.j, seq_ideal)) + '\n';
        }
    }
    return out;
}

std::string render_text(const harness::DatasetReport& report) {
    char line[160];
    std::snprintf(line, sizeof line, "dataset means (%zu sequences, %zu frames, %zu skipped)\n",
                  report.sequences.size(), report.frames_evaluated, report.frames_skipped);
    std::string out = line;
    out += "variant           mean-J    mean-F    gap-to-ideal\n";
    const double ideal = report.dataset.ideal.j;
    for (const auto& [name, member] : kVariants) {
        const harness::VariantMeans& means = report.dataset.*member;
        std::snprintf(line, sizeof line, "%-16s  %8.4f  %8.4f  %s\n", name, means.j, means.f,
                      gap_string(means.j, ideal).c_str());
        out += line;
    }
    std::snprintf(line, sizeof line,
                  "frame wins by J: sos %zu, mos %zu, ties %zu (scorer: %s)\n", report.sos_wins,
                  report.mos_wins, report.ties, report.config.scorer.c_str());
    out += line;
    return out;
}

}  // namespace

Format parse_format(std::string_view name) {
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    if (name == "text") return Format::Text;
    throw std::invalid_argument("report: unknown format '" + std::string(name) + "'");
}

std::string_view format_name(Format format) {
    switch (format) {
        case Format::Json: return "json";
        case Format::Csv: return "csv";
        case Format::Text: return "text";
    }
    throw std::invalid_argument("report: bad format value");
}

double gap_percent(double value, double ideal) {
    if (ideal == 0.0) return 0.0;
    return (ideal - value) / ideal * 100.0;
}

std::string gap_string(double value, double ideal) {
    return "↓" + printf_string("%.2f", gap_percent(value, ideal)) + "%";
}

std::string to_json(const harness::DatasetReport& report) {
    json config{
        {"root", report.config.root.string()},
        {"gt_dir", report.config.gt_dir},
        {"sos_dir", report.config.sos_dir},
        {"mos_dir", report.config.mos_dir},
        {"flow_dir", report.config.flow_dir},
        {"binarize_threshold", report.config.binarize_threshold},
        {"boundary_tolerance", report.config.boundary_tolerance},
        {"scorer", report.config.scorer},
        {"output_dir", report.config.output_dir.string()},
        {"seed", report.config.seed},
        {"frame_weighted", report.config.frame_weighted},
    };

    json per_sequence = json::array();
    for (const harness::SequenceSummary& seq : report.sequences) {
        json entry = variant_set_json(seq.means);
        entry["id"] = seq.id;
        entry["frames"] = seq.frames;
        per_sequence.push_back(std::move(entry));
    }

    json gaps = json::object();
    for (const auto& [name, member] : kVariants) {
        gaps[name] = gap_string((report.dataset.*member).j, report.dataset.ideal.j);
    }

    json counts{
        {"frames_evaluated", report.frames_evaluated},
        {"frames_skipped", report.frames_skipped},
        {"sos_wins", report.sos_wins},
        {"mos_wins", report.mos_wins},
        {"ties", report.ties},
    };

    json root{
        {"config", std::move(config)},
        {"per_sequence", std::move(per_sequence)},
        {"dataset", variant_set_json(report.dataset)},
        {"gaps", std::move(gaps)},
        {"counts", std::move(counts)},
        {"skipped", report.skipped},
    };
    return root.dump(2) + "\n";
}

harness::DatasetReport from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
        harness::DatasetReport report;
        const json& config = root.at("config");
        report.config.root = config.at("root").get<std::string>();
        report.config.gt_dir = config.at("gt_dir").get<std::string>();
        report.config.sos_dir = config.at("sos_dir").get<std::string>();
        report.config.mos_dir = config.at("mos_dir").get<std::string>();
        report.config.flow_dir = config.at("flow_dir").get<std::string>();
        report.config.binarize_threshold = config.at("binarize_threshold").get<double>();
        report.config.boundary_tolerance = config.at("boundary_tolerance").get<double>();
        report.config.scorer = config.at("scorer").get<std::string>();
        report.config.output_dir = config.at("output_dir").get<std::string>();
        report.config.seed = config.at("seed").get<std::uint64_t>();
        report.config.frame_weighted = config.at("frame_weighted").get<bool>();

        for (const json& entry : root.at("per_sequence")) {
            harness::SequenceSummary seq;
            seq.id = entry.at("id").get<std::string>();
            seq.frames = entry.at("frames").get<std::size_t>();
            seq.means = variant_set_from_json(entry);
            report.sequences.push_back(std::move(seq));
        }

        report.dataset = variant_set_from_json(root.at("dataset"));
        const json& counts = root.at("counts");
        report.frames_evaluated = counts.at("frames_evaluated").get<std::size_t>();
        report.frames_skipped = counts.at("frames_skipped").get<std::size_t>();
        report.sos_wins = counts.at("sos_wins").get<std::size_t>();
        report.mos_wins = counts.at("mos_wins").get<std::size_t>();
        report.ties = counts.at("ties").get<std::size_t>();
        report.skipped = root.at("skipped").get<std::vector<std::string>>();
        return report;
    } catch (const json::exception& e) {
        throw harness::DataError(std::string("report: bad JSON report: ") + e.what());
    }
}

std::string render(const harness::DatasetReport& report, Format format) {
    switch (format) {
        case Format::Json: return to_json(report);
        case Format::Csv: return render_csv(report);
        case Format::Text: return render_text(report);
    }
    throw std::invalid_argument("report: bad format value");
}

}  // namespace vos::report
