// Copyright 2026 the vosfuse authors
// SPDX-License-Identifier: Apache-2.0
//
// vosfuse: evaluate, fuse, synthesize, and re-render segmentation datasets.
//
// Exit codes: 0 success, 1 configuration error, 2 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vos/harness.hpp"
#include "vos/media_io.hpp"
#include "vos/report.hpp"
#include "vos/synth.hpp"

namespace {

using namespace vos;

void add_tree_options(CLI::App& cmd, harness::RunConfig& config, std::string& root) {
    cmd.add_option("--root", root, "dataset root directory")->required();
    cmd.add_option("--gt", config.gt_dir, "ground-truth subdirectory (default gt)");
    cmd.add_option("--sos", config.sos_dir, "static prediction subdirectory (default sos)");
    cmd.add_option("--mos", config.mos_dir, "motion prediction subdirectory (default mos)");
    cmd.add_option("--flow", config.flow_dir,
                   "optical-flow subdirectory (default flow; empty disables)");
    cmd.add_option("--scorer", config.scorer,
                   "fusion scorer: oracle | constant[:v] | heuristic[:a,b,c]");
    cmd.add_option("--threshold", config.binarize_threshold, "binarization threshold");
    cmd.add_option("--tolerance", config.boundary_tolerance,
                   "boundary match tolerance in pixels (negative: resolution-scaled)");
    cmd.add_flag("--frame-weighted", config.frame_weighted,
                 "weight the dataset mean by frames instead of sequences");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw harness::DataError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw harness::DataError("cannot write " + path);
    out << text;
}

int run(int argc, char** argv) {
    CLI::App app{"adaptive predictor fusion toolkit for video object segmentation"};
    app.require_subcommand(1);

    harness::RunConfig eval_config;
    std::string eval_root, eval_out, eval_format = "text";
    CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
    add_tree_options(*eval_cmd, eval_config, eval_root);
    eval_cmd->add_option("--out", eval_out, "write the JSON report to this path");
    eval_cmd->add_option("--format", eval_format, "stdout rendering: json | csv | text");

    harness::RunConfig fuse_config;
    std::string fuse_root, fuse_out;
    CLI::App* fuse_cmd = app.add_subcommand("fuse", "write soft-fused probability maps");
    add_tree_options(*fuse_cmd, fuse_config, fuse_root);
    fuse_cmd->add_option("--out", fuse_out, "output directory for fused maps")->required();

    synth::SynthScenario scenario;
    std::string synth_root, schedule_name{synth::schedule_name(scenario.schedule)};
    std::string motion_name{synth::motion_name(scenario.motion)};
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset tree");
    synth_cmd->add_option("--root", synth_root, "destination directory")->required();
    synth_cmd->add_option("--seed", scenario.seed, "generator seed");
    synth_cmd->add_option("--sequences", scenario.sequences, "number of sequences");
    synth_cmd->add_option("--frames", scenario.frames, "frames per sequence");
    synth_cmd->add_option("--width", scenario.width, "frame width");
    synth_cmd->add_option("--height", scenario.height, "frame height");
    synth_cmd->add_option("--motion", motion_name, "object shape: rectangle | ellipse");
    synth_cmd->add_option("--schedule", schedule_name,
                          "flow schedule: clean | noisy | dropout | mixed");
    synth_cmd->add_option("--sos-noise", scenario.sos_noise, "static corruption level [0,1]");
    synth_cmd->add_option("--mos-noise-scale", scenario.mos_noise_scale,
                          "motion corruption per unit of flow degradation [0,1]");
    synth_cmd->add_option("--dropout-rate", scenario.dropout_rate,
                          "dropout schedule: probability a frame loses its flow");

    std::string report_in, report_out, report_format = "text";
    CLI::App* report_cmd = app.add_subcommand("report", "re-render a JSON report");
    report_cmd->add_option("--in", report_in, "JSON report produced by eval --out")->required();
    report_cmd->add_option("--format", report_format, "json | csv | text");
    report_cmd->add_option("--out", report_out, "write here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (app.got_subcommand(eval_cmd)) {
        const report::Format format = report::parse_format(eval_format);
        eval_config.root = eval_root;
        const harness::DatasetReport result = harness::evaluate_dataset(eval_config);
        if (!eval_out.empty()) write_file(eval_out, report::to_json(result));
        std::cout << report::render(result, format);
        for (const std::string& line : result.skipped) std::cerr << "skipped " << line << "\n";
        return 0;
    }
    if (app.got_subcommand(fuse_cmd)) {
        fuse_config.root = fuse_root;
        fuse_config.output_dir = fuse_out;
        const auto written = harness::fuse_dataset(fuse_config);
        std::cout << "fused " << written.size() << " frames into " << fuse_out << "\n";
        return 0;
    }
    if (app.got_subcommand(synth_cmd)) {
        scenario.schedule = synth::parse_schedule(schedule_name);
        scenario.motion = synth::parse_motion(motion_name);
        synth::write_scenario(scenario, synth_root);
        std::cout << "wrote " << scenario.sequences << " sequences x " << scenario.frames
                  << " frames under " << synth_root << "\n";
        return 0;
    }
    if (app.got_subcommand(report_cmd)) {
        const report::Format format = report::parse_format(report_format);
        const std::string rendered = report::render(report::from_json(read_file(report_in)), format);
        if (report_out.empty()) {
            std::cout << rendered;
        } else {
            write_file(report_out, rendered);
        }
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const harness::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const io::IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
