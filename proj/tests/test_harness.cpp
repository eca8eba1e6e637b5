// Copyright 2026 the vosfuse authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset walker, aggregation, fusion output, and report emission.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vos/apf.hpp"
#include "vos/harness.hpp"
#include "vos/media_io.hpp"
#include "vos/report.hpp"
#include "vos/synth.hpp"

using namespace vos;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("vosfuse_harness_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

// Small mixed-schedule tree written through the real writer.
fs::path scenario_tree(const char* tag, synth::SynthScenario sc) {
    const fs::path root = fresh_dir(tag);
    synth::write_scenario(sc, root);
    return root;
}

harness::RunConfig config_for(const fs::path& root, const std::string& scorer = "oracle") {
    harness::RunConfig config;
    config.root = root;
    config.scorer = scorer;
    return config;
}

} // namespace

TEST_CASE("motion map equal to ground truth gives perfect fused means") {
    synth::SynthScenario sc;
    sc.sequences = 2;
    sc.frames = 4;
    sc.schedule = synth::FlowSchedule::Clean; // mos == gt per construction
    sc.sos_noise = 0.8;                       // strong enough to flip pixels
    sc.seed = 40;
    const fs::path root = scenario_tree("perfect", sc);

    const auto report = harness::evaluate_dataset(config_for(root));
    CHECK(report.frames_evaluated == 8);
    CHECK(report.frames_skipped == 0);
    CHECK(report.dataset.mos.j == 1.0);
    CHECK(report.dataset.mos.f == 1.0);
    // the oracle scorer and both ideal selections must find the perfect map
    CHECK(report.dataset.aps.j == 1.0);
    CHECK(report.dataset.apf.j == 1.0);
    CHECK(report.dataset.ideal.j == 1.0);
    CHECK(report.dataset.ideal_majority.j == 1.0);
    CHECK(report.dataset.sos.j < 1.0); // sos noise is always on
    fs::remove_all(root);
}

TEST_CASE("frame records stay consistent with direct library calls") {
    synth::SynthScenario sc;
    sc.sequences = 1;
    sc.frames = 6;
    sc.seed = 41;
    const fs::path root = scenario_tree("consistent", sc);

    const auto config = config_for(root);
    const auto report = harness::evaluate_dataset(config);
    REQUIRE(report.frames.size() == 6);
    const metrics::MetricConfig mcfg = config.metric_config();

    for (const auto& record : report.frames) {
        const auto gt = io::read_mask((root / "gt/seq_000" / (record.frame + ".png")).string());
        const auto sos = io::read_prob_map((root / "sos/seq_000" / (record.frame + ".png")).string());
        const auto mos = io::read_prob_map((root / "mos/seq_000" / (record.frame + ".png")).string());

        const auto sos_scores = metrics::evaluate_all(sos, gt, mcfg);
        CHECK(record.sos.j == sos_scores.j);
        CHECK(record.sos.f == sos_scores.f);
        CHECK(record.sos.mae == sos_scores.mae);
        CHECK(record.sos.s == sos_scores.s);
        CHECK(record.sos.e == sos_scores.e);

        const auto labels = apf::sub_labels(sos, mos, gt, mcfg);
        CHECK(record.labels.sum() == labels.sum());
        CHECK(record.majority.y == apf::majority_label(labels).y);

        // selection variants carry exact copies of the chosen side's scores
        const auto selection = apf::ideal_select_by_metric(sos, mos, gt, apf::MetricId::J, mcfg);
        const auto& ideal_side = selection.choice == apf::Choice::Mos ? record.mos : record.sos;
        CHECK(record.ideal.j == ideal_side.j);
        CHECK(record.ideal.j == std::max(record.sos.j, record.mos.j));
        const auto majority_sel = apf::ideal_select_majority(sos, mos, gt, mcfg);
        CHECK(record.ideal_majority.j == (majority_sel.label.y ? record.mos.j : record.sos.j));
    }
    fs::remove_all(root);
}

TEST_CASE("oracle fusion equals majority selection frame for frame") {
    synth::SynthScenario sc;
    sc.sequences = 3;
    sc.frames = 8;
    sc.seed = 42;
    const fs::path root = scenario_tree("oracle", sc);

    const auto report = harness::evaluate_dataset(config_for(root));
    for (const auto& record : report.frames) {
        CHECK(record.apf.j == record.ideal_majority.j);
        CHECK(record.apf.f == record.ideal_majority.f);
        CHECK(record.apf.mae == record.ideal_majority.mae);
        CHECK(record.aps.j == record.ideal_majority.j); // hard select agrees too
        CHECK(record.ideal.j >= std::max(record.sos.j, record.mos.j) - 0.0);
    }
    CHECK(report.dataset.ideal.j >= report.dataset.sos.j);
    CHECK(report.dataset.ideal.j >= report.dataset.mos.j);
    fs::remove_all(root);
}

TEST_CASE("identical prediction streams fuse to themselves for any scorer") {
    synth::SynthScenario sc;
    sc.sequences = 1;
    sc.frames = 5;
    sc.seed = 43;
    const fs::path root = scenario_tree("selffuse", sc);
    fs::remove_all(root / "mos");
    fs::create_directories(root / "mos");
    fs::copy(root / "sos", root / "mos", fs::copy_options::recursive);

    for (const char* scorer : {"constant:0.31", "oracle", "heuristic"}) {
        const auto report = harness::evaluate_dataset(config_for(root, scorer));
        CHECK(report.dataset.apf.j == report.dataset.sos.j);
        CHECK(report.dataset.apf.f == report.dataset.sos.f);
        CHECK(report.dataset.mos.j == report.dataset.sos.j);
    }
    fs::remove_all(root);
}

TEST_CASE("sequence means average into the unweighted dataset mean") {
    synth::SynthScenario sc;
    sc.sequences = 3;
    sc.frames = 5;
    sc.seed = 44;
    const fs::path root = scenario_tree("agg", sc);

    auto config = config_for(root);
    const auto report = harness::evaluate_dataset(config);
    REQUIRE(report.sequences.size() == 3);
    double mean_j = 0.0;
    for (const auto& seq : report.sequences) {
        CHECK(seq.frames == 5);
        double seq_j = 0.0;
        for (const auto& record : report.frames) {
            if (record.sequence == seq.id) seq_j += record.apf.j;
        }
        CHECK(seq.means.apf.j == doctest::Approx(seq_j / 5.0).epsilon(1e-15));
        mean_j += seq.means.apf.j;
    }
    CHECK(report.dataset.apf.j == doctest::Approx(mean_j / 3.0).epsilon(1e-15));

    // frame weighting collapses to the same value only when sequences are
    // equally long; verify it equals the direct mean over all frames
    config.frame_weighted = true;
    const auto weighted = harness::evaluate_dataset(config);
    double direct = 0.0;
    for (const auto& record : weighted.frames) direct += record.apf.j;
    CHECK(weighted.dataset.apf.j == doctest::Approx(direct / 15.0).epsilon(1e-15));

    // wins partition the frames
    CHECK(report.sos_wins + report.mos_wins + report.ties == report.frames_evaluated);
    fs::remove_all(root);
}

TEST_CASE("missing counterpart maps are skipped and logged") {
    synth::SynthScenario sc;
    sc.sequences = 2;
    sc.frames = 4;
    sc.seed = 45;
    const fs::path root = scenario_tree("skip", sc);
    fs::remove(root / "sos/seq_000/00001.png");
    fs::remove(root / "mos/seq_001/00002.png");

    const auto report = harness::evaluate_dataset(config_for(root));
    CHECK(report.frames_evaluated == 6);
    CHECK(report.frames_skipped == 2);
    REQUIRE(report.skipped.size() == 2);
    CHECK(report.skipped[0] == "seq_000/00001: missing sos map");
    CHECK(report.skipped[1] == "seq_001/00002: missing mos map");
    fs::remove_all(root);
}

TEST_CASE("dimension mismatches raise data errors") {
    synth::SynthScenario sc;
    sc.sequences = 1;
    sc.frames = 2;
    sc.seed = 46;
    const fs::path root = scenario_tree("mismatch", sc);
    ProbMap small(8, 8);
    io::write_prob_map((root / "sos/seq_000/00001.png").string(), small);
    CHECK_THROWS_AS(harness::evaluate_dataset(config_for(root)), harness::DataError);
    fs::remove_all(root);
}

TEST_CASE("config validation and tree checks raise config errors") {
    harness::RunConfig config;
    CHECK_THROWS_AS(config.validate(), harness::ConfigError); // empty root
    config.root = "/nonexistent/vosfuse";
    config.binarize_threshold = 1.5;
    CHECK_THROWS_AS(config.validate(), harness::ConfigError);
    config.binarize_threshold = 0.5;
    config.scorer = "mystery";
    CHECK_THROWS_AS(config.validate(), harness::ConfigError);
    config.scorer = "oracle";
    CHECK_NOTHROW(config.validate());
    CHECK_THROWS_AS(harness::evaluate_dataset(config), harness::ConfigError);

    const fs::path root = fresh_dir("nogt");
    config.root = root;
    CHECK_THROWS_AS(harness::evaluate_dataset(config), harness::ConfigError);
    fs::remove_all(root);
}

TEST_CASE("empty datasets raise a data error") {
    const fs::path root = fresh_dir("empty");
    for (const char* sub : {"gt", "sos", "mos"}) fs::create_directories(root / sub);
    CHECK_THROWS_AS(harness::evaluate_dataset(config_for(root)), harness::DataError);
    CHECK_THROWS_AS(harness::build_report({}, config_for(root)), harness::DataError);
    fs::remove_all(root);
}

TEST_CASE("fusing with the oracle writes the better map verbatim") {
    synth::SynthScenario sc;
    sc.sequences = 1;
    sc.frames = 4;
    sc.schedule = synth::FlowSchedule::Clean; // mos == gt
    sc.sos_noise = 0.9;                       // sos loses every sub-label vote
    sc.seed = 47;
    const fs::path root = scenario_tree("fuse_oracle", sc);

    auto config = config_for(root);
    config.output_dir = root / "fused";
    const auto written = harness::fuse_dataset(config);
    REQUIRE(written.size() == 4);
    for (const auto& path : written) {
        const fs::path rel = fs::relative(path, config.output_dir);
        CHECK(slurp(path) == slurp(root / "mos" / rel));
    }
    fs::remove_all(root);
}

TEST_CASE("constant half scorer writes the pixel mean of both maps") {
    synth::SynthScenario sc;
    sc.sequences = 1;
    sc.frames = 2;
    sc.seed = 48;
    const fs::path root = scenario_tree("fuse_mean", sc);

    auto config = config_for(root, "constant:0.5");
    config.output_dir = root / "fused";
    const auto written = harness::fuse_dataset(config);
    REQUIRE(written.size() == 2);
    for (const auto& path : written) {
        const fs::path rel = fs::relative(path, config.output_dir);
        const auto fused = io::read_prob_map(path.string());
        const auto sos = io::read_prob_map((root / "sos" / rel).string());
        const auto mos = io::read_prob_map((root / "mos" / rel).string());
        for (std::size_t i = 0; i < fused.size(); ++i) {
            const double blend = 0.5 * mos.data[i] + 0.5 * sos.data[i];
            CHECK(std::abs(fused.data[i] - blend) <= 0.5 / 255.0 + 1e-12);
        }
    }

    // rerunning the fusion is byte-identical
    auto again = config;
    again.output_dir = root / "fused2";
    harness::fuse_dataset(again);
    for (const auto& path : written) {
        const fs::path rel = fs::relative(path, config.output_dir);
        CHECK(slurp(path) == slurp(again.output_dir / rel));
    }
    fs::remove_all(root);
}

TEST_CASE("gap strings reproduce the reference relative drops") {
    // video means
    CHECK(report::gap_string(74.0, 75.9) == "↓2.50%");
    CHECK(report::gap_string(65.0, 75.9) == "↓14.36%");
    CHECK(report::gap_string(75.0, 75.9) == "↓1.19%");
    // image means
    CHECK(report::gap_string(76.7, 87.2) == "↓12.04%");
    CHECK(report::gap_string(86.3, 87.2) == "↓1.03%");
    CHECK(report::gap_string(87.1, 87.2) == "↓0.11%");
    // scale invariance and the ideal row
    CHECK(report::gap_string(0.740, 0.759) == "↓2.50%");
    CHECK(report::gap_string(87.2, 87.2) == "↓0.00%");
    CHECK(report::gap_percent(50.0, 0.0) == 0.0);
}

TEST_CASE("json report round-trips and renders identically") {
    synth::SynthScenario sc;
    sc.sequences = 2;
    sc.frames = 3;
    sc.seed = 49;
    const fs::path root = scenario_tree("roundtrip", sc);

    const auto report = harness::evaluate_dataset(config_for(root));
    const std::string text = report::to_json(report);
    const auto reloaded = report::from_json(text);
    for (const auto format : {report::Format::Json, report::Format::Csv, report::Format::Text}) {
        CHECK(report::render(reloaded, format) == report::render(report, format));
    }
    CHECK_THROWS_AS(report::from_json("{\"config\": {}}"), harness::DataError);
    CHECK_THROWS_AS(report::from_json("not json"), harness::DataError);
    fs::remove_all(root);
}

TEST_CASE("json and csv emissions carry identical numeric values") {
    synth::SynthScenario sc;
    sc.sequences = 2;
    sc.frames = 4;
    sc.seed = 50;
    const fs::path root = scenario_tree("formats", sc);

    const auto report = harness::evaluate_dataset(config_for(root));
    const auto parsed = nlohmann::json::parse(report::to_json(report));
    const std::string csv = report::render(report, report::Format::Csv);

    // index csv rows by (scope, id, variant)
    std::map<std::string, std::pair<double, double>> rows;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line); // header
    CHECK(line == "scope,id,variant,mean_j,mean_f,gap_percent");
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string scope, id, variant, j, f, gap;
        std::getline(cells, scope, ',');
        std::getline(cells, id, ',');
        std::getline(cells, variant, ',');
        std::getline(cells, j, ',');
        std::getline(cells, f, ',');
        std::getline(cells, gap, ',');
        rows[scope + "/" + id + "/" + variant] = {std::stod(j), std::stod(f)};
    }
    REQUIRE(rows.size() == 6 * 3); // dataset + 2 sequences, 6 variants each

    for (const char* variant :
         {"sos", "mos", "aps", "apf", "ideal", "ideal_majority"}) {
        const auto& [j, f] = rows.at(std::string("dataset//") + variant);
        CHECK(j == parsed.at("dataset").at(variant).at("j").get<double>());
        CHECK(f == parsed.at("dataset").at(variant).at("f").get<double>());
    }
    for (const auto& entry : parsed.at("per_sequence")) {
        const std::string id = entry.at("id").get<std::string>();
        const auto& [j, f] = rows.at("sequence/" + id + "/apf");
        CHECK(j == entry.at("apf").at("j").get<double>());
        CHECK(f == entry.at("apf").at("f").get<double>());
    }

    // gap strings in the json agree with recomputation from reported means
    const double ideal = parsed.at("dataset").at("ideal").at("j").get<double>();
    for (const char* variant : {"sos", "mos", "aps", "apf"}) {
        const double mean = parsed.at("dataset").at(variant).at("j").get<double>();
        CHECK(parsed.at("gaps").at(variant).get<std::string>() ==
              report::gap_string(mean, ideal));
    }
    fs::remove_all(root);
}

TEST_CASE("repeat evaluation is byte-identical") {
    synth::SynthScenario sc;
    sc.sequences = 2;
    sc.frames = 3;
    sc.seed = 51;
    const fs::path root = scenario_tree("determinism", sc);
    const auto a = harness::evaluate_dataset(config_for(root));
    const auto b = harness::evaluate_dataset(config_for(root));
    CHECK(report::to_json(a) == report::to_json(b));
    fs::remove_all(root);
}
