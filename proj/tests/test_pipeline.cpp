#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "deckfuse/config.hpp"
#include "deckfuse/csv.hpp"
#include "deckfuse/errors.hpp"
#include "deckfuse/ingest.hpp"
#include "deckfuse/io.hpp"
#include "deckfuse/pipeline.hpp"
#include "deckfuse/synth.hpp"
#include "deckfuse/verify.hpp"

using namespace deckfuse;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("deckfuse_pipe_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Small scenario so the full pipeline stays fast: 16x8 ft deck, two defects.
RunConfig small_config(const fs::path& dir) {
    RunConfig cfg;
    cfg.out_dir = (dir / "out").string();
    cfg.bundle = (dir / "bundle.xml").string();
    cfg.lane_count = 2;
    cfg.synth.deck = {0.0, 16.0, 0.0, 8.0};
    cfg.synth.defects = {{2.0, 5.0, 1.0, 4.0}, {10.0, 14.0, 4.0, 7.0}};
    cfg.synth.ie_trace_len = 256;
    cfg.synth.usw_trace_len = 256;
    return cfg;
}

std::vector<std::pair<std::string, std::string>> hash_tree(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> entries;
    for (auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        auto body = io::read_file(e.path());
        // cheap rolling hash is enough to compare trees within one process
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : body) {
            h ^= c;
            h *= 1099511628211ull;
        }
        entries.emplace_back(fs::relative(e.path(), root).string(), std::to_string(h));
    }
    std::sort(entries.begin(), entries.end());
    return entries;
}

} // namespace

TEST_CASE("synthetic generation is deterministic and honestly labeled") {
    SyntheticSpec spec;
    spec.deck = {0.0, 10.0, 0.0, 6.0};
    spec.defects = {{2.0, 4.0, 1.0, 3.0}};
    spec.ie_trace_len = 128;
    spec.usw_trace_len = 256;  // slowest defect-band delay is ~132 samples

    auto r1 = generate_synthetic_bundle(spec, 7);
    auto r2 = generate_synthetic_bundle(spec, 7);
    CHECK(write_xml_bundle(r1.bundle) == write_xml_bundle(r2.bundle));
    CHECK(r1.ground_truth.size() == 1);

    auto r3 = generate_synthetic_bundle(spec, 8);
    CHECK(write_xml_bundle(r1.bundle) != write_xml_bundle(r3.bundle));

    // every deck grid point got both sensors
    CHECK(r1.bundle.ie_records.size() == r1.bundle.usw_records.size());
    CHECK(r1.bundle.ie_records.size() > 100);
    r1.bundle.validate();

    SUBCASE("generator parameter validation rejects nonsense") {
        SyntheticSpec bad = spec;
        bad.grid_pitch = 0.0;
        CHECK_THROWS_AS(bad.validate(), ValidationError);
        SyntheticSpec bad2 = spec;
        bad2.defects = {{50.0, 60.0, 0.0, 2.0}}; // outside the deck
        CHECK_THROWS_AS(bad2.validate(), ValidationError);
        // a trace that cannot hold the slowest delayed pulse is refused
        // rather than silently truncated
        SyntheticSpec bad3 = spec;
        bad3.usw_trace_len = 128;
        CHECK_THROWS_AS(generate_synthetic_bundle(bad3, 1), ValidationError);
    }
}

TEST_CASE("full pipeline on a small synthetic deck") {
    auto dir = temp_dir("full");
    auto cfg = small_config(dir);

    run_synth(cfg);
    REQUIRE(fs::exists(cfg.bundle));
    REQUIRE(fs::exists(fs::path(cfg.out_dir) / "truth_boxes.csv"));

    run_pipeline(cfg);

    const fs::path out = cfg.out_dir;
    for (const char* f :
         {"ie_features.csv", "usw_features.csv", "skipped.csv", "thresholds.txt", "fused.csv",
          "region.wkt", "boxes_ie.csv", "boxes_usw.csv", "report.csv", "report.txt"})
        CHECK(fs::exists(out / f));
    for (const char* f : {"plots/ie_contour.png", "plots/usw_contour.png",
                          "plots/ie_scatter.png", "plots/usw_scatter.png",
                          "plots/alpha_overlay.png", "plots/fused_points.png",
                          "annotated/ie_annotated.png", "annotated/usw_annotated.png"})
        CHECK(fs::exists(out / f));

    // fused points exist and lie inside the planted defects (tolerance one
    // grid pitch for alpha-shape boundary effects)
    auto fused = read_fused_csv(out / "fused.csv");
    CHECK(fused.size() > 10);
    auto truth = read_box_csv(out / "truth_boxes.csv");
    REQUIRE(truth.size() == 2);
    auto match = match_points_to_boxes(fused, truth, 0.5);
    CHECK(match.fp == 0);
    CHECK(match.fn == 0);

    // verification metrics against detected boxes are written and strong
    auto report = io::read_file(out / "report.csv");
    CHECK(report.find("modality,tp,fp,fn") == 0);
    CHECK(report.find("micro,") != std::string::npos);

    // thresholds fall between the synthetic bands
    auto thresholds = io::read_file(out / "thresholds.txt");
    CHECK(thresholds.find("ie_threshold = ") != std::string::npos);
    CHECK(thresholds.find("usw_threshold = ") != std::string::npos);
    CHECK(thresholds.find("fused_lane_counts = ") != std::string::npos);
}

TEST_CASE("stage-by-stage equals one-shot pipeline byte for byte") {
    auto dir = temp_dir("stages");
    auto cfg_a = small_config(dir / "a");
    auto cfg_b = small_config(dir / "b");
    cfg_b.synth_seed = cfg_a.synth_seed;

    run_synth(cfg_a);
    run_pipeline(cfg_a);

    run_synth(cfg_b);
    run_convert(cfg_b);
    run_features(cfg_b);
    run_fuse(cfg_b);
    run_detect(cfg_b);
    run_verify(cfg_b);

    auto ha = hash_tree(fs::path(cfg_a.out_dir));
    auto hb = hash_tree(fs::path(cfg_b.out_dir));
    REQUIRE(ha.size() == hb.size());
    for (std::size_t i = 0; i < ha.size(); ++i) {
        CHECK(ha[i].first == hb[i].first);
        CHECK(ha[i].second == hb[i].second);
    }
}

TEST_CASE("repeated pipeline runs are byte-identical") {
    auto dir = temp_dir("repeat");
    auto cfg = small_config(dir);
    run_synth(cfg);
    run_pipeline(cfg);
    auto first = hash_tree(fs::path(cfg.out_dir));
    run_pipeline(cfg);
    auto second = hash_tree(fs::path(cfg.out_dir));
    CHECK(first == second);
}

TEST_CASE("degenerate fusion warns but exits cleanly with empty outputs") {
    auto dir = temp_dir("degenerate");
    RunConfig cfg;
    cfg.out_dir = (dir / "out").string();
    cfg.lane_count = 2;

    // IE: the sole defect band lives on a single row, so the filtered point
    // set is collinear and no alpha shape exists
    std::vector<FeaturePoint> ie, usw;
    for (int i = 0; i < 32; ++i)
        ie.push_back({0.5 * i, 0.0, 2.0 + 0.01 * i, Modality::IE});
    for (int i = 0; i < 32; ++i)
        for (int j = 1; j <= 4; ++j)
            ie.push_back({0.5 * i, 2.0 * j, 9.0 + static_cast<double>(j % 3), Modality::IE});
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j <= 4; ++j)
            usw.push_back({0.5 * i, 2.0 * j,
                           (i < 8 && j < 2) ? 1400.0 + i + j : 4000.0 + 10.0 * (j % 4),
                           Modality::USW});
    write_feature_csv(ie, fs::path(cfg.out_dir) / "ie_features.csv");
    write_feature_csv(usw, fs::path(cfg.out_dir) / "usw_features.csv");

    run_fuse(cfg); // must not throw

    auto fused = read_fused_csv(fs::path(cfg.out_dir) / "fused.csv");
    CHECK(fused.empty());
    CHECK(io::read_file(fs::path(cfg.out_dir) / "region.wkt").empty());
    auto thresholds = io::read_file(fs::path(cfg.out_dir) / "thresholds.txt");
    CHECK(thresholds.find("ie_threshold = ") != std::string::npos);
}

TEST_CASE("config parsing applies keys and rejects unknowns") {
    RunConfig cfg;
    apply_config_entry(cfg, "alpha", "1.25");
    CHECK(cfg.alpha == 1.25);
    apply_config_entry(cfg, "lane_count", "6");
    CHECK(cfg.lane_count == 6);
    apply_config_entry(cfg, "out_dir", "elsewhere");
    CHECK(cfg.out_dir == "elsewhere");
    apply_config_entry(cfg, "canny_low", "30");
    CHECK(cfg.imaging.canny.low == 30.0);
    apply_config_entry(cfg, "synth_defects", "0,2,0,2;5,8,3,6");
    CHECK(cfg.synth.defects.size() == 2);
    CHECK(cfg.synth.defects[1].x_min == 5.0);

    CHECK_THROWS_AS(apply_config_entry(cfg, "no_such_key", "1"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "alpha", "zebra"), ParseError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "alpha", "-2"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "lane_count", "0"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "match_tol", "-1"), UsageError);

    auto parsed = parse_run_config(
        "# comment\n"
        "\n"
        "alpha = 0.75\n"
        "out_dir = somewhere\n"
        "synth_noise = 0.05\n");
    CHECK(parsed.alpha == 0.75);
    CHECK(parsed.out_dir == "somewhere");
    CHECK(parsed.synth.noise_level == 0.05);

    try {
        parse_run_config("alpha = 0.5\nbroken line\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("convert on a missing bundle is a usage error") {
    RunConfig cfg;
    cfg.out_dir = temp_dir("missing").string();
    cfg.bundle.clear();
    CHECK_THROWS_AS(run_convert(cfg), UsageError);
    cfg.bundle = cfg.out_dir + "/nope.xml";
    CHECK_THROWS_AS(run_convert(cfg), IoError);
}

TEST_CASE("verify without detection inputs is a usage error") {
    auto dir = temp_dir("noimages");
    auto cfg = small_config(dir);
    run_synth(cfg);
    run_convert(cfg);
    // fuse works from CSVs alone, but verify needs the rendered plots
    run_fuse(cfg);
    CHECK_THROWS_AS(run_verify(cfg), UsageError);
}

TEST_CASE("extraction skip report lands in skipped.csv") {
    auto dir = temp_dir("skips");
    RunConfig cfg;
    cfg.out_dir = (dir / "out").string();
    cfg.bundle = (dir / "b.xml").string();

    // one good ie record, one usw record whose received trace is silent
    io::write_file(cfg.bundle,
                   "<survey bridge_id='s'>"
                   "<deck x_min='0' x_max='4' y_min='0' y_max='4'/>"
                   "<material nu='0.2' rho='2400'/>"
                   "<ie x='1' y='1'><trace dt='1e-5'>0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0</trace></ie>"
                   "<usw x='2' y='2' spacing='0.3'>"
                   "<in dt='2e-6'>0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0</in>"
                   "<out dt='2e-6'>0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0</out></usw>"
                   "</survey>");
    run_convert(cfg);
    auto skipped = io::read_file(fs::path(cfg.out_dir) / "skipped.csv");
    CHECK(skipped.find("modality,index,x,y,reason") == 0);
    CHECK(skipped.find("USW,0,2,2,") != std::string::npos);
    CHECK(skipped.find("zero energy") != std::string::npos);
}
