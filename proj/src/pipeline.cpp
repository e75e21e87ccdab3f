#include "deckfuse/pipeline.hpp"

#include <filesystem>
#include <iostream>

#include "deckfuse/csv.hpp"
#include "deckfuse/errors.hpp"
#include "deckfuse/geometry.hpp"
#include "deckfuse/grid.hpp"
#include "deckfuse/ingest.hpp"
#include "deckfuse/io.hpp"
#include "deckfuse/render.hpp"
#include "deckfuse/signal.hpp"
#include "deckfuse/text.hpp"
#include "deckfuse/threshold.hpp"
#include "deckfuse/verify.hpp"

namespace deckfuse {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const char* name) {
    return (fs::path(cfg.out_dir) / name).string();
}

// The deck extent frames every plot and the lane layout. Prefer the survey
// bundle when it is available; otherwise fall back to the feature bounds.
DeckExtent resolve_extent(const RunConfig& cfg, const std::vector<FeaturePoint>& ie,
                          const std::vector<FeaturePoint>& usw) {
    if (!cfg.bundle.empty() && fs::exists(cfg.bundle)) {
        return read_xml_bundle(cfg.bundle).deck_extent;
    }
    bool any = false;
    DeckExtent ext{};
    for (const auto* pts : {&ie, &usw}) {
        for (const FeaturePoint& p : *pts) {
            if (!any) {
                ext = DeckExtent{p.x, p.x, p.y, p.y};
                any = true;
            } else {
                ext.x_min = std::min(ext.x_min, p.x);
                ext.x_max = std::max(ext.x_max, p.x);
                ext.y_min = std::min(ext.y_min, p.y);
                ext.y_max = std::max(ext.y_max, p.y);
            }
        }
    }
    if (!any) throw UsageError("cannot derive a deck extent: no bundle and no feature points");
    if (!(ext.x_min < ext.x_max) || !(ext.y_min < ext.y_max)) {
        throw UsageError("feature points are degenerate (zero-area extent); supply a bundle");
    }
    return ext;
}

void write_plot(const RenderedPlot& plot, const std::string& png_path) {
    write_png(plot.image, png_path);
    io::write_file(png_path + ".cal", format_axis_calibration(plot.calibration));
}

std::string skip_csv(const std::vector<SkipEntry>& skipped) {
    std::string out = "modality,index,x,y,reason\n";
    for (const SkipEntry& s : skipped) {
        std::string reason = s.reason;
        for (char& c : reason) {
            if (c == ',' || c == '\n') c = ';';
        }
        out += std::string(modality_name(s.modality)) + "," + std::to_string(s.index) + "," +
               text::format_double(s.x) + "," + text::format_double(s.y) + "," + reason + "\n";
    }
    return out;
}

struct FeatureInputs {
    std::vector<FeaturePoint> ie;
    std::vector<FeaturePoint> usw;
};

FeatureInputs load_features(const RunConfig& cfg) {
    FeatureInputs in;
    in.ie = read_feature_csv(out_path(cfg, "ie_features.csv"), Modality::IE);
    in.usw = read_feature_csv(out_path(cfg, "usw_features.csv"), Modality::USW);
    return in;
}

AxisCalibration load_calibration(const std::string& path, const std::vector<FeaturePoint>& pts) {
    if (!fs::exists(path)) {
        throw UsageError("calibration sidecar not found: " + path);
    }
    std::optional<DataBox> bounds;
    if (!pts.empty()) {
        DataBox b{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
        for (const FeaturePoint& p : pts) {
            b.x_min = std::min(b.x_min, p.x);
            b.x_max = std::max(b.x_max, p.x);
            b.y_min = std::min(b.y_min, p.y);
            b.y_max = std::max(b.y_max, p.y);
        }
        if (b.x_min < b.x_max && b.y_min < b.y_max) bounds = b;
    }
    return read_axis_calibration(path).resolve(bounds);
}

RasterImage load_image(const std::string& path, const char* modality) {
    if (!fs::exists(path)) {
        throw UsageError(std::string(modality) + " image not found: " + path +
                         " (run `features` first or set the image path)");
    }
    return read_png(path);
}

struct DetectionRun {
    std::vector<DataBox> ie_boxes;
    std::vector<DataBox> usw_boxes;
    RasterImage ie_image;
    RasterImage usw_image;
    AxisCalibration ie_cal;
    AxisCalibration usw_cal;
};

DetectionRun detect_both(const RunConfig& cfg, const FeatureInputs& features) {
    DetectionRun run;
    run.ie_image = load_image(cfg.ie_image_path(), "IE");
    run.usw_image = load_image(cfg.usw_image_path(), "USW");
    run.ie_cal = load_calibration(cfg.ie_calibration_path(), features.ie);
    run.usw_cal = load_calibration(cfg.usw_calibration_path(), features.usw);
    run.ie_boxes = detect_defect_boxes(run.ie_image, run.ie_cal, cfg.imaging);
    run.usw_boxes = detect_defect_boxes(run.usw_image, run.usw_cal, cfg.imaging);
    return run;
}

}  // namespace

void run_convert(const RunConfig& cfg) {
    if (cfg.bundle.empty()) throw UsageError("no survey bundle configured (set `bundle`)");
    const SurveyBundle bundle = read_xml_bundle(cfg.bundle);
    const FeatureExtraction features = extract_features(bundle);
    write_feature_csv(features.ie_points, out_path(cfg, "ie_features.csv"));
    write_feature_csv(features.usw_points, out_path(cfg, "usw_features.csv"));
    io::write_file(out_path(cfg, "skipped.csv"), skip_csv(features.skipped));
}

void run_features(const RunConfig& cfg) {
    const FeatureInputs in = load_features(cfg);
    const DeckExtent extent = resolve_extent(cfg, in.ie, in.usw);
    const LaneLayout lanes = lane_layout(extent.y_min, extent.y_max, cfg.lane_count);
    const fs::path plots = fs::path(cfg.out_dir) / "plots";
    if (!in.ie.empty()) {
        const GridField field = interpolate_grid(in.ie, extent, cfg.grid_cell);
        write_plot(render_contour(field, lanes, cfg.render), (plots / "ie_contour.png").string());
    }
    if (!in.usw.empty()) {
        const GridField field = interpolate_grid(in.usw, extent, cfg.grid_cell);
        write_plot(render_contour(field, lanes, cfg.render), (plots / "usw_contour.png").string());
    }
}

void run_fuse(const RunConfig& cfg) {
    const FeatureInputs in = load_features(cfg);
    const DeckExtent extent = resolve_extent(cfg, in.ie, in.usw);
    const LaneLayout lanes = lane_layout(extent.y_min, extent.y_max, cfg.lane_count);

    std::string warning;
    std::string thresholds_txt;
    std::vector<FeaturePoint> ie_defects, usw_defects;
    FusedDefectSet fused;
    fused.lane_counts.assign(lanes.lane_count, 0);
    try {
        const DefectThreshold ie_thr = ie_threshold(in.ie, cfg.kmeans_seed);
        const DefectThreshold usw_thr = usw_threshold(in.usw, cfg.kmeans_seed);
        thresholds_txt += "ie_threshold = " + text::format_double(ie_thr.value) + "\n";
        thresholds_txt += std::string("ie_rule = ") + threshold_rule_name(ie_thr.rule) + "\n";
        thresholds_txt += "usw_threshold = " + text::format_double(usw_thr.value) + "\n";
        thresholds_txt += std::string("usw_rule = ") + threshold_rule_name(usw_thr.rule) + "\n";
        ie_defects = filter_defects(in.ie, ie_thr);
        usw_defects = filter_defects(in.usw, usw_thr);
        fused = fuse(ie_defects, usw_defects, cfg.alpha, lanes);
        if (!fused.diagnostic.empty()) warning = fused.diagnostic;
    } catch (const DegenerateDataError& e) {
        warning = e.what();
    }

    std::string lane_counts;
    for (std::size_t i = 0; i < fused.lane_counts.size(); ++i) {
        if (i) lane_counts += ",";
        lane_counts += std::to_string(fused.lane_counts[i]);
    }
    thresholds_txt += "fused_lane_counts = " + lane_counts + "\n";

    io::write_file(out_path(cfg, "thresholds.txt"), thresholds_txt);
    write_fused_csv(fused.points, out_path(cfg, "fused.csv"));
    io::write_file(out_path(cfg, "region.wkt"), region_to_wkt(fused.region));

    const fs::path plots = fs::path(cfg.out_dir) / "plots";
    write_plot(render_scatter(in.ie, ie_defects, extent, lanes, cfg.render),
               (plots / "ie_scatter.png").string());
    write_plot(render_scatter(in.usw, usw_defects, extent, lanes, cfg.render),
               (plots / "usw_scatter.png").string());
    write_plot(render_region_overlay(fused.ie_shape, fused.usw_shape, fused.region, extent, lanes,
                                     cfg.render),
               (plots / "alpha_overlay.png").string());
    write_plot(render_points_plot(fused.points, fused.region, extent, lanes, cfg.render),
               (plots / "fused_points.png").string());

    if (!warning.empty()) {
        std::cerr << "warning: fusion is degenerate — " << warning
                  << "; fused outputs are empty\n";
    }
}

void run_detect(const RunConfig& cfg) {
    const FeatureInputs in = load_features(cfg);
    const DetectionRun run = detect_both(cfg, in);
    write_box_csv(run.ie_boxes, out_path(cfg, "boxes_ie.csv"));
    write_box_csv(run.usw_boxes, out_path(cfg, "boxes_usw.csv"));
}

void run_verify(const RunConfig& cfg) {
    const FeatureInputs in = load_features(cfg);
    const std::vector<FeaturePoint> fused_points = read_fused_csv(out_path(cfg, "fused.csv"));
    const DetectionRun run = detect_both(cfg, in);

    OverlaySource ie, usw;
    ie.label = "ie";
    ie.image = &run.ie_image;
    ie.calibration = run.ie_cal;
    ie.boxes = run.ie_boxes;
    ie.tol = cfg.match_tol;
    usw.label = "usw";
    usw.image = &run.usw_image;
    usw.calibration = run.usw_cal;
    usw.boxes = run.usw_boxes;
    usw.tol = cfg.match_tol;
    for (const FeaturePoint& p : fused_points) {
        (p.modality == Modality::IE ? ie.points : usw.points).push_back(p);
    }

    const OverlayResult result = overlay_report(ie, usw);
    io::write_file(out_path(cfg, "report.csv"), report_csv(result.report));
    io::write_file(out_path(cfg, "report.txt"), report_text(result.report));
    const fs::path annotated = fs::path(cfg.out_dir) / "annotated";
    for (const auto& [label, image] : result.annotated) {
        write_png(image, (annotated / (label + "_annotated.png")).string());
    }
    for (const std::string& note : result.notes) {
        std::cerr << "note: " << note << "\n";
    }
}

void run_pipeline(const RunConfig& cfg) {
    run_convert(cfg);
    run_features(cfg);
    run_fuse(cfg);
    run_detect(cfg);
    run_verify(cfg);
}

void run_synth(const RunConfig& cfg) {
    const SyntheticResult result = generate_synthetic_bundle(cfg.synth, cfg.synth_seed);
    const std::string bundle_path =
        cfg.bundle.empty() ? out_path(cfg, "bundle.xml") : cfg.bundle;
    io::write_file(bundle_path, write_xml_bundle(result.bundle));
    write_box_csv(result.ground_truth, out_path(cfg, "truth_boxes.csv"));
}

}  // namespace deckfuse
