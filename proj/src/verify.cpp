#include "deckfuse/verify.hpp"

#include <algorithm>
#include <cmath>

#include "deckfuse/errors.hpp"
#include "deckfuse/text.hpp"

namespace deckfuse {

MatchOutcome match_points_to_boxes(const std::vector<FeaturePoint>& points,
                                   const std::vector<DataBox>& boxes, double tol) {
    if (!(tol >= 0.0)) throw UsageError("match tolerance must be non-negative");
    MatchOutcome out;
    std::vector<DataBox> expanded;
    expanded.reserve(boxes.size());
    for (const DataBox& b : boxes) expanded.push_back(b.expanded(tol));

    std::vector<bool> box_hit(boxes.size(), false);
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        std::size_t first_box = boxes.size();
        for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
            if (expanded[bi].contains(points[pi].x, points[pi].y)) {
                if (first_box == boxes.size()) first_box = bi;
                box_hit[bi] = true;  // occupancy is independent of matching
            }
        }
        if (first_box < boxes.size()) {
            out.matched_pairs.emplace_back(pi, first_box);
            ++out.tp;
        } else {
            ++out.fp;
        }
    }
    out.fn = std::size_t(std::count(box_hit.begin(), box_hit.end(), false));
    return out;
}

VerificationReport micro_metrics(const MatchOutcome& ie, const MatchOutcome& usw) {
    VerificationReport rep;
    rep.ie = ie;
    rep.usw = usw;
    const double tp = double(ie.tp + usw.tp);
    const double fp = double(ie.fp + usw.fp);
    const double fn = double(ie.fn + usw.fn);
    if (tp + fp > 0.0) rep.precision = tp / (tp + fp);
    if (tp + fn > 0.0) rep.recall = tp / (tp + fn);
    if (rep.precision && rep.recall && (*rep.precision + *rep.recall > 0.0)) {
        rep.f1 = 2.0 * *rep.precision * *rep.recall / (*rep.precision + *rep.recall);
    }
    return rep;
}

namespace {

std::string metric_cell(const std::optional<double>& v) {
    return v ? text::format_fixed(*v, 4) : "n/a";
}

}  // namespace

std::string report_csv(const VerificationReport& report) {
    std::string out = "modality,tp,fp,fn\n";
    out += "IE," + std::to_string(report.ie.tp) + "," + std::to_string(report.ie.fp) + "," +
           std::to_string(report.ie.fn) + "\n";
    out += "USW," + std::to_string(report.usw.tp) + "," + std::to_string(report.usw.fp) + "," +
           std::to_string(report.usw.fn) + "\n";
    out += "micro," + metric_cell(report.precision) + "," + metric_cell(report.recall) + "," +
           metric_cell(report.f1) + "\n";
    return out;
}

std::string report_text(const VerificationReport& report) {
    std::string out = "Cross-verification of fused defect points against image boxes\n";
    const auto line = [](const char* label, const MatchOutcome& m) {
        return std::string(label) + ": tp=" + std::to_string(m.tp) +
               " fp=" + std::to_string(m.fp) + " fn=" + std::to_string(m.fn) + "\n";
    };
    out += line("IE ", report.ie);
    out += line("USW", report.usw);
    out += "micro precision: " + metric_cell(report.precision) + "\n";
    out += "micro recall:    " + metric_cell(report.recall) + "\n";
    out += "micro F1:        " + metric_cell(report.f1) + "\n";
    return out;
}

namespace {

void draw_rect_outline(RasterImage& img, int left, int top, int right, int bottom,
                       std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int w = int(img.width), h = int(img.height);
    left = std::clamp(left, 0, w - 1);
    right = std::clamp(right, 0, w - 1);
    top = std::clamp(top, 0, h - 1);
    bottom = std::clamp(bottom, 0, h - 1);
    for (int x = left; x <= right; ++x) {
        img.set(std::size_t(x), std::size_t(top), r, g, b);
        img.set(std::size_t(x), std::size_t(bottom), r, g, b);
    }
    for (int y = top; y <= bottom; ++y) {
        img.set(std::size_t(left), std::size_t(y), r, g, b);
        img.set(std::size_t(right), std::size_t(y), r, g, b);
    }
}

void draw_marker(RasterImage& img, int cx, int cy, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) {
    constexpr int kArm = 3;
    for (int d = -kArm; d <= kArm; ++d) {
        for (int t = -1; t <= 1; ++t) {
            const int px = cx + d, py = cy + t;
            const int qx = cx + t, qy = cy + d;
            if (px >= 0 && py >= 0 && px < int(img.width) && py < int(img.height)) {
                img.set(std::size_t(px), std::size_t(py), r, g, b);
            }
            if (qx >= 0 && qy >= 0 && qx < int(img.width) && qy < int(img.height)) {
                img.set(std::size_t(qx), std::size_t(qy), r, g, b);
            }
        }
    }
}

}  // namespace

RasterImage annotate_image(const RasterImage& img, const AxisCalibration& cal,
                           const std::vector<DataBox>& boxes,
                           const std::vector<FeaturePoint>& points) {
    RasterImage out = img;
    for (const DataBox& box : boxes) {
        const PixelRect rect = unmap_box(box, cal);
        const int left = int(std::lround(rect.left));
        const int right = int(std::lround(rect.right));
        const int top = int(std::lround(rect.top));
        const int bottom = int(std::lround(rect.bottom));
        draw_rect_outline(out, left, top, right, bottom, 0, 0, 255);
        draw_rect_outline(out, left + 1, top + 1, right - 1, bottom - 1, 0, 0, 255);
    }
    for (const FeaturePoint& p : points) {
        const auto [px, py] = unmap_point(p.x, p.y, cal);
        draw_marker(out, int(std::lround(px)), int(std::lround(py)), 255, 0, 0);
    }
    return out;
}

OverlayResult overlay_report(const OverlaySource& ie, const OverlaySource& usw) {
    OverlayResult out;
    const MatchOutcome m_ie = match_points_to_boxes(ie.points, ie.boxes, ie.tol);
    const MatchOutcome m_usw = match_points_to_boxes(usw.points, usw.boxes, usw.tol);
    out.report = micro_metrics(m_ie, m_usw);

    for (const OverlaySource* src : {&ie, &usw}) {
        if (src->image == nullptr) {
            out.notes.push_back(src->label + ": no image supplied, annotation skipped");
            continue;
        }
        if (!src->calibration) {
            out.notes.push_back(src->label + ": calibration missing, annotation skipped");
            continue;
        }
        out.annotated.emplace_back(
            src->label, annotate_image(*src->image, *src->calibration, src->boxes, src->points));
    }
    return out;
}

}  // namespace deckfuse
