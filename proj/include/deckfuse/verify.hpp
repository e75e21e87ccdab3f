#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deckfuse/imaging.hpp"
#include "deckfuse/types.hpp"

namespace deckfuse {

struct MatchOutcome {
    std::size_t tp = 0;  // points inside some tolerance-expanded box
    std::size_t fp = 0;  // points inside none
    std::size_t fn = 0;  // boxes containing no point
    std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;  // (point, box)
};

/// A point is a true positive iff it lies inside at least one box expanded
/// by `tol` on all sides; it is recorded against the first such box. A box
/// whose expansion contains no point at all is a false negative.
MatchOutcome match_points_to_boxes(const std::vector<FeaturePoint>& points,
                                   const std::vector<DataBox>& boxes, double tol = 0.5);

struct VerificationReport {
    MatchOutcome ie;
    MatchOutcome usw;
    // Micro-averaged over pooled counts; absent (not zero) when the
    // denominator vanishes.
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

VerificationReport micro_metrics(const MatchOutcome& ie, const MatchOutcome& usw);

/// `modality,tp,fp,fn` header and rows, then a `micro,<p>,<r>,<f1>` row with
/// four decimals; absent metrics print as n/a.
std::string report_csv(const VerificationReport& report);
std::string report_text(const VerificationReport& report);

/// Copy of the image with detected boxes outlined in blue and fused points
/// marked in red.
RasterImage annotate_image(const RasterImage& img, const AxisCalibration& cal,
                           const std::vector<DataBox>& boxes,
                           const std::vector<FeaturePoint>& points);

struct OverlaySource {
    std::string label;  // e.g. "ie", used for output naming
    const RasterImage* image = nullptr;              // optional
    std::optional<AxisCalibration> calibration;      // may be missing
    std::vector<DataBox> boxes;
    std::vector<FeaturePoint> points;  // fused points of this modality
    double tol = 0.5;                  // feet
};

struct OverlayResult {
    VerificationReport report;
    std::vector<std::pair<std::string, RasterImage>> annotated;  // label -> image
    std::vector<std::string> notes;  // e.g. image skipped for missing calibration
};

/// Match and annotate both modalities. Metrics come from the data alone;
/// a missing image or calibration only suppresses that annotation and adds
/// a note.
OverlayResult overlay_report(const OverlaySource& ie, const OverlaySource& usw);

}  // namespace deckfuse
