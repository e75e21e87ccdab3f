#pragma once

#include "deckfuse/config.hpp"

namespace deckfuse {

// One function per subcommand. Stages communicate only through files under
// cfg.out_dir, so running them individually or via run_pipeline produces
// byte-identical results.

/// Survey XML -> ie_features.csv, usw_features.csv, skipped.csv.
void run_convert(const RunConfig& cfg);

/// Feature CSVs -> interpolated contour plots (plots/*.png) with
/// calibration sidecars.
void run_features(const RunConfig& cfg);

/// Feature CSVs -> thresholds.txt, fused.csv, region.wkt, scatter/overlay/
/// fused-point plots. Degenerate fusion warns on stderr and leaves the
/// data outputs empty instead of failing.
void run_fuse(const RunConfig& cfg);

/// Contour images + calibrations -> boxes_ie.csv, boxes_usw.csv.
void run_detect(const RunConfig& cfg);

/// Fused points vs image-detected boxes -> report.csv, report.txt,
/// annotated/*.png.
void run_verify(const RunConfig& cfg);

/// convert, features, fuse, detect, verify — in that order.
void run_pipeline(const RunConfig& cfg);

/// Synthetic survey -> bundle XML (cfg.bundle or <out_dir>/bundle.xml) and
/// truth_boxes.csv.
void run_synth(const RunConfig& cfg);

}  // namespace deckfuse
