#pragma once

#include <cstdint>
#include <string>

#include "deckfuse/imaging.hpp"
#include "deckfuse/render.hpp"
#include "deckfuse/synth.hpp"

namespace deckfuse {

// Everything a pipeline run needs; file values first, command-line
// overrides second.
struct RunConfig {
    // Paths.
    std::string bundle;   // survey XML
    std::string out_dir = "out";
    std::string ie_image;         // defaults to <out_dir>/plots/ie_contour.png
    std::string usw_image;        // defaults to <out_dir>/plots/usw_contour.png
    std::string ie_calibration;   // defaults to <image>.cal
    std::string usw_calibration;

    // Fusion parameters.
    double alpha = 0.5;           // feet
    std::size_t lane_count = 4;
    std::uint64_t kmeans_seed = 0;
    double match_tol = 0.5;       // feet
    double grid_cell = 0.5;       // feet

    ImagingConfig imaging;
    RenderConfig render;

    // Synthetic scenario.
    SyntheticSpec synth;
    std::uint64_t synth_seed = 1;

    std::string ie_image_path() const;
    std::string usw_image_path() const;
    std::string ie_calibration_path() const;
    std::string usw_calibration_path() const;
};

/// Apply one `key = value` assignment; unknown keys raise UsageError and
/// malformed values raise ParseError (so typos fail the run instead of
/// silently using defaults).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` file with `#` comments and blank lines.
RunConfig parse_run_config(const std::string& text);
RunConfig read_run_config(const std::string& path);

/// Semicolon-separated rectangles, each `x_min,x_max,y_min,y_max`.
std::vector<DataBox> parse_box_list(const std::string& text);

}  // namespace deckfuse
