#pragma once

#include <array>
#include <string>
#include <vector>

#include "deckfuse/geometry.hpp"
#include "deckfuse/grid.hpp"
#include "deckfuse/imaging.hpp"
#include "deckfuse/png_io.hpp"
#include "deckfuse/types.hpp"

namespace deckfuse {

struct RenderConfig {
    int pixels_per_foot = 16;
    int margin_left = 60;
    int margin_top = 20;
    int margin_right = 90;  // leaves room for the colorbar
    int margin_bottom = 40;
};

// Plot image plus the pixel→data calibration that reverses it; the
// calibration ships as a sidecar so detection can map boxes back to feet.
struct RenderedPlot {
    RasterImage image;
    AxisCalibration calibration;
};

/// 7-stop ramp, low = red (defect colors), high = blue (sound). t in [0,1].
std::array<std::uint8_t, 3> colormap_rgb(double t);

/// Filled contour raster of the grid (nearest-cell sampling of the IDW
/// field), dashed lane lines, colorbar with value labels, gray frame.
RenderedPlot render_contour(const GridField& field, const LaneLayout& lanes,
                            const RenderConfig& cfg = {});

/// All points in gray, the highlighted (filtered) subset in red.
RenderedPlot render_scatter(const std::vector<FeaturePoint>& all,
                            const std::vector<FeaturePoint>& highlighted,
                            const DeckExtent& extent, const LaneLayout& lanes,
                            const RenderConfig& cfg = {});

/// Modality alpha shapes as outlines (IE red, USW purple) over the filled
/// intersection (green).
RenderedPlot render_region_overlay(const RegionSet& ie, const RegionSet& usw,
                                   const RegionSet& fused, const DeckExtent& extent,
                                   const LaneLayout& lanes, const RenderConfig& cfg = {});

/// Fused defect points (red markers) over the filled common region.
RenderedPlot render_points_plot(const std::vector<FeaturePoint>& fused, const RegionSet& region,
                                const DeckExtent& extent, const LaneLayout& lanes,
                                const RenderConfig& cfg = {});

/// Tiny 5x7 raster font: digits, '.', '-'. Unknown characters advance the
/// cursor without drawing.
void draw_label(RasterImage& img, int x, int y, const std::string& s, std::uint8_t r,
                std::uint8_t g, std::uint8_t b);

}  // namespace deckfuse
