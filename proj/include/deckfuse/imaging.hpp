#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deckfuse/png_io.hpp"
#include "deckfuse/types.hpp"

namespace deckfuse {

struct BinaryMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> bits;  // one per pixel, row-major

    static BinaryMask blank(std::size_t w, std::size_t h) {
        return BinaryMask{w, h, std::vector<std::uint8_t>(w * h, 0)};
    }
    bool get(std::size_t x, std::size_t y) const { return bits[y * width + x] != 0; }
    void set(std::size_t x, std::size_t y, bool v = true) { bits[y * width + x] = v ? 1 : 0; }
    std::size_t count() const;
};

struct PixelBox {
    int x = 0;  // top-left corner
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const PixelBox&) const = default;
    long long area() const { return 1LL * w * h; }
};

struct Hsv {
    double h = 0.0;  // degrees, [0, 360)
    double s = 0.0;  // [0, 1]
    double v = 0.0;  // [0, 1]
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Defect palette: reds plus the gradient into yellows. Saturation and value
// floors keep grid lines, text, and washed-out background out of the mask.
struct HsvConfig {
    double red_hue_max = 20.0;     // [0, red_hue_max]
    double wrap_hue_min = 340.0;   // [wrap_hue_min, 360)
    double yellow_hue_max = 65.0;  // (red_hue_max, yellow_hue_max]
    double sat_min = 0.35;
    double val_min = 0.35;
};

BinaryMask defect_mask(const RasterImage& img, const HsvConfig& cfg = {});

struct CannyConfig {
    double low = 50.0;
    double high = 150.0;
};

/// Edge map: ITU-R 601 grayscale, Gaussian blur (sigma 1.4), Sobel gradients,
/// non-maximum suppression, double-threshold hysteresis.
BinaryMask canny_edges(const RasterImage& img, const CannyConfig& cfg = {});

/// Fraction of pixels that are edges; requires 0 < low < high.
double edge_density(const RasterImage& img, const CannyConfig& cfg = {});

struct MorphConfig {
    double low_density = 0.05;   // below: light touch
    double high_density = 0.15;  // at or above: aggressive smoothing
    int kernel_low = 3;
    int iterations_low = 1;
    int kernel_mid = 5;
    int iterations_mid = 2;
    int kernel_high = 7;
    int iterations_high = 3;
};

/// Closing then opening with a square element; kernel size and iteration
/// count step up with edge density.
BinaryMask adaptive_morphology(const BinaryMask& mask, double density,
                               const MorphConfig& cfg = {});

/// Bounding boxes of 8-connected components, discovered in raster order;
/// boxes with area below `min_area` are dropped; result sorted by (y, x).
std::vector<PixelBox> find_boxes(const BinaryMask& mask, long long min_area = 40);

struct AxisCalibration {
    PixelBox plot_area;       // data region inside the axes
    double x_min = 0.0;       // feet, at plot_area left edge
    double x_max = 0.0;       // feet, at plot_area right edge
    double y_min = 0.0;
    double y_max = 0.0;
    bool y_inverted = true;   // raster rows grow downward: top row = y_max

    void validate() const;
};

// Sidecar contents; data ranges may be omitted and supplied from the
// feature CSV bounds instead.
struct SidecarCalibration {
    int plot_left = 0;
    int plot_top = 0;
    int plot_right = 0;
    int plot_bottom = 0;
    std::optional<double> x_min, x_max, y_min, y_max;
    bool y_inverted = true;

    AxisCalibration resolve(const std::optional<DataBox>& data_bounds = std::nullopt) const;
};

SidecarCalibration parse_axis_calibration(const std::string& text);
SidecarCalibration read_axis_calibration(const std::string& path);
std::string format_axis_calibration(const AxisCalibration& cal);

/// Continuous pixel rectangle (left/top/right/bottom edges).
struct PixelRect {
    double left = 0.0;
    double top = 0.0;
    double right = 0.0;
    double bottom = 0.0;
};

/// Linear pixel→data mapping of the box clipped to the plot area. A box
/// entirely outside the plot area raises MappingError.
DataBox map_box(const PixelBox& box, const AxisCalibration& cal);

/// Inverse of map_box on continuous coordinates (round-trip <= 0.5 px).
PixelRect unmap_box(const DataBox& box, const AxisCalibration& cal);

/// Data point to continuous pixel coordinates under the same linear map.
std::pair<double, double> unmap_point(double x_ft, double y_ft, const AxisCalibration& cal);

struct ImagingConfig {
    HsvConfig hsv;
    CannyConfig canny;
    MorphConfig morph;
    long long min_box_area = 40;
};

/// Full image pass: mask defect hues, smooth adaptively by edge density,
/// box the surviving components, and map into data coordinates. Boxes
/// entirely outside the plot area (legend, colorbar) are dropped.
std::vector<DataBox> detect_defect_boxes(const RasterImage& img, const AxisCalibration& cal,
                                         const ImagingConfig& cfg = {});

}  // namespace deckfuse
