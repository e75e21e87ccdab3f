#include "deckfuse/render.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deckfuse/errors.hpp"
#include "deckfuse/text.hpp"

namespace deckfuse {

std::array<std::uint8_t, 3> colormap_rgb(double t) {
    static constexpr double kStops[7][3] = {
        {165, 0, 38},  {215, 48, 39},  {244, 109, 67}, {253, 231, 87},
        {144, 201, 96}, {50, 136, 189}, {49, 54, 149},
    };
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 6.0;
    const int lo = std::min(5, int(pos));
    const double f = pos - lo;
    std::array<std::uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        rgb[c] = std::uint8_t(std::lround(kStops[lo][c] + f * (kStops[lo + 1][c] - kStops[lo][c])));
    }
    return rgb;
}

namespace {

const std::array<std::uint8_t, 7>* glyph_rows(char c) {
    static const std::map<char, std::array<std::uint8_t, 7>> kGlyphs = {
        {'0', {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}},
        {'1', {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e}},
        {'2', {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}},
        {'3', {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e}},
        {'4', {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}},
        {'5', {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e}},
        {'6', {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}},
        {'7', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
        {'8', {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}},
        {'9', {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}},
        {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c}},
        {'-', {0x00, 0x00, 0x00, 0x0e, 0x00, 0x00, 0x00}},
    };
    const auto it = kGlyphs.find(c);
    return it == kGlyphs.end() ? nullptr : &it->second;
}

}  // namespace

void draw_label(RasterImage& img, int x, int y, const std::string& s, std::uint8_t r,
                std::uint8_t g, std::uint8_t b) {
    int cursor = x;
    for (char c : s) {
        if (const auto* rows = glyph_rows(c)) {
            for (int row = 0; row < 7; ++row) {
                for (int col = 0; col < 5; ++col) {
                    if (((*rows)[row] >> (4 - col)) & 1) {
                        const int px = cursor + col, py = y + row;
                        if (px >= 0 && py >= 0 && px < int(img.width) && py < int(img.height)) {
                            img.set(std::size_t(px), std::size_t(py), r, g, b);
                        }
                    }
                }
            }
        }
        cursor += 6;
    }
}

namespace {

struct Canvas {
    RasterImage img;
    AxisCalibration cal;
};

void draw_line(RasterImage& img, double x0, double y0, double x1, double y1, std::uint8_t r,
               std::uint8_t g, std::uint8_t b, bool dashed = false) {
    const double dx = x1 - x0, dy = y1 - y0;
    const int steps = std::max(1, int(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
    for (int i = 0; i <= steps; ++i) {
        if (dashed && (i % 10) >= 6) continue;
        const double t = double(i) / double(steps);
        const int px = int(std::lround(x0 + t * dx));
        const int py = int(std::lround(y0 + t * dy));
        if (px >= 0 && py >= 0 && px < int(img.width) && py < int(img.height)) {
            img.set(std::size_t(px), std::size_t(py), r, g, b);
        }
    }
}

void fill_square(RasterImage& img, int cx, int cy, int half, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) {
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            const int px = cx + dx, py = cy + dy;
            if (px >= 0 && py >= 0 && px < int(img.width) && py < int(img.height)) {
                img.set(std::size_t(px), std::size_t(py), r, g, b);
            }
        }
    }
}

Canvas begin_canvas(const DeckExtent& extent, const RenderConfig& cfg) {
    if (!(extent.width() > 0.0) || !(extent.height() > 0.0)) {
        throw UsageError("plot extent is degenerate");
    }
    if (cfg.pixels_per_foot <= 0) throw UsageError("pixels_per_foot must be positive");
    Canvas canvas;
    const int plot_w = std::max(1, int(std::lround(extent.width() * cfg.pixels_per_foot)));
    const int plot_h = std::max(1, int(std::lround(extent.height() * cfg.pixels_per_foot)));
    const std::size_t w = std::size_t(cfg.margin_left + plot_w + cfg.margin_right);
    const std::size_t h = std::size_t(cfg.margin_top + plot_h + cfg.margin_bottom);
    canvas.img = RasterImage::filled(w, h, 255, 255, 255);
    canvas.cal.plot_area = PixelBox{cfg.margin_left, cfg.margin_top, plot_w, plot_h};
    canvas.cal.x_min = extent.x_min;
    canvas.cal.x_max = extent.x_max;
    canvas.cal.y_min = extent.y_min;
    canvas.cal.y_max = extent.y_max;
    canvas.cal.y_inverted = true;
    return canvas;
}

// Data coordinates of a plot pixel's center.
std::pair<double, double> pixel_center_data(const Canvas& canvas, int px, int py) {
    const AxisCalibration& cal = canvas.cal;
    const double fx = (double(px) + 0.5 - cal.plot_area.x) / cal.plot_area.w;
    const double fy = (double(py) + 0.5 - cal.plot_area.y) / cal.plot_area.h;
    return {cal.x_min + fx * (cal.x_max - cal.x_min), cal.y_max - fy * (cal.y_max - cal.y_min)};
}

void finish_canvas(Canvas& canvas, const LaneLayout& lanes) {
    const PixelBox& pa = canvas.cal.plot_area;
    // Interior lane boundaries, dashed black.
    for (std::size_t i = 1; i + 1 < lanes.boundaries.size(); ++i) {
        const auto [lx, ly] = unmap_point(canvas.cal.x_min, lanes.boundaries[i], canvas.cal);
        const auto [rx, ry] = unmap_point(canvas.cal.x_max, lanes.boundaries[i], canvas.cal);
        draw_line(canvas.img, lx, ly, rx, ry, 0, 0, 0, /*dashed=*/true);
    }
    // Frame.
    const int left = pa.x, top = pa.y, right = pa.x + pa.w, bottom = pa.y + pa.h;
    draw_line(canvas.img, left, top, right, top, 100, 100, 100);
    draw_line(canvas.img, left, bottom, right, bottom, 100, 100, 100);
    draw_line(canvas.img, left, top, left, bottom, 100, 100, 100);
    draw_line(canvas.img, right, top, right, bottom, 100, 100, 100);
    // Axis extremes.
    const std::string x_lo = text::format_double(canvas.cal.x_min);
    const std::string x_hi = text::format_double(canvas.cal.x_max);
    const std::string y_lo = text::format_double(canvas.cal.y_min);
    const std::string y_hi = text::format_double(canvas.cal.y_max);
    draw_label(canvas.img, left, bottom + 6, x_lo, 0, 0, 0);
    draw_label(canvas.img, right - int(x_hi.size()) * 6, bottom + 6, x_hi, 0, 0, 0);
    draw_label(canvas.img, std::max(0, left - 6 - int(y_hi.size()) * 6), top, y_hi, 0, 0, 0);
    draw_label(canvas.img, std::max(0, left - 6 - int(y_lo.size()) * 6), bottom - 7, y_lo, 0, 0, 0);
}

void draw_colorbar(Canvas& canvas, double vmin, double vmax) {
    const PixelBox& pa = canvas.cal.plot_area;
    const int bar_left = pa.x + pa.w + 20;
    const int bar_w = 18;
    for (int py = pa.y; py < pa.y + pa.h; ++py) {
        const double t = pa.h > 1 ? 1.0 - double(py - pa.y) / double(pa.h - 1) : 1.0;
        const auto rgb = colormap_rgb(t);
        for (int px = bar_left; px < bar_left + bar_w; ++px) {
            canvas.img.set(std::size_t(px), std::size_t(py), rgb[0], rgb[1], rgb[2]);
        }
    }
    draw_line(canvas.img, bar_left, pa.y, bar_left + bar_w, pa.y, 100, 100, 100);
    draw_line(canvas.img, bar_left, pa.y + pa.h, bar_left + bar_w, pa.y + pa.h, 100, 100, 100);
    draw_line(canvas.img, bar_left, pa.y, bar_left, pa.y + pa.h, 100, 100, 100);
    draw_line(canvas.img, bar_left + bar_w, pa.y, bar_left + bar_w, pa.y + pa.h, 100, 100, 100);
    draw_label(canvas.img, bar_left + bar_w + 4, pa.y, text::format_fixed(vmax, 1), 0, 0, 0);
    draw_label(canvas.img, bar_left + bar_w + 4, pa.y + pa.h - 7, text::format_fixed(vmin, 1), 0,
               0, 0);
}

void draw_region_outline(Canvas& canvas, const RegionSet& region, std::uint8_t r, std::uint8_t g,
                         std::uint8_t b) {
    const auto draw_ring = [&](const Ring& ring) {
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const Point2& p = ring[i];
            const Point2& q = ring[(i + 1) % ring.size()];
            const auto [x0, y0] = unmap_point(p.x, p.y, canvas.cal);
            const auto [x1, y1] = unmap_point(q.x, q.y, canvas.cal);
            draw_line(canvas.img, x0, y0, x1, y1, r, g, b);
        }
    };
    for (const Polygon& poly : region.polygons) {
        draw_ring(poly.exterior);
        for (const Ring& h : poly.holes) draw_ring(h);
    }
}

void fill_region(Canvas& canvas, const RegionSet& region, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) {
    const PixelBox& pa = canvas.cal.plot_area;
    for (int py = pa.y; py < pa.y + pa.h; ++py) {
        for (int px = pa.x; px < pa.x + pa.w; ++px) {
            const auto [x, y] = pixel_center_data(canvas, px, py);
            if (point_in_region(region, {x, y})) {
                canvas.img.set(std::size_t(px), std::size_t(py), r, g, b);
            }
        }
    }
}

}  // namespace

RenderedPlot render_contour(const GridField& field, const LaneLayout& lanes,
                            const RenderConfig& cfg) {
    Canvas canvas = begin_canvas(field.extent, cfg);
    const auto range = field.value_range();
    const double vmin = range ? range->first : 0.0;
    const double vmax = range ? range->second : 1.0;
    const PixelBox& pa = canvas.cal.plot_area;
    for (int py = pa.y; py < pa.y + pa.h; ++py) {
        for (int px = pa.x; px < pa.x + pa.w; ++px) {
            const auto [x, y] = pixel_center_data(canvas, px, py);
            const auto ix = std::size_t(std::clamp(
                (long long)std::floor((x - field.extent.x_min) / field.cell), 0LL,
                (long long)field.nx - 1));
            const auto iy = std::size_t(std::clamp(
                (long long)std::floor((y - field.extent.y_min) / field.cell), 0LL,
                (long long)field.ny - 1));
            const auto& v = field.at(ix, iy);
            if (!v) {
                canvas.img.set(std::size_t(px), std::size_t(py), 235, 235, 235);
                continue;
            }
            // Degenerate range renders at the high (sound) end.
            const double t = vmax > vmin ? (*v - vmin) / (vmax - vmin) : 1.0;
            const auto rgb = colormap_rgb(t);
            canvas.img.set(std::size_t(px), std::size_t(py), rgb[0], rgb[1], rgb[2]);
        }
    }
    draw_colorbar(canvas, vmin, vmax);
    finish_canvas(canvas, lanes);
    return {std::move(canvas.img), canvas.cal};
}

RenderedPlot render_scatter(const std::vector<FeaturePoint>& all,
                            const std::vector<FeaturePoint>& highlighted,
                            const DeckExtent& extent, const LaneLayout& lanes,
                            const RenderConfig& cfg) {
    Canvas canvas = begin_canvas(extent, cfg);
    for (const FeaturePoint& p : all) {
        const auto [px, py] = unmap_point(p.x, p.y, canvas.cal);
        fill_square(canvas.img, int(std::lround(px)), int(std::lround(py)), 1, 80, 80, 80);
    }
    for (const FeaturePoint& p : highlighted) {
        const auto [px, py] = unmap_point(p.x, p.y, canvas.cal);
        fill_square(canvas.img, int(std::lround(px)), int(std::lround(py)), 2, 200, 20, 20);
    }
    finish_canvas(canvas, lanes);
    return {std::move(canvas.img), canvas.cal};
}

RenderedPlot render_region_overlay(const RegionSet& ie, const RegionSet& usw,
                                   const RegionSet& fused, const DeckExtent& extent,
                                   const LaneLayout& lanes, const RenderConfig& cfg) {
    Canvas canvas = begin_canvas(extent, cfg);
    fill_region(canvas, fused, 160, 220, 160);
    draw_region_outline(canvas, ie, 220, 30, 30);
    draw_region_outline(canvas, usw, 130, 60, 180);
    finish_canvas(canvas, lanes);
    return {std::move(canvas.img), canvas.cal};
}

RenderedPlot render_points_plot(const std::vector<FeaturePoint>& fused, const RegionSet& region,
                                const DeckExtent& extent, const LaneLayout& lanes,
                                const RenderConfig& cfg) {
    Canvas canvas = begin_canvas(extent, cfg);
    fill_region(canvas, region, 200, 232, 200);
    for (const FeaturePoint& p : fused) {
        const auto [px, py] = unmap_point(p.x, p.y, canvas.cal);
        fill_square(canvas.img, int(std::lround(px)), int(std::lround(py)), 2, 200, 20, 20);
    }
    finish_canvas(canvas, lanes);
    return {std::move(canvas.img), canvas.cal};
}

}  // namespace deckfuse
