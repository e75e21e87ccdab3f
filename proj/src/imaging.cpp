#include "deckfuse/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "deckfuse/errors.hpp"
#include "deckfuse/io.hpp"
#include "deckfuse/text.hpp"

namespace deckfuse {

std::size_t BinaryMask::count() const {
    return std::size_t(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    Hsv out;
    out.v = mx;
    out.s = mx > 0.0 ? delta / mx : 0.0;
    if (delta > 0.0) {
        if (mx == r) {
            out.h = 60.0 * std::fmod((g - b) / delta, 6.0);
        } else if (mx == g) {
            out.h = 60.0 * ((b - r) / delta + 2.0);
        } else {
            out.h = 60.0 * ((r - g) / delta + 4.0);
        }
        if (out.h < 0.0) out.h += 360.0;
    }
    return out;
}

BinaryMask defect_mask(const RasterImage& img, const HsvConfig& cfg) {
    BinaryMask mask = BinaryMask::blank(img.width, img.height);
    for (std::size_t i = 0; i < img.width * img.height; ++i) {
        const std::uint8_t* p = img.pixels.data() + 3 * i;
        const Hsv hsv = rgb_to_hsv(p[0], p[1], p[2]);
        if (hsv.s < cfg.sat_min || hsv.v < cfg.val_min) continue;
        const bool red = hsv.h <= cfg.red_hue_max || hsv.h >= cfg.wrap_hue_min;
        const bool yellow = hsv.h > cfg.red_hue_max && hsv.h <= cfg.yellow_hue_max;
        if (red || yellow) mask.bits[i] = 1;
    }
    return mask;
}

namespace {

std::vector<double> to_grayscale(const RasterImage& img) {
    std::vector<double> gray(img.width * img.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const std::uint8_t* p = img.pixels.data() + 3 * i;
        gray[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return gray;
}

// Separable Gaussian, sigma 1.4, radius 5, replicated borders.
std::vector<double> gaussian_blur(const std::vector<double>& src, std::size_t w, std::size_t h) {
    constexpr int kRadius = 5;
    constexpr double kSigma = 1.4;
    double weights[2 * kRadius + 1];
    double sum = 0.0;
    for (int i = -kRadius; i <= kRadius; ++i) {
        weights[i + kRadius] = std::exp(-0.5 * (i * i) / (kSigma * kSigma));
        sum += weights[i + kRadius];
    }
    for (double& wgt : weights) wgt /= sum;

    const auto clampi = [](long long v, long long hi) {
        return std::size_t(std::clamp(v, 0LL, hi));
    };
    std::vector<double> tmp(src.size()), out(src.size());
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) {
                acc += weights[i + kRadius] * src[y * w + clampi((long long)x + i, (long long)w - 1)];
            }
            tmp[y * w + x] = acc;
        }
    }
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) {
                acc += weights[i + kRadius] * tmp[clampi((long long)y + i, (long long)h - 1) * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

BinaryMask canny_edges(const RasterImage& img, const CannyConfig& cfg) {
    if (!(cfg.low > 0.0) || !(cfg.low < cfg.high)) {
        throw UsageError("edge thresholds must satisfy 0 < low < high, got low=" +
                         text::format_double(cfg.low) + " high=" + text::format_double(cfg.high));
    }
    const std::size_t w = img.width, h = img.height;
    const std::vector<double> blurred = gaussian_blur(to_grayscale(img), w, h);

    const auto px = [&](long long x, long long y) {
        x = std::clamp(x, 0LL, (long long)w - 1);
        y = std::clamp(y, 0LL, (long long)h - 1);
        return blurred[std::size_t(y) * w + std::size_t(x)];
    };
    std::vector<double> mag(w * h, 0.0);
    std::vector<double> dir(w * h, 0.0);
    for (long long y = 0; y < (long long)h; ++y) {
        for (long long x = 0; x < (long long)w; ++x) {
            const double gx = -px(x - 1, y - 1) + px(x + 1, y - 1) - 2.0 * px(x - 1, y) +
                              2.0 * px(x + 1, y) - px(x - 1, y + 1) + px(x + 1, y + 1);
            const double gy = -px(x - 1, y - 1) - 2.0 * px(x, y - 1) - px(x + 1, y - 1) +
                              px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1);
            mag[y * w + x] = std::hypot(gx, gy);
            dir[y * w + x] = std::atan2(gy, gx);
        }
    }

    // Non-maximum suppression along the gradient; the asymmetric tie rule
    // (>= before, > after) keeps exactly one pixel of a two-wide plateau.
    const auto mag_at = [&](long long x, long long y) {
        if (x < 0 || y < 0 || x >= (long long)w || y >= (long long)h) return 0.0;
        return mag[std::size_t(y) * w + std::size_t(x)];
    };
    std::vector<std::uint8_t> ridge(w * h, 0);
    for (long long y = 0; y < (long long)h; ++y) {
        for (long long x = 0; x < (long long)w; ++x) {
            const double m = mag[y * w + x];
            if (m <= 0.0) continue;
            double a = dir[y * w + x] * 180.0 / 3.14159265358979323846;
            if (a < 0.0) a += 180.0;
            double before, after;
            if (a < 22.5 || a >= 157.5) {
                before = mag_at(x - 1, y);
                after = mag_at(x + 1, y);
            } else if (a < 67.5) {
                before = mag_at(x - 1, y - 1);
                after = mag_at(x + 1, y + 1);
            } else if (a < 112.5) {
                before = mag_at(x, y - 1);
                after = mag_at(x, y + 1);
            } else {
                before = mag_at(x + 1, y - 1);
                after = mag_at(x - 1, y + 1);
            }
            if (m >= before && m > after) ridge[y * w + x] = 1;
        }
    }

    // Hysteresis: strong edges seed a flood over weak neighbours.
    BinaryMask edges = BinaryMask::blank(w, h);
    std::deque<std::pair<long long, long long>> queue;
    for (long long y = 0; y < (long long)h; ++y) {
        for (long long x = 0; x < (long long)w; ++x) {
            if (ridge[y * w + x] && mag[y * w + x] >= cfg.high) {
                edges.bits[y * w + x] = 1;
                queue.emplace_back(x, y);
            }
        }
    }
    while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (long long dy = -1; dy <= 1; ++dy) {
            for (long long dx = -1; dx <= 1; ++dx) {
                const long long nx = cx + dx, ny = cy + dy;
                if (nx < 0 || ny < 0 || nx >= (long long)w || ny >= (long long)h) continue;
                const std::size_t idx = std::size_t(ny) * w + std::size_t(nx);
                if (edges.bits[idx] || !ridge[idx] || mag[idx] < cfg.low) continue;
                edges.bits[idx] = 1;
                queue.emplace_back(nx, ny);
            }
        }
    }
    return edges;
}

double edge_density(const RasterImage& img, const CannyConfig& cfg) {
    const BinaryMask edges = canny_edges(img, cfg);
    return double(edges.count()) / double(edges.width * edges.height);
}

namespace {

BinaryMask dilate(const BinaryMask& mask, int kernel) {
    const int r = (kernel - 1) / 2;
    BinaryMask out = BinaryMask::blank(mask.width, mask.height);
    for (long long y = 0; y < (long long)mask.height; ++y) {
        for (long long x = 0; x < (long long)mask.width; ++x) {
            bool any = false;
            for (long long dy = -r; dy <= r && !any; ++dy) {
                for (long long dx = -r; dx <= r && !any; ++dx) {
                    const long long nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= (long long)mask.width ||
                        ny >= (long long)mask.height) {
                        continue;  // outside counts as unset
                    }
                    any = mask.bits[ny * mask.width + nx] != 0;
                }
            }
            out.bits[y * mask.width + x] = any ? 1 : 0;
        }
    }
    return out;
}

BinaryMask erode(const BinaryMask& mask, int kernel) {
    const int r = (kernel - 1) / 2;
    BinaryMask out = BinaryMask::blank(mask.width, mask.height);
    for (long long y = 0; y < (long long)mask.height; ++y) {
        for (long long x = 0; x < (long long)mask.width; ++x) {
            bool all = true;
            for (long long dy = -r; dy <= r && all; ++dy) {
                for (long long dx = -r; dx <= r && all; ++dx) {
                    const long long nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= (long long)mask.width ||
                        ny >= (long long)mask.height) {
                        continue;  // outside counts as set
                    }
                    all = mask.bits[ny * mask.width + nx] != 0;
                }
            }
            out.bits[y * mask.width + x] = all ? 1 : 0;
        }
    }
    return out;
}

}  // namespace

BinaryMask adaptive_morphology(const BinaryMask& mask, double density, const MorphConfig& cfg) {
    if (!(density >= 0.0 && density <= 1.0)) {
        throw UsageError("edge density must lie in [0, 1], got " + text::format_double(density));
    }
    int kernel, iterations;
    if (density < cfg.low_density) {
        kernel = cfg.kernel_low;
        iterations = cfg.iterations_low;
    } else if (density < cfg.high_density) {
        kernel = cfg.kernel_mid;
        iterations = cfg.iterations_mid;
    } else {
        kernel = cfg.kernel_high;
        iterations = cfg.iterations_high;
    }

    BinaryMask work = mask;
    for (int i = 0; i < iterations; ++i) work = dilate(work, kernel);  // closing
    for (int i = 0; i < iterations; ++i) work = erode(work, kernel);
    for (int i = 0; i < iterations; ++i) work = erode(work, kernel);  // opening
    for (int i = 0; i < iterations; ++i) work = dilate(work, kernel);
    return work;
}

std::vector<PixelBox> find_boxes(const BinaryMask& mask, long long min_area) {
    std::vector<std::uint8_t> visited(mask.width * mask.height, 0);
    std::vector<PixelBox> boxes;
    std::deque<std::pair<long long, long long>> queue;
    for (std::size_t y0 = 0; y0 < mask.height; ++y0) {
        for (std::size_t x0 = 0; x0 < mask.width; ++x0) {
            const std::size_t start = y0 * mask.width + x0;
            if (!mask.bits[start] || visited[start]) continue;
            long long min_x = (long long)x0, max_x = (long long)x0;
            long long min_y = (long long)y0, max_y = (long long)y0;
            visited[start] = 1;
            queue.emplace_back((long long)x0, (long long)y0);
            while (!queue.empty()) {
                const auto [cx, cy] = queue.front();
                queue.pop_front();
                min_x = std::min(min_x, cx);
                max_x = std::max(max_x, cx);
                min_y = std::min(min_y, cy);
                max_y = std::max(max_y, cy);
                for (long long dy = -1; dy <= 1; ++dy) {
                    for (long long dx = -1; dx <= 1; ++dx) {
                        const long long nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= (long long)mask.width ||
                            ny >= (long long)mask.height) {
                            continue;
                        }
                        const std::size_t idx = std::size_t(ny) * mask.width + std::size_t(nx);
                        if (!mask.bits[idx] || visited[idx]) continue;
                        visited[idx] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
            PixelBox box{int(min_x), int(min_y), int(max_x - min_x + 1), int(max_y - min_y + 1)};
            if (box.area() >= min_area) boxes.push_back(box);
        }
    }
    std::sort(boxes.begin(), boxes.end(), [](const PixelBox& a, const PixelBox& b) {
        return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
    });
    return boxes;
}

void AxisCalibration::validate() const {
    if (plot_area.w <= 0 || plot_area.h <= 0) {
        throw ValidationError("calibration plot area is degenerate");
    }
    if (!(x_min < x_max) || !(y_min < y_max)) {
        throw ValidationError("calibration data ranges are degenerate");
    }
}

AxisCalibration SidecarCalibration::resolve(const std::optional<DataBox>& data_bounds) const {
    AxisCalibration cal;
    cal.plot_area = PixelBox{plot_left, plot_top, plot_right - plot_left, plot_bottom - plot_top};
    cal.y_inverted = y_inverted;
    const auto pick = [&](const std::optional<double>& own, double fallback, const char* key) {
        if (own) return *own;
        if (!data_bounds) {
            throw ValidationError(std::string("calibration is missing ") + key +
                                  " and no data bounds are available");
        }
        return fallback;
    };
    const DataBox fb = data_bounds.value_or(DataBox{});
    cal.x_min = pick(x_min, fb.x_min, "x_min");
    cal.x_max = pick(x_max, fb.x_max, "x_max");
    cal.y_min = pick(y_min, fb.y_min, "y_min");
    cal.y_max = pick(y_max, fb.y_max, "y_max");
    cal.validate();
    return cal;
}

SidecarCalibration parse_axis_calibration(const std::string& text) {
    SidecarCalibration out;
    bool saw_left = false, saw_top = false, saw_right = false, saw_bottom = false;
    std::size_t line_no = 0;
    const auto need_int = [&](const std::string& v) {
        auto n = text::parse_int(v);
        if (!n) throw ParseError("calibration value `" + v + "` is not an integer", line_no);
        return int(*n);
    };
    const auto need_double = [&](const std::string& v) {
        auto n = text::parse_double(v);
        if (!n) throw ParseError("calibration value `" + v + "` is not a number", line_no);
        return *n;
    };
    for (std::string_view line : text::split(text, '\n')) {
        ++line_no;
        std::string_view body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("calibration line is not `key = value`", line_no);
        }
        const std::string key{text::trim(body.substr(0, eq))};
        const std::string value{text::trim(body.substr(eq + 1))};
        if (key == "plot_left") {
            out.plot_left = need_int(value);
            saw_left = true;
        } else if (key == "plot_top") {
            out.plot_top = need_int(value);
            saw_top = true;
        } else if (key == "plot_right") {
            out.plot_right = need_int(value);
            saw_right = true;
        } else if (key == "plot_bottom") {
            out.plot_bottom = need_int(value);
            saw_bottom = true;
        } else if (key == "x_min") {
            out.x_min = need_double(value);
        } else if (key == "x_max") {
            out.x_max = need_double(value);
        } else if (key == "y_min") {
            out.y_min = need_double(value);
        } else if (key == "y_max") {
            out.y_max = need_double(value);
        } else if (key == "y_inverted") {
            if (value == "true") {
                out.y_inverted = true;
            } else if (value == "false") {
                out.y_inverted = false;
            } else {
                throw ParseError("y_inverted must be true or false, got `" + value + "`", line_no);
            }
        } else {
            throw UsageError("unknown calibration key `" + key + "`");
        }
    }
    if (!saw_left || !saw_top || !saw_right || !saw_bottom) {
        throw SchemaError("calibration must define plot_left, plot_top, plot_right, plot_bottom");
    }
    if (out.plot_left >= out.plot_right || out.plot_top >= out.plot_bottom) {
        throw ValidationError("calibration plot area is degenerate");
    }
    return out;
}

SidecarCalibration read_axis_calibration(const std::string& path) {
    return parse_axis_calibration(io::read_file(path));
}

std::string format_axis_calibration(const AxisCalibration& cal) {
    std::string out;
    out += "plot_left = " + std::to_string(cal.plot_area.x) + "\n";
    out += "plot_top = " + std::to_string(cal.plot_area.y) + "\n";
    out += "plot_right = " + std::to_string(cal.plot_area.x + cal.plot_area.w) + "\n";
    out += "plot_bottom = " + std::to_string(cal.plot_area.y + cal.plot_area.h) + "\n";
    out += "x_min = " + text::format_double(cal.x_min) + "\n";
    out += "x_max = " + text::format_double(cal.x_max) + "\n";
    out += "y_min = " + text::format_double(cal.y_min) + "\n";
    out += "y_max = " + text::format_double(cal.y_max) + "\n";
    out += std::string("y_inverted = ") + (cal.y_inverted ? "true" : "false") + "\n";
    return out;
}

DataBox map_box(const PixelBox& box, const AxisCalibration& cal) {
    cal.validate();
    const double left = double(cal.plot_area.x);
    const double top = double(cal.plot_area.y);
    const double right = left + double(cal.plot_area.w);
    const double bottom = top + double(cal.plot_area.h);

    const double bx_lo = std::max(double(box.x), left);
    const double bx_hi = std::min(double(box.x + box.w), right);
    const double by_lo = std::max(double(box.y), top);
    const double by_hi = std::min(double(box.y + box.h), bottom);
    if (!(bx_lo < bx_hi) || !(by_lo < by_hi)) {
        throw MappingError("pixel box lies entirely outside the plot area");
    }

    const auto map_x = [&](double px) {
        return cal.x_min + (px - left) / (right - left) * (cal.x_max - cal.x_min);
    };
    const auto map_y = [&](double py) {
        const double t = (py - top) / (bottom - top);
        return cal.y_inverted ? cal.y_max - t * (cal.y_max - cal.y_min)
                              : cal.y_min + t * (cal.y_max - cal.y_min);
    };
    DataBox out;
    out.x_min = map_x(bx_lo);
    out.x_max = map_x(bx_hi);
    out.y_min = cal.y_inverted ? map_y(by_hi) : map_y(by_lo);
    out.y_max = cal.y_inverted ? map_y(by_lo) : map_y(by_hi);
    out.validate();
    return out;
}

PixelRect unmap_box(const DataBox& box, const AxisCalibration& cal) {
    cal.validate();
    box.validate();
    const double left = double(cal.plot_area.x);
    const double top = double(cal.plot_area.y);
    const double right = left + double(cal.plot_area.w);
    const double bottom = top + double(cal.plot_area.h);

    const auto unmap_x = [&](double ft) {
        return left + (ft - cal.x_min) / (cal.x_max - cal.x_min) * (right - left);
    };
    const auto unmap_y = [&](double ft) {
        const double t = cal.y_inverted ? (cal.y_max - ft) / (cal.y_max - cal.y_min)
                                        : (ft - cal.y_min) / (cal.y_max - cal.y_min);
        return top + t * (bottom - top);
    };
    PixelRect out;
    out.left = unmap_x(box.x_min);
    out.right = unmap_x(box.x_max);
    out.top = cal.y_inverted ? unmap_y(box.y_max) : unmap_y(box.y_min);
    out.bottom = cal.y_inverted ? unmap_y(box.y_min) : unmap_y(box.y_max);
    return out;
}

std::pair<double, double> unmap_point(double x_ft, double y_ft, const AxisCalibration& cal) {
    cal.validate();
    const double left = double(cal.plot_area.x);
    const double top = double(cal.plot_area.y);
    const double px =
        left + (x_ft - cal.x_min) / (cal.x_max - cal.x_min) * double(cal.plot_area.w);
    const double t = cal.y_inverted ? (cal.y_max - y_ft) / (cal.y_max - cal.y_min)
                                    : (y_ft - cal.y_min) / (cal.y_max - cal.y_min);
    return {px, top + t * double(cal.plot_area.h)};
}

std::vector<DataBox> detect_defect_boxes(const RasterImage& img, const AxisCalibration& cal,
                                         const ImagingConfig& cfg) {
    const BinaryMask mask = defect_mask(img, cfg.hsv);
    const double density = edge_density(img, cfg.canny);
    const BinaryMask cleaned = adaptive_morphology(mask, density, cfg.morph);
    std::vector<DataBox> out;
    for (const PixelBox& box : find_boxes(cleaned, cfg.min_box_area)) {
        try {
            out.push_back(map_box(box, cal));
        } catch (const MappingError&) {
            // Legend or colorbar artifacts sit outside the plot area.
        }
    }
    return out;
}

}  // namespace deckfuse
