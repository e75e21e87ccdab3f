#include "deckfuse/config.hpp"

#include <functional>
#include <map>

#include "deckfuse/errors.hpp"
#include "deckfuse/io.hpp"
#include "deckfuse/text.hpp"

namespace deckfuse {

std::string RunConfig::ie_image_path() const {
    return ie_image.empty() ? out_dir + "/plots/ie_contour.png" : ie_image;
}
std::string RunConfig::usw_image_path() const {
    return usw_image.empty() ? out_dir + "/plots/usw_contour.png" : usw_image;
}
std::string RunConfig::ie_calibration_path() const {
    return ie_calibration.empty() ? ie_image_path() + ".cal" : ie_calibration;
}
std::string RunConfig::usw_calibration_path() const {
    return usw_calibration.empty() ? usw_image_path() + ".cal" : usw_calibration;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
    auto v = text::parse_double(value);
    if (!v) throw ParseError("config key " + key + ": `" + value + "` is not a number");
    return *v;
}

long long to_int(const std::string& key, const std::string& value) {
    auto v = text::parse_int(value);
    if (!v) throw ParseError("config key " + key + ": `" + value + "` is not an integer");
    return *v;
}

long long to_positive_int(const std::string& key, const std::string& value) {
    const long long v = to_int(key, value);
    if (v <= 0) throw UsageError("config key " + key + " must be positive, got " + value);
    return v;
}

}  // namespace

std::vector<DataBox> parse_box_list(const std::string& text) {
    std::vector<DataBox> boxes;
    for (std::string_view part : text::split(text, ';')) {
        part = text::trim(part);
        if (part.empty()) continue;
        const auto cells = text::split(part, ',');
        if (cells.size() != 4) {
            throw ParseError("box `" + std::string(part) +
                             "` must have 4 comma-separated values x_min,x_max,y_min,y_max");
        }
        double v[4];
        for (int i = 0; i < 4; ++i) {
            auto parsed = text::parse_double(text::trim(cells[i]));
            if (!parsed) {
                throw ParseError("box value `" + std::string(cells[i]) + "` is not a number");
            }
            v[i] = *parsed;
        }
        DataBox box{v[0], v[1], v[2], v[3]};
        box.validate();
        boxes.push_back(box);
    }
    return boxes;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> kSetters = {
        {"bundle", [](RunConfig& c, const std::string&, const std::string& v) { c.bundle = v; }},
        {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"ie_image", [](RunConfig& c, const std::string&, const std::string& v) { c.ie_image = v; }},
        {"usw_image",
         [](RunConfig& c, const std::string&, const std::string& v) { c.usw_image = v; }},
        {"ie_calibration",
         [](RunConfig& c, const std::string&, const std::string& v) { c.ie_calibration = v; }},
        {"usw_calibration",
         [](RunConfig& c, const std::string&, const std::string& v) { c.usw_calibration = v; }},
        {"alpha",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.alpha = to_double(k, v);
             if (!(c.alpha > 0.0)) throw UsageError("alpha must be positive");
         }},
        {"lane_count",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.lane_count = std::size_t(to_positive_int(k, v));
         }},
        {"kmeans_seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.kmeans_seed = std::uint64_t(to_int(k, v));
         }},
        {"match_tol",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.match_tol = to_double(k, v);
             if (!(c.match_tol >= 0.0)) throw UsageError("match_tol must be non-negative");
         }},
        {"grid_cell",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.grid_cell = to_double(k, v);
             if (!(c.grid_cell > 0.0)) throw UsageError("grid_cell must be positive");
         }},
        {"hsv_red_hue_max",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.hsv.red_hue_max = to_double(k, v);
         }},
        {"hsv_wrap_hue_min",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.hsv.wrap_hue_min = to_double(k, v);
         }},
        {"hsv_yellow_hue_max",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.hsv.yellow_hue_max = to_double(k, v);
         }},
        {"hsv_sat_min",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.hsv.sat_min = to_double(k, v);
         }},
        {"hsv_val_min",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.hsv.val_min = to_double(k, v);
         }},
        {"canny_low",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.canny.low = to_double(k, v);
         }},
        {"canny_high",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.canny.high = to_double(k, v);
         }},
        {"morph_low_density",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.low_density = to_double(k, v);
         }},
        {"morph_high_density",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.high_density = to_double(k, v);
         }},
        {"morph_kernel_low",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.kernel_low = int(to_positive_int(k, v));
         }},
        {"morph_kernel_mid",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.kernel_mid = int(to_positive_int(k, v));
         }},
        {"morph_kernel_high",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.kernel_high = int(to_positive_int(k, v));
         }},
        {"morph_iterations_low",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.iterations_low = int(to_positive_int(k, v));
         }},
        {"morph_iterations_mid",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.iterations_mid = int(to_positive_int(k, v));
         }},
        {"morph_iterations_high",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.morph.iterations_high = int(to_positive_int(k, v));
         }},
        {"min_box_area",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.imaging.min_box_area = to_positive_int(k, v);
         }},
        {"pixels_per_foot",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.render.pixels_per_foot = int(to_positive_int(k, v));
         }},
        {"synth_seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth_seed = std::uint64_t(to_int(k, v));
         }},
        {"synth_bridge_id",
         [](RunConfig& c, const std::string&, const std::string& v) { c.synth.bridge_id = v; }},
        {"synth_deck",
         [](RunConfig& c, const std::string&, const std::string& v) {
             const auto boxes = parse_box_list(v);
             if (boxes.size() != 1) throw UsageError("synth_deck must be one rectangle");
             c.synth.deck = DeckExtent{boxes[0].x_min, boxes[0].x_max, boxes[0].y_min,
                                       boxes[0].y_max};
         }},
        {"synth_defects",
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.synth.defects = parse_box_list(v);
         }},
        {"synth_grid_pitch",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.grid_pitch = to_double(k, v);
         }},
        {"synth_noise",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.noise_level = to_double(k, v);
         }},
        {"synth_nu",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.material.poisson_ratio = to_double(k, v);
         }},
        {"synth_rho",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.material.density = to_double(k, v);
         }},
        {"synth_sensor_spacing",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.sensor_spacing = to_double(k, v);
         }},
        {"synth_ie_trace_len",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.ie_trace_len = std::size_t(to_positive_int(k, v));
         }},
        {"synth_ie_dt",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.ie_dt = to_double(k, v);
         }},
        {"synth_usw_trace_len",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.usw_trace_len = std::size_t(to_positive_int(k, v));
         }},
        {"synth_usw_dt",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.usw_dt = to_double(k, v);
         }},
        {"synth_ie_defect_khz_min",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.ie_defect_khz_min = to_double(k, v);
         }},
        {"synth_ie_defect_khz_max",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.ie_defect_khz_max = to_double(k, v);
         }},
        {"synth_ie_healthy_khz_min",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.ie_healthy_khz_min = to_double(k, v);
         }},
        {"synth_ie_healthy_khz_max",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.ie_healthy_khz_max = to_double(k, v);
         }},
        {"synth_usw_defect_ksi_min",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.usw_defect_ksi_min = to_double(k, v);
         }},
        {"synth_usw_defect_ksi_max",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.usw_defect_ksi_max = to_double(k, v);
         }},
        {"synth_usw_healthy_ksi_min",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.usw_healthy_ksi_min = to_double(k, v);
         }},
        {"synth_usw_healthy_ksi_max",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.usw_healthy_ksi_max = to_double(k, v);
         }},
        {"synth_usw_healthy_floor_ksi",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth.usw_healthy_floor_ksi = to_double(k, v);
         }},
    };

    const auto it = kSetters.find(key);
    if (it == kSetters.end()) throw UsageError("unknown config key `" + key + "`");
    it->second(cfg, key, value);
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::size_t line_no = 0;
    for (std::string_view line : text::split(text, '\n')) {
        ++line_no;
        const std::string_view body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config line is not `key = value`", line_no);
        }
        apply_config_entry(cfg, std::string(text::trim(body.substr(0, eq))),
                           std::string(text::trim(body.substr(eq + 1))));
    }
    return cfg;
}

RunConfig read_run_config(const std::string& path) {
    return parse_run_config(io::read_file(path));
}

}  // namespace deckfuse
