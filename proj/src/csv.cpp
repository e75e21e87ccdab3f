#include "deckfuse/csv.hpp"

#include <cmath>

#include "deckfuse/errors.hpp"
#include "deckfuse/io.hpp"
#include "deckfuse/text.hpp"

namespace deckfuse {

namespace {

constexpr const char* kFeatureHeader = "x,y,value";
constexpr const char* kFusedHeader = "x,y,value,modality";
constexpr const char* kBoxHeader = "x_min,x_max,y_min,y_max";

struct CsvReader {
    std::vector<std::string_view> rows;

    CsvReader(const std::string& body, const char* expected_header,
              const std::filesystem::path& path) {
        auto lines = text::split(body, '\n');
        // A trailing LF produces one empty final slot; drop it.
        if (!lines.empty() && lines.back().empty()) lines.pop_back();
        if (lines.empty() || lines.front() != expected_header)
            throw ParseError(path.string() + ": expected header '" + expected_header + "'");
        rows.assign(lines.begin() + 1, lines.end());
    }
};

double parse_cell(std::string_view cell, std::size_t row, const std::filesystem::path& path) {
    auto v = text::parse_double(cell);
    if (!v)
        throw ParseError(path.string() + ": non-numeric cell '" + std::string(cell) +
                         "' at row " + std::to_string(row));
    return *v;
}

void check_finite(const FeaturePoint& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.value))
        throw ValidationError("feature point has non-finite field");
}

}  // namespace

void write_feature_csv(const std::vector<FeaturePoint>& points,
                       const std::filesystem::path& path) {
    std::string out(kFeatureHeader);
    out.push_back('\n');
    for (const auto& p : points) {
        check_finite(p);
        out += text::format_double(p.x);
        out.push_back(',');
        out += text::format_double(p.y);
        out.push_back(',');
        out += text::format_double(p.value);
        out.push_back('\n');
    }
    io::write_file(path, out);
}

std::vector<FeaturePoint> read_feature_csv(const std::filesystem::path& path,
                                           Modality modality) {
    const std::string body = io::read_file(path);
    CsvReader reader(body, kFeatureHeader, path);
    std::vector<FeaturePoint> points;
    points.reserve(reader.rows.size());
    for (std::size_t i = 0; i < reader.rows.size(); ++i) {
        auto cells = text::split(reader.rows[i], ',');
        if (cells.size() != 3)
            throw ParseError(path.string() + ": expected 3 cells at row " + std::to_string(i + 1));
        FeaturePoint p;
        p.x = parse_cell(cells[0], i + 1, path);
        p.y = parse_cell(cells[1], i + 1, path);
        p.value = parse_cell(cells[2], i + 1, path);
        p.modality = modality;
        points.push_back(p);
    }
    return points;
}

void write_fused_csv(const std::vector<FeaturePoint>& points,
                     const std::filesystem::path& path) {
    std::string out(kFusedHeader);
    out.push_back('\n');
    for (const auto& p : points) {
        check_finite(p);
        out += text::format_double(p.x);
        out.push_back(',');
        out += text::format_double(p.y);
        out.push_back(',');
        out += text::format_double(p.value);
        out.push_back(',');
        out += modality_name(p.modality);
        out.push_back('\n');
    }
    io::write_file(path, out);
}

std::vector<FeaturePoint> read_fused_csv(const std::filesystem::path& path) {
    const std::string body = io::read_file(path);
    CsvReader reader(body, kFusedHeader, path);
    std::vector<FeaturePoint> points;
    points.reserve(reader.rows.size());
    for (std::size_t i = 0; i < reader.rows.size(); ++i) {
        auto cells = text::split(reader.rows[i], ',');
        if (cells.size() != 4)
            throw ParseError(path.string() + ": expected 4 cells at row " + std::to_string(i + 1));
        FeaturePoint p;
        p.x = parse_cell(cells[0], i + 1, path);
        p.y = parse_cell(cells[1], i + 1, path);
        p.value = parse_cell(cells[2], i + 1, path);
        if (cells[3] == "IE") p.modality = Modality::IE;
        else if (cells[3] == "USW") p.modality = Modality::USW;
        else
            throw ParseError(path.string() + ": unknown modality '" + std::string(cells[3]) +
                             "' at row " + std::to_string(i + 1));
        points.push_back(p);
    }
    return points;
}

void write_box_csv(const std::vector<DataBox>& boxes, const std::filesystem::path& path) {
    std::string out(kBoxHeader);
    out.push_back('\n');
    for (const auto& b : boxes) {
        out += text::format_double(b.x_min);
        out.push_back(',');
        out += text::format_double(b.x_max);
        out.push_back(',');
        out += text::format_double(b.y_min);
        out.push_back(',');
        out += text::format_double(b.y_max);
        out.push_back('\n');
    }
    io::write_file(path, out);
}

std::vector<DataBox> read_box_csv(const std::filesystem::path& path) {
    const std::string body = io::read_file(path);
    CsvReader reader(body, kBoxHeader, path);
    std::vector<DataBox> boxes;
    boxes.reserve(reader.rows.size());
    for (std::size_t i = 0; i < reader.rows.size(); ++i) {
        auto cells = text::split(reader.rows[i], ',');
        if (cells.size() != 4)
            throw ParseError(path.string() + ": expected 4 cells at row " + std::to_string(i + 1));
        DataBox b;
        b.x_min = parse_cell(cells[0], i + 1, path);
        b.x_max = parse_cell(cells[1], i + 1, path);
        b.y_min = parse_cell(cells[2], i + 1, path);
        b.y_max = parse_cell(cells[3], i + 1, path);
        b.validate();
        boxes.push_back(b);
    }
    return boxes;
}

}  // namespace deckfuse
