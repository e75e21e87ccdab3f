#include "deckfuse/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deckfuse/errors.hpp"
#include "deckfuse/io.hpp"
#include "deckfuse/text.hpp"
#include "deckfuse/xml.hpp"

namespace deckfuse {

namespace {

double require_attribute(const xml::Element& elem, std::string_view name) {
    const std::string* raw = elem.find_attribute(name);
    if (!raw)
        throw SchemaError("<" + elem.name + "> at line " + std::to_string(elem.line) +
                          ": missing field " + std::string(name));
    auto v = text::parse_double(*raw);
    if (!v || !std::isfinite(*v))
        throw SchemaError("<" + elem.name + "> at line " + std::to_string(elem.line) +
                          ": field " + std::string(name) + " is not a finite number");
    return *v;
}

std::vector<double> parse_samples(const xml::Element& elem) {
    std::vector<double> samples;
    const std::string& body = elem.text;
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        std::size_t start = i;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        if (i == start) break;
        auto v = text::parse_double(std::string_view(body).substr(start, i - start));
        if (!v)
            throw SchemaError("<" + elem.name + "> at line " + std::to_string(elem.line) +
                              ": malformed sample '" + body.substr(start, i - start) + "'");
        samples.push_back(*v);
    }
    if (samples.empty())
        throw SchemaError("<" + elem.name + "> at line " + std::to_string(elem.line) +
                          ": missing field samples");
    return samples;
}

SensorTrace parse_trace(const xml::Element& elem) {
    SensorTrace trace;
    trace.sample_interval = require_attribute(elem, "dt");
    trace.samples = parse_samples(elem);
    trace.validate();
    return trace;
}

void append_trace(std::string& out, const char* tag, const SensorTrace& trace) {
    out += "<";
    out += tag;
    out += " dt=\"";
    out += text::format_double(trace.sample_interval);
    out += "\">";
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        if (i != 0) out.push_back(' ');
        out += text::format_double(trace.samples[i]);
    }
    out += "</";
    out += tag;
    out += ">";
}

}  // namespace

SurveyBundle parse_xml_bundle(std::string_view xml_bytes) {
    xml::Element root = xml::parse_document(xml_bytes);
    if (root.name != "survey")
        throw SchemaError("document root must be <survey>, found <" + root.name + ">");

    SurveyBundle bundle;
    if (const std::string* id = root.find_attribute("bridge_id")) bundle.bridge_id = *id;
    else throw SchemaError("<survey>: missing field bridge_id");

    const xml::Element* material = root.find_child("material");
    if (!material) throw SchemaError("<survey>: missing element material");
    bundle.material.poisson_ratio = require_attribute(*material, "nu");
    bundle.material.density = require_attribute(*material, "rho");
    bundle.material.validate();

    for (const xml::Element* ie : root.children_named("ie")) {
        IeRecord rec;
        rec.x = require_attribute(*ie, "x");
        rec.y = require_attribute(*ie, "y");
        const xml::Element* trace = ie->find_child("trace");
        if (!trace)
            throw SchemaError("<ie> at line " + std::to_string(ie->line) +
                              ": missing element trace");
        rec.trace = parse_trace(*trace);
        bundle.ie_records.push_back(std::move(rec));
    }

    for (const xml::Element* usw : root.children_named("usw")) {
        UswRecord rec;
        rec.x = require_attribute(*usw, "x");
        rec.y = require_attribute(*usw, "y");
        rec.sensor_spacing = require_attribute(*usw, "spacing");
        const xml::Element* in = usw->find_child("in");
        const xml::Element* out = usw->find_child("out");
        if (!in)
            throw SchemaError("<usw> at line " + std::to_string(usw->line) +
                              ": missing element in");
        if (!out)
            throw SchemaError("<usw> at line " + std::to_string(usw->line) +
                              ": missing element out");
        rec.trace_in = parse_trace(*in);
        rec.trace_out = parse_trace(*out);
        rec.validate();
        bundle.usw_records.push_back(std::move(rec));
    }

    if (const xml::Element* deck = root.find_child("deck")) {
        bundle.deck_extent.x_min = require_attribute(*deck, "x_min");
        bundle.deck_extent.x_max = require_attribute(*deck, "x_max");
        bundle.deck_extent.y_min = require_attribute(*deck, "y_min");
        bundle.deck_extent.y_max = require_attribute(*deck, "y_max");
    } else if (!bundle.ie_records.empty() || !bundle.usw_records.empty()) {
        double x_min = std::numeric_limits<double>::infinity();
        double x_max = -x_min, y_min = x_min, y_max = -x_min;
        auto grow = [&](double x, double y) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        };
        for (const auto& r : bundle.ie_records) grow(r.x, r.y);
        for (const auto& r : bundle.usw_records) grow(r.x, r.y);
        bundle.deck_extent = {x_min, x_max, y_min, y_max};
    } else {
        throw SchemaError("<survey>: empty survey requires a <deck> element");
    }

    bundle.validate();
    return bundle;
}

SurveyBundle read_xml_bundle(const std::filesystem::path& path) {
    return parse_xml_bundle(io::read_file(path));
}

std::string write_xml_bundle(const SurveyBundle& bundle) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<survey bridge_id=\"" + xml::escape(bundle.bridge_id) + "\">\n";
    out += "  <deck x_min=\"" + text::format_double(bundle.deck_extent.x_min) +
           "\" x_max=\"" + text::format_double(bundle.deck_extent.x_max) +
           "\" y_min=\"" + text::format_double(bundle.deck_extent.y_min) +
           "\" y_max=\"" + text::format_double(bundle.deck_extent.y_max) + "\"/>\n";
    out += "  <material nu=\"" + text::format_double(bundle.material.poisson_ratio) +
           "\" rho=\"" + text::format_double(bundle.material.density) + "\"/>\n";
    for (const auto& rec : bundle.ie_records) {
        out += "  <ie x=\"" + text::format_double(rec.x) + "\" y=\"" +
               text::format_double(rec.y) + "\">";
        append_trace(out, "trace", rec.trace);
        out += "</ie>\n";
    }
    for (const auto& rec : bundle.usw_records) {
        out += "  <usw x=\"" + text::format_double(rec.x) + "\" y=\"" +
               text::format_double(rec.y) + "\" spacing=\"" +
               text::format_double(rec.sensor_spacing) + "\">";
        append_trace(out, "in", rec.trace_in);
        append_trace(out, "out", rec.trace_out);
        out += "</usw>\n";
    }
    out += "</survey>\n";
    return out;
}

}  // namespace deckfuse
