#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "deckfuse/errors.hpp"

namespace deckfuse {

// One recorded waveform: voltage samples at a fixed sampling interval.
struct SensorTrace {
    std::vector<double> samples;  // volts
    double sample_interval = 0.0;  // seconds per sample, > 0

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) * sample_interval; }
    void validate() const;
};

// Impact-echo measurement at one deck location.
struct IeRecord {
    double x = 0.0;  // feet, longitudinal
    double y = 0.0;  // feet, transverse
    SensorTrace trace;

    void validate() const;
};

// Dual-sensor surface-wave measurement at one deck location.
struct UswRecord {
    double x = 0.0;  // feet
    double y = 0.0;  // feet
    SensorTrace trace_in;   // input signal
    SensorTrace trace_out;  // received signal
    double sensor_spacing = 0.0;  // meters, > 0

    void validate() const;
};

struct MaterialProps {
    double poisson_ratio = 0.0;  // dimensionless, in (0, 0.5)
    double density = 0.0;        // kg/m^3, > 0

    void validate() const;
};

struct DeckExtent {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

// Everything collected for one bridge survey.
struct SurveyBundle {
    std::string bridge_id;
    std::vector<IeRecord> ie_records;
    std::vector<UswRecord> usw_records;
    MaterialProps material;
    DeckExtent deck_extent;

    void validate() const;
};

enum class Modality : std::uint8_t { IE, USW };

inline const char* modality_name(Modality m) { return m == Modality::IE ? "IE" : "USW"; }

// Scalar defect feature at a deck location: peak frequency (kHz) for IE,
// elasticity modulus (ksi) for USW.
struct FeaturePoint {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
    Modality modality = Modality::IE;

    bool operator==(const FeaturePoint&) const = default;
};

// Axis-aligned rectangle in deck coordinates (feet).
struct DataBox {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double center_x() const { return 0.5 * (x_min + x_max); }
    double center_y() const { return 0.5 * (y_min + y_max); }

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    DataBox expanded(double margin) const {
        return {x_min - margin, x_max + margin, y_min - margin, y_max + margin};
    }
    void validate() const {
        if (!(x_min < x_max) || !(y_min < y_max))
            throw ValidationError("data box has empty extent");
    }
};

inline void SensorTrace::validate() const {
    if (samples.empty()) throw ValidationError("trace has no samples");
    if (!(sample_interval > 0.0))
        throw ValidationError("trace sample_interval must be > 0");
    for (double v : samples)
        if (!std::isfinite(v)) throw ValidationError("trace contains non-finite sample");
}

inline void IeRecord::validate() const {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw ValidationError("ie record has non-finite coordinates");
    trace.validate();
}

inline void UswRecord::validate() const {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw ValidationError("usw record has non-finite coordinates");
    trace_in.validate();
    trace_out.validate();
    if (trace_in.samples.size() != trace_out.samples.size())
        throw ValidationError("usw input/received traces differ in length");
    if (trace_in.sample_interval != trace_out.sample_interval)
        throw ValidationError("usw input/received traces differ in sample_interval");
    if (!(sensor_spacing > 0.0)) throw ValidationError("usw sensor_spacing must be > 0");
}

inline void MaterialProps::validate() const {
    if (!(poisson_ratio > 0.0) || !(poisson_ratio < 0.5))
        throw ValidationError("poisson_ratio must be in (0, 0.5)");
    if (!(density > 0.0)) throw ValidationError("density must be > 0");
}

inline void SurveyBundle::validate() const {
    material.validate();
    if (!(deck_extent.x_min <= deck_extent.x_max) || !(deck_extent.y_min <= deck_extent.y_max))
        throw ValidationError("deck extent is inverted");
    for (const auto& r : ie_records) {
        r.validate();
        if (!deck_extent.contains(r.x, r.y))
            throw ValidationError("ie record lies outside deck extent");
    }
    for (const auto& r : usw_records) {
        r.validate();
        if (!deck_extent.contains(r.x, r.y))
            throw ValidationError("usw record lies outside deck extent");
    }
}

}  // namespace deckfuse
