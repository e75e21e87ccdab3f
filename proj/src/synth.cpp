#include "deckfuse/synth.hpp"

#include <cmath>

#include "deckfuse/errors.hpp"
#include "deckfuse/units.hpp"

namespace deckfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kUswSourceHz = 25000.0;  // Ricker center frequency

// Viktorov approximation, shared with the signal module's modulus chain.
double rayleigh_from_shear(double v_s, double nu) {
    return v_s * (0.87 + 1.12 * nu) / (1.0 + nu);
}

double shear_from_modulus_pa(double e_pa, const MaterialProps& mat) {
    return std::sqrt(e_pa / (2.0 * mat.density * (1.0 + mat.poisson_ratio)));
}

double ricker(double t, double f) {
    double a = kPi * kPi * f * f * t * t;
    return (1.0 - 2.0 * a) * std::exp(-a);
}

bool in_any_defect(const std::vector<DataBox>& defects, double x, double y) {
    for (const auto& d : defects)
        if (d.contains(x, y)) return true;
    return false;
}

}  // namespace

double Rng::uniform() {
    // 53 high bits -> [0, 1), deterministic on every platform.
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

void SyntheticSpec::validate() const {
    if (!(grid_pitch > 0.0)) throw ValidationError("synthetic grid_pitch must be > 0");
    if (!(deck.x_max > deck.x_min) || !(deck.y_max > deck.y_min))
        throw ValidationError("synthetic deck extent is empty");
    if (noise_level < 0.0) throw ValidationError("synthetic noise_level must be >= 0");
    if (ie_trace_len < 8 || usw_trace_len < 8)
        throw ValidationError("synthetic trace length must be >= 8");
    if (!(ie_dt > 0.0) || !(usw_dt > 0.0)) throw ValidationError("synthetic dt must be > 0");
    if (!(sensor_spacing > 0.0)) throw ValidationError("synthetic sensor spacing must be > 0");
    material.validate();
    for (const auto& d : defects) {
        d.validate();
        if (d.x_min < deck.x_min || d.x_max > deck.x_max || d.y_min < deck.y_min ||
            d.y_max > deck.y_max)
            throw ValidationError("defect rectangle lies outside deck extent");
    }
    if (!(ie_defect_khz_max < ie_healthy_khz_min))
        throw ValidationError("ie defect band must sit below the healthy band");
    if (!(usw_defect_ksi_max < usw_healthy_ksi_min))
        throw ValidationError("usw defect band must sit below the healthy band");
}

SyntheticResult generate_synthetic_bundle(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);

    SyntheticResult result;
    result.bundle.bridge_id = spec.bridge_id;
    result.bundle.material = spec.material;
    result.bundle.deck_extent = spec.deck;
    result.ground_truth = spec.defects;

    const auto nx = static_cast<std::size_t>(std::floor(spec.deck.width() / spec.grid_pitch));
    const auto ny = static_cast<std::size_t>(std::floor(spec.deck.height() / spec.grid_pitch));
    if (nx == 0 || ny == 0) throw ValidationError("grid pitch larger than deck extent");

    std::vector<std::pair<double, double>> grid;
    grid.reserve(nx * ny);
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy < ny; ++iy)
            grid.emplace_back(spec.deck.x_min + (static_cast<double>(ix) + 0.5) * spec.grid_pitch,
                              spec.deck.y_min + (static_cast<double>(iy) + 0.5) * spec.grid_pitch);

    // IE: damped sinusoid at the point's resonance frequency.
    const double ie_tau = static_cast<double>(spec.ie_trace_len) * spec.ie_dt / 3.0;
    for (const auto& [x, y] : grid) {
        bool defective = in_any_defect(spec.defects, x, y);
        double f_khz = defective ? rng.uniform(spec.ie_defect_khz_min, spec.ie_defect_khz_max)
                                 : rng.uniform(spec.ie_healthy_khz_min, spec.ie_healthy_khz_max);
        double f_hz = units::khz_to_hz(f_khz);

        IeRecord rec;
        rec.x = x;
        rec.y = y;
        rec.trace.sample_interval = spec.ie_dt;
        rec.trace.samples.resize(spec.ie_trace_len);
        for (std::size_t n = 0; n < spec.ie_trace_len; ++n) {
            double t = static_cast<double>(n) * spec.ie_dt;
            rec.trace.samples[n] = std::exp(-t / ie_tau) * std::sin(2.0 * kPi * f_hz * t) +
                                   spec.noise_level * rng.normal();
        }
        result.bundle.ie_records.push_back(std::move(rec));
    }

    // USW: Ricker source pulse, received copy delayed by a whole number of
    // samples matching the point's target modulus.
    const std::size_t pulse_center = spec.usw_trace_len * 3 / 16;
    for (const auto& [x, y] : grid) {
        bool defective = in_any_defect(spec.defects, x, y);
        double e_ksi = defective ? rng.uniform(spec.usw_defect_ksi_min, spec.usw_defect_ksi_max)
                                 : rng.uniform(spec.usw_healthy_ksi_min, spec.usw_healthy_ksi_max);
        double v_s = shear_from_modulus_pa(units::ksi_to_pascal(e_ksi), spec.material);
        double v_r = rayleigh_from_shear(v_s, spec.material.poisson_ratio);
        double delay_s = spec.sensor_spacing / v_r;
        auto delay_samples = static_cast<long>(std::llround(delay_s / spec.usw_dt));
        if (delay_samples < 1) delay_samples = 1;
        if (pulse_center + static_cast<std::size_t>(delay_samples) >= spec.usw_trace_len)
            throw ValidationError("usw trace too short for the slowest synthetic delay");

        UswRecord rec;
        rec.x = x;
        rec.y = y;
        rec.sensor_spacing = spec.sensor_spacing;
        rec.trace_in.sample_interval = spec.usw_dt;
        rec.trace_out.sample_interval = spec.usw_dt;
        rec.trace_in.samples.resize(spec.usw_trace_len);
        rec.trace_out.samples.resize(spec.usw_trace_len);
        for (std::size_t n = 0; n < spec.usw_trace_len; ++n) {
            double t_in = (static_cast<double>(n) - static_cast<double>(pulse_center)) * spec.usw_dt;
            double t_out = t_in - static_cast<double>(delay_samples) * spec.usw_dt;
            rec.trace_in.samples[n] =
                ricker(t_in, kUswSourceHz) + spec.noise_level * rng.normal();
            rec.trace_out.samples[n] =
                0.8 * ricker(t_out, kUswSourceHz) + spec.noise_level * rng.normal();
        }
        result.bundle.usw_records.push_back(std::move(rec));
    }

    result.bundle.validate();
    return result;
}

}  // namespace deckfuse
