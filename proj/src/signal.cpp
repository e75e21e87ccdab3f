#include "deckfuse/signal.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "deckfuse/errors.hpp"
#include "deckfuse/units.hpp"

namespace deckfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan creation is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* real = nullptr;
    fftw_complex* complex_ = nullptr;
    std::size_t n = 0;

    FftwBuffer(std::size_t real_len, std::size_t complex_len) : n(real_len) {
        real = fftw_alloc_real(real_len);
        complex_ = fftw_alloc_complex(complex_len);
        if (!real || !complex_) throw std::bad_alloc();
    }
    ~FftwBuffer() {
        fftw_free(real);
        fftw_free(complex_);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Forward r2c transform; returns N/2+1 unnormalized coefficients.
std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const std::size_t nc = n / 2 + 1;
    FftwBuffer buf(n, nc);
    std::copy(x.begin(), x.end(), buf.real);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.real, buf.complex_, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<std::complex<double>> out(nc);
    for (std::size_t k = 0; k < nc; ++k) out[k] = {buf.complex_[k][0], buf.complex_[k][1]};
    return out;
}

// Inverse c2r transform of N/2+1 coefficients into n real values; applies
// the 1/n normalization FFTW leaves out.
std::vector<double> ifft_real(const std::vector<std::complex<double>>& spec, std::size_t n) {
    const std::size_t nc = n / 2 + 1;
    FftwBuffer buf(n, nc);
    for (std::size_t k = 0; k < nc; ++k) {
        buf.complex_[k][0] = spec[k].real();
        buf.complex_[k][1] = spec[k].imag();
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), buf.complex_, buf.real, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<double> out(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf.real[i] * scale;
    return out;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double energy(const std::vector<double>& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

}  // namespace

Spectrum amplitude_spectrum(const SensorTrace& trace, bool hann_window) {
    trace.validate();
    const std::size_t n = trace.samples.size();
    if (n < 8) throw ValidationError("amplitude_spectrum requires at least 8 samples");

    std::vector<double> x = trace.samples;
    if (hann_window) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] *= 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                          static_cast<double>(n - 1)));
    }

    auto coeffs = fft_real(x);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double bin_hz = 1.0 / (static_cast<double>(n) * trace.sample_interval);

    Spectrum spec;
    spec.dc_amplitude = std::abs(coeffs[0]) * scale;
    const std::size_t last = n / 2;  // Nyquist bin for even n
    spec.frequencies.reserve(last);
    spec.amplitudes.reserve(last);
    for (std::size_t k = 1; k <= last; ++k) {
        spec.frequencies.push_back(units::hz_to_khz(static_cast<double>(k) * bin_hz));
        spec.amplitudes.push_back(std::abs(coeffs[k]) * scale);
    }
    return spec;
}

double peak_frequency(const Spectrum& spectrum, double min_khz) {
    if (spectrum.amplitudes.empty() || spectrum.amplitudes.size() != spectrum.frequencies.size())
        throw ValidationError("spectrum is empty or inconsistent");
    bool found = false;
    std::size_t best = 0;
    for (std::size_t k = 0; k < spectrum.amplitudes.size(); ++k) {
        if (spectrum.frequencies[k] < min_khz) continue;
        if (!found || spectrum.amplitudes[k] > spectrum.amplitudes[best]) {
            best = k;
            found = true;
        }
    }
    if (!found) throw ValidationError("no spectrum bin at or above the frequency cutoff");
    return spectrum.frequencies[best];
}

double peak_frequency(const SensorTrace& trace, double min_khz, bool hann_window) {
    return peak_frequency(amplitude_spectrum(trace, hann_window), min_khz);
}

double cross_correlation_delay(const SensorTrace& a, const SensorTrace& b) {
    a.validate();
    b.validate();
    if (a.samples.size() != b.samples.size())
        throw ValidationError("cross-correlation requires equal trace lengths");
    if (a.sample_interval != b.sample_interval)
        throw ValidationError("cross-correlation requires equal sample intervals");
    if (energy(a.samples) == 0.0 || energy(b.samples) == 0.0)
        throw DegenerateSignalError("cross-correlation input has zero energy");

    const std::size_t n = a.samples.size();
    const std::size_t m = next_pow2(2 * n - 1);

    std::vector<double> pa(m, 0.0), pb(m, 0.0);
    std::copy(a.samples.begin(), a.samples.end(), pa.begin());
    std::copy(b.samples.begin(), b.samples.end(), pb.begin());

    auto fa = fft_real(pa);
    auto fb = fft_real(pb);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] = std::conj(fa[k]) * fb[k];
    auto corr = ifft_real(fa, m);  // corr[(lag mod m)] = sum_i a[i] * b[i + lag]

    // Scan lags ascending from -(n-1) so ties resolve to the smallest lag.
    long best_lag = 0;
    double best_val = 0.0;
    bool first = true;
    const long max_lag = static_cast<long>(n) - 1;
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
        std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag)
                                   : m - static_cast<std::size_t>(-lag);
        double v = corr[idx];
        if (first || v > best_val) {
            best_val = v;
            best_lag = lag;
            first = false;
        }
    }

    if (best_lag < 0)
        throw CausalityError("cross-correlation peaked at negative lag " +
                             std::to_string(best_lag) + " (received leads input)");
    return static_cast<double>(best_lag) * a.sample_interval;
}

namespace {

// Same bounds as MaterialProps; enforced here too because these take raw
// doubles and the approximation is meaningless outside them.
void check_viktorov_inputs(double velocity, double poisson_ratio) {
    if (!(poisson_ratio > 0.0) || !(poisson_ratio < 0.5))
        throw ValidationError("poisson_ratio must be in (0, 0.5)");
    if (!(velocity > 0.0)) throw ValidationError("wave velocity must be > 0");
}

}  // namespace

double shear_from_rayleigh(double v_r, double poisson_ratio, ViktorovConstants vk) {
    check_viktorov_inputs(v_r, poisson_ratio);
    return v_r * (1.0 + poisson_ratio) / (vk.a + vk.b * poisson_ratio);
}

double rayleigh_from_shear(double v_s, double poisson_ratio, ViktorovConstants vk) {
    check_viktorov_inputs(v_s, poisson_ratio);
    return v_s * (vk.a + vk.b * poisson_ratio) / (1.0 + poisson_ratio);
}

double modulus_pa_from_shear(double v_s, const MaterialProps& mat) {
    return 2.0 * mat.density * v_s * v_s * (1.0 + mat.poisson_ratio);
}

double modulus_ksi_from_delay(double delay_s, double spacing_m, const MaterialProps& mat,
                              ViktorovConstants vk) {
    if (!(delay_s > 0.0))
        throw DegenerateSignalError("zero inter-sensor delay, velocity undefined");
    if (!(spacing_m > 0.0)) throw ValidationError("sensor spacing must be > 0");
    const double v_r = spacing_m / delay_s;
    const double v_s = shear_from_rayleigh(v_r, mat.poisson_ratio, vk);
    return units::pascal_to_ksi(modulus_pa_from_shear(v_s, mat));
}

double elasticity_modulus(const UswRecord& rec, const MaterialProps& mat, ViktorovConstants vk) {
    rec.validate();
    mat.validate();
    const double delay = cross_correlation_delay(rec.trace_in, rec.trace_out);
    return modulus_ksi_from_delay(delay, rec.sensor_spacing, mat, vk);
}

FeatureExtraction extract_features(const SurveyBundle& bundle) {
    bundle.validate();
    FeatureExtraction out;
    for (std::size_t i = 0; i < bundle.ie_records.size(); ++i) {
        const auto& rec = bundle.ie_records[i];
        try {
            double khz = peak_frequency(rec.trace);
            out.ie_points.push_back({rec.x, rec.y, khz, Modality::IE});
        } catch (const Error& e) {
            out.skipped.push_back({Modality::IE, i, rec.x, rec.y, e.what()});
        }
    }
    for (std::size_t i = 0; i < bundle.usw_records.size(); ++i) {
        const auto& rec = bundle.usw_records[i];
        try {
            double ksi = elasticity_modulus(rec, bundle.material);
            out.usw_points.push_back({rec.x, rec.y, ksi, Modality::USW});
        } catch (const Error& e) {
            out.skipped.push_back({Modality::USW, i, rec.x, rec.y, e.what()});
        }
    }
    return out;
}

}  // namespace deckfuse
