#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "deckfuse/types.hpp"

namespace deckfuse {

// One-sided amplitude spectrum over (0, Nyquist]. Magnitudes carry the
// unitary 1/sqrt(N) normalization, so the squared amplitudes of all N bins
// (DC and mirrors included) sum to N times the trace mean square.
struct Spectrum {
    std::vector<double> frequencies;  // kHz, strictly increasing
    std::vector<double> amplitudes;   // same length, >= 0
    double dc_amplitude = 0.0;        // bin 0, excluded from the peak search
};

/// FFT the trace and keep bins 1..floor(N/2). Bin width is 1/(N*dt).
/// Requires at least 8 samples. Optional Hann window before the transform.
Spectrum amplitude_spectrum(const SensorTrace& trace, bool hann_window = false);

/// Frequency (kHz) of the maximum-amplitude bin; ties go to the lower
/// frequency. min_khz restricts the search to bins at or above it
/// (default: every retained bin participates).
double peak_frequency(const Spectrum& spectrum, double min_khz = 0.0);
double peak_frequency(const SensorTrace& trace, double min_khz = 0.0,
                      bool hann_window = false);

/// Delay of b relative to a (seconds) at the cross-correlation argmax,
/// computed over the full lag range via FFT. A best lag below zero means
/// the received signal led the input and raises CausalityError; a trace
/// with zero energy raises DegenerateSignalError.
double cross_correlation_delay(const SensorTrace& a, const SensorTrace& b);

// Rayleigh-to-shear conversion uses the Viktorov approximation
// V_R / V_S = (a + b*nu) / (1 + nu).
struct ViktorovConstants {
    double a = 0.87;
    double b = 1.12;
};

double shear_from_rayleigh(double v_r, double poisson_ratio,
                           ViktorovConstants vk = {});
double rayleigh_from_shear(double v_s, double poisson_ratio,
                           ViktorovConstants vk = {});

/// Dynamic modulus E = 2 * rho * V_S^2 * (1 + nu), in pascal.
double modulus_pa_from_shear(double v_s, const MaterialProps& mat);

/// Modulus (ksi) from a measured inter-sensor delay: V_R = spacing / delay.
double modulus_ksi_from_delay(double delay_s, double spacing_m, const MaterialProps& mat,
                              ViktorovConstants vk = {});

/// Full USW feature: cross-correlate the sensor pair then apply the
/// velocity/modulus chain.
double elasticity_modulus(const UswRecord& rec, const MaterialProps& mat,
                          ViktorovConstants vk = {});

struct SkipEntry {
    Modality modality = Modality::IE;
    std::size_t index = 0;  // position within the modality's record list
    double x = 0.0;
    double y = 0.0;
    std::string reason;
};

struct FeatureExtraction {
    std::vector<FeaturePoint> ie_points;
    std::vector<FeaturePoint> usw_points;
    std::vector<SkipEntry> skipped;
};

/// One feature point per record, coordinates copied through. Records whose
/// trace processing fails are collected in the skip report, never dropped
/// silently and never fatal.
FeatureExtraction extract_features(const SurveyBundle& bundle);

}  // namespace deckfuse
