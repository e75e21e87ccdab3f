#pragma once

namespace deckfuse::units {

// Canonical units across the library: deck coordinates in feet, trace
// samples in volts with dt in seconds, frequency features in kHz,
// modulus features in ksi. Conversions live here and nowhere else.

inline constexpr double kPascalPerKsi = 6.894757e6;
inline constexpr double kMetersPerFoot = 0.3048;
inline constexpr double kHzPerKilohertz = 1000.0;

inline double pascal_to_ksi(double pa) { return pa / kPascalPerKsi; }
inline double ksi_to_pascal(double ksi) { return ksi * kPascalPerKsi; }
inline double hz_to_khz(double hz) { return hz / kHzPerKilohertz; }
inline double khz_to_hz(double khz) { return khz * kHzPerKilohertz; }
inline double feet_to_meters(double ft) { return ft * kMetersPerFoot; }
inline double meters_to_feet(double m) { return m / kMetersPerFoot; }

}  // namespace deckfuse::units
