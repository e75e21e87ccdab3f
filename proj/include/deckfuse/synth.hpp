#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "deckfuse/types.hpp"

namespace deckfuse {

// Desk-scale synthetic survey: a measurement grid over the deck with planted
// defect rectangles. IE traces inside a defect resonate in the defective
// band (below the healthy band); USW pairs inside a defect carry an inflated
// inter-sensor delay so the derived modulus lands in the defective band.
struct SyntheticSpec {
    std::string bridge_id = "SYNTH-0001";
    DeckExtent deck{0.0, 40.0, 0.0, 12.0};
    double grid_pitch = 0.5;  // feet between measurement points
    std::vector<DataBox> defects{
        {4.0, 8.0, 2.0, 5.0},
        {14.0, 18.0, 6.0, 9.0},
        {24.0, 28.0, 1.0, 4.0},
        {32.0, 37.0, 8.0, 11.0},
    };
    double noise_level = 0.02;  // gaussian noise sigma relative to unit signal
    MaterialProps material{0.2, 2400.0};
    double sensor_spacing = 0.3;  // meters

    std::size_t ie_trace_len = 512;
    double ie_dt = 1e-5;  // seconds
    std::size_t usw_trace_len = 512;
    double usw_dt = 2e-6;  // seconds

    // Feature bands, chosen so a K=3 clustering threshold lands between them.
    double ie_defect_khz_min = 2.0;
    double ie_defect_khz_max = 4.0;
    double ie_healthy_khz_min = 10.0;
    double ie_healthy_khz_max = 12.0;
    double usw_defect_ksi_min = 1300.0;
    double usw_defect_ksi_max = 1800.0;
    double usw_healthy_ksi_min = 3800.0;
    double usw_healthy_ksi_max = 4600.0;
    double usw_healthy_floor_ksi = 3000.0;

    void validate() const;
};

struct SyntheticResult {
    SurveyBundle bundle;
    std::vector<DataBox> ground_truth;
};

/// Pure function of (spec, seed): identical arguments produce an identical
/// bundle, bit for bit.
SyntheticResult generate_synthetic_bundle(const SyntheticSpec& spec, std::uint64_t seed);

// Deterministic random source used by the generator. Derives doubles from
// raw mt19937_64 output so the stream does not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();  // [0, 1)
    double uniform(double lo, double hi);
    double normal();  // standard normal via Box-Muller

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace deckfuse
