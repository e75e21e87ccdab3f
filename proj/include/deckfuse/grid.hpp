#pragma once

#include <optional>
#include <vector>

#include "deckfuse/types.hpp"

namespace deckfuse {

// Regular cell grid over a deck extent; cell centers at
// min + (i + 0.5) * cell. Cells with no sample in the search radius stay
// empty rather than extrapolating.
struct GridField {
    DeckExtent extent;
    double cell = 0.5;  // feet
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<std::optional<double>> values;  // row-major, iy * nx + ix

    const std::optional<double>& at(std::size_t ix, std::size_t iy) const {
        return values[iy * nx + ix];
    }
    double center_x(std::size_t ix) const { return extent.x_min + (double(ix) + 0.5) * cell; }
    double center_y(std::size_t iy) const { return extent.y_min + (double(iy) + 0.5) * cell; }

    // Range over non-empty cells; nullopt when every cell is empty.
    std::optional<std::pair<double, double>> value_range() const;
};

/// Inverse-distance-weighted interpolation (power 2, search radius 3*cell).
/// A sample within 1e-12 of a cell center short-circuits to its exact value.
GridField interpolate_grid(const std::vector<FeaturePoint>& points, const DeckExtent& extent,
                           double cell);

}  // namespace deckfuse
