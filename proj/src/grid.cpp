#include "deckfuse/grid.hpp"

#include <cmath>

#include "deckfuse/errors.hpp"
#include "deckfuse/text.hpp"

namespace deckfuse {

std::optional<std::pair<double, double>> GridField::value_range() const {
    std::optional<std::pair<double, double>> range;
    for (const auto& v : values) {
        if (!v) continue;
        if (!range) {
            range = {*v, *v};
        } else {
            range->first = std::min(range->first, *v);
            range->second = std::max(range->second, *v);
        }
    }
    return range;
}

GridField interpolate_grid(const std::vector<FeaturePoint>& points, const DeckExtent& extent,
                           double cell) {
    if (!(cell > 0.0)) {
        throw UsageError("grid cell size must be positive, got " + text::format_double(cell));
    }
    if (points.empty()) throw UsageError("interpolation needs at least one point");

    GridField field;
    field.extent = extent;
    field.cell = cell;
    field.nx = std::max<std::size_t>(1, std::size_t(std::ceil(extent.width() / cell - 1e-9)));
    field.ny = std::max<std::size_t>(1, std::size_t(std::ceil(extent.height() / cell - 1e-9)));
    field.values.assign(field.nx * field.ny, std::nullopt);

    const double radius = 3.0 * cell;
    const double radius2 = radius * radius;
    for (std::size_t iy = 0; iy < field.ny; ++iy) {
        for (std::size_t ix = 0; ix < field.nx; ++ix) {
            const double cx = field.center_x(ix);
            const double cy = field.center_y(iy);
            double weight_sum = 0.0;
            double value_sum = 0.0;
            std::optional<double> exact;
            for (const FeaturePoint& p : points) {
                const double dx = p.x - cx, dy = p.y - cy;
                const double d2 = dx * dx + dy * dy;
                if (d2 < 1e-24) {  // sample sits on the cell center
                    exact = p.value;
                    break;
                }
                if (d2 > radius2) continue;
                const double w = 1.0 / d2;
                weight_sum += w;
                value_sum += w * p.value;
            }
            if (exact) {
                field.values[iy * field.nx + ix] = *exact;
            } else if (weight_sum > 0.0) {
                field.values[iy * field.nx + ix] = value_sum / weight_sum;
            }
        }
    }
    return field;
}

}  // namespace deckfuse
