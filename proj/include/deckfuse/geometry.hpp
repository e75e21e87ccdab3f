#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "deckfuse/types.hpp"

namespace deckfuse {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

// Vertex loop without the closing duplicate. Counter-clockwise for
// exteriors, clockwise for holes.
using Ring = std::vector<Point2>;

struct Polygon {
    Ring exterior;
    std::vector<Ring> holes;

    double area() const;  // exterior minus holes
};

// Union-of-polygons region with the alpha parameter that produced it
// (infinity marks a convex hull / boolean result).
struct RegionSet {
    std::vector<Polygon> polygons;
    double alpha = 0.0;

    bool empty() const { return polygons.empty(); }
    double area() const;
};

double signed_ring_area(const Ring& ring);

/// Inclusive containment: points within `tol` of any boundary count as
/// inside, so fusion never drops boundary measurements.
bool point_in_region(const RegionSet& region, Point2 p, double tol = 1e-9);

struct Triangle {
    std::size_t a = 0, b = 0, c = 0;  // indices into the point set, CCW
    double circumradius = 0.0;
};

/// Delaunay triangulation (Bowyer–Watson). Input is deduplicated and
/// sorted by (x, y) before insertion, so the result is a pure function of
/// the point set; cocircular ties resolve by insertion order. Returns the
/// triangles over the deduplicated sorted points (also returned).
struct Triangulation {
    std::vector<Point2> points;
    std::vector<Triangle> triangles;
};

Triangulation delaunay_triangulation(std::vector<Point2> points);

/// Alpha shape: triangles with circumradius <= alpha are retained and their
/// union is returned as boundary polygons. As alpha grows past the largest
/// circumradius the result equals the convex hull. Fewer than 3 distinct
/// points or an all-collinear set raises DegenerateGeometryError; a filter
/// that keeps no triangle yields an empty RegionSet.
RegionSet alpha_shape(const std::vector<Point2>& points, double alpha);

/// Polygon boolean intersection. Inside(result) == inside(a) && inside(b)
/// up to a 1e-9 boundary tolerance; output rings are normalized (collinear
/// vertices removed, slivers below 1e-12 sq ft dropped).
RegionSet intersect_regions(const RegionSet& a, const RegionSet& b);

struct LaneLayout {
    double y_min = 0.0;
    double y_max = 0.0;
    std::size_t lane_count = 0;
    std::vector<double> boundaries;  // lane_count + 1 equally spaced values
};

LaneLayout lane_layout(double y_min, double y_max, std::size_t lane_count);

/// Lane index for a transverse coordinate; points on a boundary belong to
/// the lower lane, values outside the layout clamp to the nearest lane.
std::size_t lane_of(const LaneLayout& lanes, double y);

struct FusedDefectSet {
    RegionSet region;                       // the common area
    RegionSet ie_shape;                     // per-modality alpha shapes,
    RegionSet usw_shape;                    // kept for plotting
    std::vector<FeaturePoint> points;       // both modalities, inside region
    std::vector<std::size_t> lane_counts;   // per lane, sums to points.size()
    std::string diagnostic;                 // non-empty when the fusion is degenerate
};

/// Common defect area: intersect the two modality alpha shapes and keep
/// every defect point (both modalities) lying inside. Degenerate geometry
/// on either side produces an empty set with a diagnostic, never a throw.
FusedDefectSet fuse(const std::vector<FeaturePoint>& ie_defects,
                    const std::vector<FeaturePoint>& usw_defects, double alpha,
                    const LaneLayout& lanes);

/// One `POLYGON((x y, ...))` per line; holes as additional rings. Empty
/// region serializes to an empty string.
std::string region_to_wkt(const RegionSet& region);

}  // namespace deckfuse
