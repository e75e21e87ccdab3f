#include "deckfuse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

// Boolean ops must not quantize coordinates: the legacy rescale policy
// (removed upstream in 1.77) perturbs exact inputs by ~1e-8, which breaks
// the 1e-9 area contracts. Opting out matches modern Boost defaults.
#define BOOST_GEOMETRY_NO_ROBUSTNESS
#include <boost/geometry.hpp>
#include <boost/geometry/algorithms/point_on_surface.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "deckfuse/errors.hpp"
#include "deckfuse/text.hpp"

namespace deckfuse {

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double circumradius_of(Point2 a, Point2 b, Point2 c) {
    const double area2 = std::abs(cross(a, b, c));  // twice the area
    if (area2 == 0.0) return std::numeric_limits<double>::infinity();
    return dist(a, b) * dist(b, c) * dist(c, a) / (2.0 * area2);
}

// p strictly inside the circumcircle of CCW triangle (a, b, c). Evaluated
// in extended precision; the exact-zero boundary counts as outside, which
// keeps cocircular grids deterministic.
bool in_circumcircle(Point2 a, Point2 b, Point2 c, Point2 p) {
    const long double ax = (long double)a.x - p.x, ay = (long double)a.y - p.y;
    const long double bx = (long double)b.x - p.x, by = (long double)b.y - p.y;
    const long double cx = (long double)c.x - p.x, cy = (long double)c.y - p.y;
    const long double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                            (bx * bx + by * by) * (ax * cy - cx * ay) +
                            (cx * cx + cy * cy) * (ax * by - bx * ay);
    return det > 0.0L;
}

struct IndexTriangle {
    std::size_t a, b, c;
};

}  // namespace

double signed_ring_area(const Ring& ring) {
    double twice = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = ring[i];
        const Point2& q = ring[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

double Polygon::area() const {
    double a = std::abs(signed_ring_area(exterior));
    for (const Ring& h : holes) a -= std::abs(signed_ring_area(h));
    return a;
}

double RegionSet::area() const {
    double total = 0.0;
    for (const Polygon& p : polygons) total += p.area();
    return total;
}

namespace {

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool near_ring_boundary(const Ring& ring, Point2 p, double tol) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, ring[i], ring[(i + 1) % n]) <= tol) return true;
    }
    return false;
}

// Even-odd ray cast (positive x direction), boundary handled elsewhere.
bool ring_contains(const Ring& ring, Point2 p) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = ring[i];
        const Point2& b = ring[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

bool point_in_region(const RegionSet& region, Point2 p, double tol) {
    for (const Polygon& poly : region.polygons) {
        if (near_ring_boundary(poly.exterior, p, tol)) return true;
        for (const Ring& h : poly.holes) {
            if (near_ring_boundary(h, p, tol)) return true;
        }
        if (!ring_contains(poly.exterior, p)) continue;
        bool in_hole = false;
        for (const Ring& h : poly.holes) {
            if (ring_contains(h, p)) {
                in_hole = true;
                break;
            }
        }
        if (!in_hole) return true;
    }
    return false;
}

Triangulation delaunay_triangulation(std::vector<Point2> points) {
    std::sort(points.begin(), points.end(), [](Point2 a, Point2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());

    Triangulation out;
    out.points = points;
    if (points.size() < 3) return out;

    // The enclosing super-triangle's vertices are symbolic points at
    // infinity in three fixed directions (CCW, deliberately irrational so no
    // finite segment is parallel to them). Predicates involving them are
    // evaluated as limits; no finite circumcircle ever contains one, so the
    // finite triangles tile the convex hull exactly, slivers included.
    const std::size_t s0 = points.size();
    const double base = 1.2345678901234567;
    const double third = 2.0 * std::numbers::pi_v<double> / 3.0;
    const Point2 super_dir[3] = {{std::cos(base), std::sin(base)},
                                 {std::cos(base + third), std::sin(base + third)},
                                 {std::cos(base + 2.0 * third), std::sin(base + 2.0 * third)}};
    auto is_super = [s0](std::size_t i) { return i >= s0; };
    auto dir_of = [&](std::size_t i) -> const Point2& { return super_dir[i - s0]; };

    // Limiting orientation via homogeneous coordinates (supers carry
    // weight 0); three supers reduce to the orientation of their directions.
    auto orient = [&](std::size_t i, std::size_t j, std::size_t k) {
        if (is_super(i) && is_super(j) && is_super(k))
            return cross(dir_of(i), dir_of(j), dir_of(k));
        auto hx = [&](std::size_t n) { return is_super(n) ? dir_of(n).x : points[n].x; };
        auto hy = [&](std::size_t n) { return is_super(n) ? dir_of(n).y : points[n].y; };
        auto hw = [&](std::size_t n) { return is_super(n) ? 0.0 : 1.0; };
        return hx(i) * (hy(j) * hw(k) - hy(k) * hw(j)) -
               hy(i) * (hx(j) * hw(k) - hx(k) * hw(j)) +
               hw(i) * (hx(j) * hy(k) - hx(k) * hy(j));
    };

    // p strictly inside the limiting circumcircle of CCW triangle t. With
    // one super vertex the disc degenerates to the open half-plane left of
    // the finite edge; with two, to the open half-plane bounded by the line
    // through the finite vertex parallel to the difference of the two
    // directions; the initial all-super triangle contains every point.
    auto in_circle = [&](const IndexTriangle& t, Point2 p) {
        std::size_t a = t.a, b = t.b, c = t.c;
        const int ns = int(is_super(a)) + int(is_super(b)) + int(is_super(c));
        if (ns == 0) return in_circumcircle(points[a], points[b], points[c], p);
        if (ns == 3) return true;
        auto rot = [&] {  // cyclic, so orientation is preserved
            const std::size_t tmp = a;
            a = b;
            b = c;
            c = tmp;
        };
        if (ns == 1) {
            while (!is_super(c)) rot();
            return cross(p, points[a], points[b]) > 0.0;
        }
        while (is_super(a)) rot();
        const Point2& vb = dir_of(b);
        const Point2& vc = dir_of(c);
        return (points[a].x - p.x) * (vb.y - vc.y) - (points[a].y - p.y) * (vb.x - vc.x) >
               0.0;
    };

    std::vector<IndexTriangle> tris{{s0, s0 + 1, s0 + 2}};
    std::vector<IndexTriangle> bad;
    // Cavity boundary edges keyed by undirected pair, value = directed form.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> edges;

    for (std::size_t pi = 0; pi < s0; ++pi) {
        const Point2 p = points[pi];
        bad.clear();
        edges.clear();
        std::size_t keep = 0;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (in_circle(tris[t], p)) {
                bad.push_back(tris[t]);
            } else {
                tris[keep++] = tris[t];
            }
        }
        tris.resize(keep);
        for (const IndexTriangle& tr : bad) {
            const std::size_t e[3][2] = {{tr.a, tr.b}, {tr.b, tr.c}, {tr.c, tr.a}};
            for (const auto& ed : e) {
                auto key = std::minmax(ed[0], ed[1]);
                auto it = edges.find(key);
                if (it == edges.end()) {
                    edges.emplace(key, std::make_pair(ed[0], ed[1]));
                } else {
                    edges.erase(it);  // interior to the cavity
                }
            }
        }
        for (const auto& [key, dir] : edges) {
            IndexTriangle nt{dir.first, dir.second, pi};
            if (orient(nt.a, nt.b, nt.c) < 0.0) std::swap(nt.b, nt.c);
            tris.push_back(nt);
        }
    }

    for (const IndexTriangle& tr : tris) {
        if (tr.a >= s0 || tr.b >= s0 || tr.c >= s0) continue;
        Triangle t{tr.a, tr.b, tr.c,
                   circumradius_of(points[tr.a], points[tr.b], points[tr.c])};
        out.triangles.push_back(t);
    }
    std::sort(out.triangles.begin(), out.triangles.end(), [](const Triangle& l, const Triangle& r) {
        return std::tie(l.a, l.b, l.c) < std::tie(r.a, r.b, r.c);
    });
    return out;
}

namespace {

// Stitch the boundary of a triangle union into rings. Directed boundary
// edges carry the interior on their left; at a shared (pinch) vertex the
// continuation is the first outgoing edge clockwise from the reversed
// incoming edge, which keeps distinct loops from crossing.
std::vector<Ring> stitch_boundary(const std::vector<Point2>& pts,
                                  const std::vector<Triangle>& kept) {
    std::map<std::pair<std::size_t, std::size_t>, bool> directed;
    for (const Triangle& t : kept) {
        const std::size_t e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
        for (const auto& ed : e) directed[{ed[0], ed[1]}] = true;
    }
    // Boundary edge: its reverse is absent.
    std::map<std::size_t, std::vector<std::size_t>> outgoing;
    std::map<std::pair<std::size_t, std::size_t>, bool> unused;
    for (const auto& [e, _] : directed) {
        if (!directed.count({e.second, e.first})) {
            outgoing[e.first].push_back(e.second);
            unused[e] = true;
        }
    }

    auto angle_of = [&](std::size_t from, std::size_t to) {
        return std::atan2(pts[to].y - pts[from].y, pts[to].x - pts[from].x);
    };

    std::vector<Ring> rings;
    for (auto& [start_edge, _] : unused) {
        if (!unused[start_edge]) continue;
        std::vector<std::size_t> loop;
        std::pair<std::size_t, std::size_t> e = start_edge;
        while (unused[e]) {
            unused[e] = false;
            loop.push_back(e.first);
            const std::size_t v = e.second;
            const auto& cands = outgoing.at(v);
            std::size_t best = cands.front();
            if (cands.size() > 1) {
                constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;
                const double rev = angle_of(v, e.first);
                double best_turn = std::numeric_limits<double>::infinity();
                for (std::size_t w : cands) {
                    if (!unused[{v, w}]) continue;
                    double turn = std::fmod(rev - angle_of(v, w), kTwoPi);
                    if (turn < 0.0) turn += kTwoPi;
                    if (turn == 0.0) turn = kTwoPi;
                    if (turn < best_turn) {
                        best_turn = turn;
                        best = w;
                    }
                }
            }
            e = {v, best};
        }
        if (loop.size() >= 3) {
            Ring ring;
            ring.reserve(loop.size());
            for (std::size_t idx : loop) ring.push_back(pts[idx]);
            rings.push_back(std::move(ring));
        }
    }
    return rings;
}

namespace bg = boost::geometry;
using BoostPoint = bg::model::d2::point_xy<double>;
using BoostPolygon = bg::model::polygon<BoostPoint, false, true>;  // CCW, closed
using BoostMulti = bg::model::multi_polygon<BoostPolygon>;

BoostMulti to_boost(const RegionSet& region) {
    BoostMulti multi;
    for (const Polygon& poly : region.polygons) {
        BoostPolygon bp;
        for (const Point2& p : poly.exterior) bp.outer().push_back({p.x, p.y});
        for (const Ring& h : poly.holes) {
            bp.inners().emplace_back();
            for (const Point2& p : h) bp.inners().back().push_back({p.x, p.y});
        }
        bg::correct(bp);
        multi.push_back(std::move(bp));
    }
    return multi;
}

Ring strip_collinear(Ring ring) {
    if (ring.size() < 3) return ring;
    Ring out;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& prev = ring[(i + n - 1) % n];
        const Point2& cur = ring[i];
        const Point2& next = ring[(i + 1) % n];
        const double c = cross(prev, cur, next);
        const double scale = dist(prev, cur) * dist(cur, next);
        if (cur == prev) continue;
        if (scale > 0.0 && std::abs(c) <= 1e-12 * scale) continue;
        out.push_back(cur);
    }
    return out;
}

RegionSet from_boost(const BoostMulti& multi, double alpha) {
    RegionSet out;
    out.alpha = alpha;
    for (const BoostPolygon& bp : multi) {
        Polygon poly;
        for (const BoostPoint& p : bp.outer()) poly.exterior.push_back({bg::get<0>(p), bg::get<1>(p)});
        if (!poly.exterior.empty() && poly.exterior.front() == poly.exterior.back()) {
            poly.exterior.pop_back();
        }
        poly.exterior = strip_collinear(std::move(poly.exterior));
        if (poly.exterior.size() < 3 || std::abs(signed_ring_area(poly.exterior)) < 1e-12) {
            continue;
        }
        if (signed_ring_area(poly.exterior) < 0.0) {
            std::reverse(poly.exterior.begin(), poly.exterior.end());
        }
        for (const auto& inner : bp.inners()) {
            Ring h;
            for (const BoostPoint& p : inner) h.push_back({bg::get<0>(p), bg::get<1>(p)});
            if (!h.empty() && h.front() == h.back()) h.pop_back();
            h = strip_collinear(std::move(h));
            if (h.size() < 3 || std::abs(signed_ring_area(h)) < 1e-12) continue;
            if (signed_ring_area(h) > 0.0) std::reverse(h.begin(), h.end());
            poly.holes.push_back(std::move(h));
        }
        out.polygons.push_back(std::move(poly));
    }
    return out;
}

}  // namespace

RegionSet alpha_shape(const std::vector<Point2>& points, double alpha) {
    if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
    Triangulation tri = delaunay_triangulation(points);
    if (tri.points.size() < 3) {
        throw DegenerateGeometryError("alpha shape needs at least 3 distinct points, got " +
                                      std::to_string(tri.points.size()));
    }
    if (tri.triangles.empty()) {
        throw DegenerateGeometryError("alpha shape input points are collinear");
    }

    // Exactly collinear triples can appear as zero-area triangles with an
    // infinite circumradius; they contribute nothing to the union and are
    // always dropped, so alpha = +infinity cleanly selects the convex hull.
    std::vector<Triangle> kept;
    for (const Triangle& t : tri.triangles) {
        if (std::isfinite(t.circumradius) && t.circumradius <= alpha) kept.push_back(t);
    }
    RegionSet out;
    out.alpha = alpha;
    if (kept.empty()) return out;

    std::vector<Ring> rings = stitch_boundary(tri.points, kept);

    // Exterior rings come out CCW, holes CW; nest holes under the smallest
    // containing exterior.
    std::vector<Polygon> exteriors;
    std::vector<Ring> holes;
    for (Ring& r : rings) {
        if (signed_ring_area(r) >= 0.0) {
            exteriors.push_back(Polygon{std::move(r), {}});
        } else {
            holes.push_back(std::move(r));
        }
    }
    std::sort(exteriors.begin(), exteriors.end(), [](const Polygon& a, const Polygon& b) {
        return std::abs(signed_ring_area(a.exterior)) < std::abs(signed_ring_area(b.exterior));
    });
    for (Ring& h : holes) {
        // Representative interior point of the hole: centroid of the ring's
        // first convex corner triangle falls inside for stitched boundaries.
        BoostPolygon hb;
        for (const Point2& p : h) hb.outer().push_back({p.x, p.y});
        bg::correct(hb);
        BoostPoint rep;
        bg::point_on_surface(hb, rep);
        const Point2 probe{bg::get<0>(rep), bg::get<1>(rep)};
        for (Polygon& ext : exteriors) {
            if (ring_contains(ext.exterior, probe)) {
                ext.holes.push_back(std::move(h));
                break;
            }
        }
    }
    out.polygons = std::move(exteriors);
    return out;
}

RegionSet intersect_regions(const RegionSet& a, const RegionSet& b) {
    if (a.empty() || b.empty()) {
        return RegionSet{{}, std::numeric_limits<double>::infinity()};
    }
    BoostMulti result;
    bg::intersection(to_boost(a), to_boost(b), result);
    return from_boost(result, std::numeric_limits<double>::infinity());
}

LaneLayout lane_layout(double y_min, double y_max, std::size_t lane_count) {
    if (lane_count == 0) throw UsageError("lane count must be at least 1");
    if (!(y_min < y_max)) {
        throw UsageError("lane layout requires y_min < y_max, got [" +
                         text::format_double(y_min) + ", " + text::format_double(y_max) + "]");
    }
    LaneLayout out{y_min, y_max, lane_count, {}};
    out.boundaries.reserve(lane_count + 1);
    for (std::size_t i = 0; i <= lane_count; ++i) {
        out.boundaries.push_back(y_min + static_cast<double>(i) * (y_max - y_min) /
                                             static_cast<double>(lane_count));
    }
    return out;
}

std::size_t lane_of(const LaneLayout& lanes, double y) {
    std::size_t lane = 0;
    for (std::size_t i = 0; i + 1 < lanes.boundaries.size(); ++i) {
        if (y > lanes.boundaries[i]) lane = i;
    }
    return lane;
}

FusedDefectSet fuse(const std::vector<FeaturePoint>& ie_defects,
                    const std::vector<FeaturePoint>& usw_defects, double alpha,
                    const LaneLayout& lanes) {
    FusedDefectSet out;
    out.lane_counts.assign(lanes.lane_count, 0);

    auto shape_of = [&](const std::vector<FeaturePoint>& pts, const char* label,
                        RegionSet& target) {
        if (pts.size() < 3) {
            out.diagnostic = std::string(label) + " has " + std::to_string(pts.size()) +
                             " defect points, need at least 3 for an alpha shape";
            return false;
        }
        std::vector<Point2> geom;
        geom.reserve(pts.size());
        for (const FeaturePoint& p : pts) geom.push_back({p.x, p.y});
        try {
            target = alpha_shape(geom, alpha);
        } catch (const DegenerateGeometryError& e) {
            out.diagnostic = std::string(label) + ": " + e.what();
            return false;
        }
        if (target.empty()) {
            out.diagnostic = std::string(label) +
                             " alpha shape is empty (alpha below every circumradius)";
            return false;
        }
        return true;
    };

    if (!shape_of(ie_defects, "IE", out.ie_shape)) return out;
    if (!shape_of(usw_defects, "USW", out.usw_shape)) return out;

    out.region = intersect_regions(out.ie_shape, out.usw_shape);
    out.region.alpha = alpha;
    if (out.region.empty()) {
        out.diagnostic = "modality alpha shapes do not overlap";
        return out;
    }

    for (const std::vector<FeaturePoint>* src : {&ie_defects, &usw_defects}) {
        for (const FeaturePoint& p : *src) {
            if (point_in_region(out.region, {p.x, p.y})) {
                out.points.push_back(p);
                out.lane_counts[lane_of(lanes, p.y)]++;
            }
        }
    }
    return out;
}

std::string region_to_wkt(const RegionSet& region) {
    std::string out;
    for (const Polygon& poly : region.polygons) {
        out += "POLYGON(";
        auto append_ring = [&](const Ring& r) {
            out += '(';
            for (const Point2& p : r) {
                out += text::format_double(p.x);
                out += ' ';
                out += text::format_double(p.y);
                out += ", ";
            }
            out += text::format_double(r.front().x);
            out += ' ';
            out += text::format_double(r.front().y);
            out += ')';
        };
        append_ring(poly.exterior);
        for (const Ring& h : poly.holes) {
            out += ", ";
            append_ring(h);
        }
        out += ")\n";
    }
    return out;
}

}  // namespace deckfuse
