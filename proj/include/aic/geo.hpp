#pragma once

#include <cmath>
#include <vector>

#include "aic/common.hpp"

namespace aic {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist2(Point a, Point b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double dist(Point a, Point b) { return std::sqrt(dist2(a, b)); }

struct BoundingBox {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    static BoundingBox of(const std::vector<Point>& pts) {
        BoundingBox bb;
        if (pts.empty()) return bb;
        bb.min_x = bb.max_x = pts[0].x;
        bb.min_y = bb.max_y = pts[0].y;
        for (const Point& p : pts) {
            bb.min_x = std::min(bb.min_x, p.x);
            bb.max_x = std::max(bb.max_x, p.x);
            bb.min_y = std::min(bb.min_y, p.y);
            bb.max_y = std::max(bb.max_y, p.y);
        }
        return bb;
    }

    void expand(const BoundingBox& o) {
        min_x = std::min(min_x, o.min_x);
        max_x = std::max(max_x, o.max_x);
        min_y = std::min(min_y, o.min_y);
        max_y = std::max(max_y, o.max_y);
    }
};

// Ray casting with boundary points counted as inside.
inline bool point_in_polygon(Point p, const std::vector<Point>& ring) {
    std::size_t n = ring.size();
    if (n < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        Point a = ring[j], b = ring[i];
        // on-segment check
        double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (std::abs(cross) < 1e-9 && p.x >= std::min(a.x, b.x) - 1e-9 &&
            p.x <= std::max(a.x, b.x) + 1e-9 && p.y >= std::min(a.y, b.y) - 1e-9 &&
            p.y <= std::max(a.y, b.y) + 1e-9)
            return true;
        if ((b.y > p.y) != (a.y > p.y)) {
            double xint = (a.x - b.x) * (p.y - b.y) / (a.y - b.y) + b.x;
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

inline bool polygon_is_simple(const std::vector<Point>& ring) {
    std::size_t n = ring.size();
    if (n < 3) return false;
    auto seg_intersect = [](Point p1, Point p2, Point p3, Point p4) {
        auto d = [](Point a, Point b, Point c) {
            return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        };
        double d1 = d(p3, p4, p1), d2 = d(p3, p4, p2);
        double d3 = d(p1, p2, p3), d4 = d(p1, p2, p4);
        return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
               ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent via wraparound
            if (seg_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

inline Point polygon_centroid(const std::vector<Point>& ring) {
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        double w = ring[j].x * ring[i].y - ring[i].x * ring[j].y;
        a2 += w;
        cx += (ring[j].x + ring[i].x) * w;
        cy += (ring[j].y + ring[i].y) * w;
    }
    if (std::abs(a2) < 1e-12) {
        Point m{0, 0};
        for (const Point& p : ring) {
            m.x += p.x;
            m.y += p.y;
        }
        m.x /= double(n);
        m.y /= double(n);
        return m;
    }
    return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

// Equirectangular projection about a reference point, for ingesting lon/lat
// sources into the planar-meter world every other computation assumes.
struct Equirectangular {
    double lon0, lat0;
    static constexpr double kEarthRadius = 6371000.0;

    Point project(double lon, double lat) const {
        double rad = 0.017453292519943295;
        return {kEarthRadius * (lon - lon0) * rad * std::cos(lat0 * rad),
                kEarthRadius * (lat - lat0) * rad};
    }
};

}  // namespace aic
