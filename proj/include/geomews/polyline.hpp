#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "geomews/core.hpp"

namespace geomews {

using Point2 = State<2>;

/// Ordered vertex chain with cumulative arc length.
class Polyline {
public:
    Polyline() = default;

    explicit Polyline(std::vector<Point2> pts) {
        for (const auto& p : pts) push_back(p);
    }

    /// Appends a vertex; repeated vertices are dropped so arc length stays strictly increasing.
    void push_back(const Point2& p) {
        if (!vertices_.empty()) {
            const double d = std::hypot(p[0] - vertices_.back()[0], p[1] - vertices_.back()[1]);
            if (d <= 0.0) return;
            arc_.push_back(arc_.back() + d);
        } else {
            arc_.push_back(0.0);
        }
        vertices_.push_back(p);
    }

    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }
    const std::vector<Point2>& vertices() const { return vertices_; }
    const std::vector<double>& arc_length() const { return arc_; }
    const Point2& operator[](std::size_t i) const { return vertices_[i]; }
    double length() const { return arc_.empty() ? 0.0 : arc_.back(); }

    bool degenerate() const { return vertices_.size() < 2 || !(length() > 0.0); }

    Polyline reversed() const {
        return Polyline(std::vector<Point2>(vertices_.rbegin(), vertices_.rend()));
    }

    /// Inserts the midpoint of every segment (doubles vertex density).
    Polyline densified() const {
        Polyline out;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            if (i > 0) {
                out.push_back({0.5 * (vertices_[i - 1][0] + vertices_[i][0]), 0.5 * (vertices_[i - 1][1] + vertices_[i][1])});
            }
            out.push_back(vertices_[i]);
        }
        return out;
    }

private:
    std::vector<Point2> vertices_;
    std::vector<double> arc_;
};

/// Euclidean distance from p to the segment [a, b].
inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2, 0.0, 1.0);
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

inline double point_polyline_distance(const Point2& p, const Polyline& c) {
    if (c.size() == 1) return std::hypot(p[0] - c[0][0], p[1] - c[0][1]);
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) best = std::min(best, point_segment_distance(p, c[i], c[i + 1]));
    return best;
}

}  // namespace geomews
