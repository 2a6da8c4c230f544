#pragma once

// Marching-squares isoline extraction on a node-based grid.
//
// Crossing points live on cell edges and are keyed by edge id, so segments
// from neighbouring cells are chained through exact key matches rather than
// floating-point comparison.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "geomews/grid.hpp"
#include "geomews/polyline.hpp"

namespace geomews {

namespace detail {

struct ContourSegment {
    std::uint64_t a;
    std::uint64_t b;
};

struct ContourSoup {
    std::unordered_map<std::uint64_t, Point2> points;  // edge id -> crossing
    std::vector<ContourSegment> segments;
};

// Edge ids: horizontal edge (i,j)-(i+1,j) -> 2*(i + nx*j); vertical (i,j)-(i,j+1) -> 2*(i + nx*j)+1.
inline ContourSoup march(const ScalarField<2>& f, double level) {
    const auto& g = f.grid();
    const std::size_t nx = g.n(0);
    const std::size_t ny = g.n(1);
    ContourSoup soup;
    const auto val = [&](std::size_t i, std::size_t j) { return f[i + nx * j]; };
    const auto above = [&](double v) { return v >= level; };
    const auto crossing = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) -> std::uint64_t {
        const bool vertical = i0 == i1;
        const std::uint64_t id = 2 * static_cast<std::uint64_t>(i0 + nx * j0) + (vertical ? 1 : 0);
        if (!soup.points.count(id)) {
            const double v0 = val(i0, j0);
            const double v1 = val(i1, j1);
            const double t = (level - v0) / (v1 - v0);
            const double x0 = g.coord(0, i0), y0 = g.coord(1, j0);
            const double x1 = g.coord(0, i1), y1 = g.coord(1, j1);
            soup.points.emplace(id, Point2{x0 + t * (x1 - x0), y0 + t * (y1 - y0)});
        }
        return id;
    };
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            // Corners counter-clockwise: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
            const double v[4] = {val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)};
            const bool s[4] = {above(v[0]), above(v[1]), above(v[2]), above(v[3])};
            // Edges: e0 bottom (0-1), e1 right (1-2), e2 top (3-2), e3 left (0-3)
            std::uint64_t e[4] = {0, 0, 0, 0};
            bool has[4] = {s[0] != s[1], s[1] != s[2], s[2] != s[3], s[3] != s[0]};
            if (has[0]) e[0] = crossing(i, j, i + 1, j);
            if (has[1]) e[1] = crossing(i + 1, j, i + 1, j + 1);
            if (has[2]) e[2] = crossing(i, j + 1, i + 1, j + 1);
            if (has[3]) e[3] = crossing(i, j, i, j + 1);
            const int n = has[0] + has[1] + has[2] + has[3];
            if (n == 2) {
                std::uint64_t ends[2];
                int c = 0;
                for (int k = 0; k < 4; ++k)
                    if (has[k]) ends[c++] = e[k];
                soup.segments.push_back({ends[0], ends[1]});
            } else if (n == 4) {
                // Saddle cell: the cell-centre value decides which corners connect.
                const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                if (above(centre) == s[0]) {
                    // corner 0 joined to the centre: cut off corners 1 and 3
                    soup.segments.push_back({e[0], e[1]});
                    soup.segments.push_back({e[2], e[3]});
                } else {
                    soup.segments.push_back({e[0], e[3]});
                    soup.segments.push_back({e[1], e[2]});
                }
            }
        }
    }
    return soup;
}

}  // namespace detail

/// All connected isolines of `level`, each as an ordered polyline.
inline std::vector<Polyline> contour_lines(const ScalarField<2>& f, double level) {
    const auto soup = detail::march(f, level);
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < soup.segments.size(); ++s) {
        incident[soup.segments[s].a].push_back(s);
        incident[soup.segments[s].b].push_back(s);
    }
    std::vector<char> used(soup.segments.size(), 0);
    std::vector<Polyline> lines;
    const auto walk = [&](std::uint64_t start) {
        std::vector<std::uint64_t> ids{start};
        std::uint64_t cur = start;
        while (true) {
            std::size_t next_seg = soup.segments.size();
            for (std::size_t s : incident[cur]) {
                if (!used[s]) {
                    next_seg = s;
                    break;
                }
            }
            if (next_seg == soup.segments.size()) break;
            used[next_seg] = 1;
            cur = soup.segments[next_seg].a == cur ? soup.segments[next_seg].b : soup.segments[next_seg].a;
            ids.push_back(cur);
        }
        Polyline pl;
        for (auto id : ids) pl.push_back(soup.points.at(id));
        return pl;
    };
    // Open chains start at points with a single incident segment (deterministic order).
    std::vector<std::uint64_t> ends;
    for (const auto& [id, segs] : incident)
        if (segs.size() == 1) ends.push_back(id);
    std::sort(ends.begin(), ends.end());
    for (auto id : ends) {
        if (!used[incident[id][0]]) lines.push_back(walk(id));
    }
    for (std::size_t s = 0; s < soup.segments.size(); ++s) {
        if (!used[s]) lines.push_back(walk(soup.segments[s].a));
    }
    return lines;
}

struct SeparatrixOptions {
    double level = 0.5;
    /// Vertices closer than this fraction of the domain extent to the boundary are dropped.
    double edge_fraction = 0.02;
};

/// Isoline of the committor at `level` after truncation to [0, 1]: vertices
/// near the outer boundary are removed and the longest remaining branch is
/// returned, oriented with increasing biomass coordinate at its start.
inline Polyline extract_separatrix(const ScalarField<2>& q_raw, SeparatrixOptions opts = {}) {
    const ScalarField<2> q = q_raw.clamped(0.0, 1.0);
    if (!(opts.level > q.min() && opts.level < q.max())) throw NumericalError("level not attained");
    const auto& box = q.grid().bounds();
    const double dx = opts.edge_fraction * box.extent(0);
    const double dy = opts.edge_fraction * box.extent(1);
    const auto keep = [&](const Point2& p) {
        return p[0] - box.lo[0] >= dx && box.hi[0] - p[0] >= dx && p[1] - box.lo[1] >= dy && box.hi[1] - p[1] >= dy;
    };
    const auto lines = contour_lines(q, opts.level);
    if (lines.empty()) throw NumericalError("level not attained");
    Polyline best;
    for (const auto& line : lines) {
        Polyline run;
        const auto flush = [&] {
            if (run.size() >= 2 && run.length() > best.length()) best = run;
            run = Polyline();
        };
        for (const auto& p : line.vertices()) {
            if (keep(p)) {
                run.push_back(p);
            } else {
                flush();
            }
        }
        flush();
    }
    if (best.degenerate()) throw NumericalError("separatrix: all branches removed by the boundary filter");
    const auto& v = best.vertices();
    if (v.front()[1] > v.back()[1] || (v.front()[1] == v.back()[1] && v.front()[0] > v.back()[0])) best = best.reversed();
    return best;
}

}  // namespace geomews
