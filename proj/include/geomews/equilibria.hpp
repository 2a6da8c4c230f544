#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "geomews/model.hpp"
#include "geomews/polyline.hpp"

namespace geomews {

enum class Stability { stable, saddle, unstable, degenerate };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::saddle: return "saddle";
        case Stability::unstable: return "unstable";
        case Stability::degenerate: return "degenerate";
    }
    return "?";
}

struct Equilibrium {
    Point2 state{};
    Stability stability = Stability::degenerate;
    std::array<std::complex<double>, 2> eigenvalues{};
};

struct EquilibriumSet {
    std::vector<Equilibrium> equilibria;  // sorted by increasing u, then T
    bool empty_warning = false;

    std::size_t count(Stability s) const {
        return static_cast<std::size_t>(std::count_if(equilibria.begin(), equilibria.end(),
                                                      [s](const Equilibrium& e) { return e.stability == s; }));
    }
    bool bistable() const { return count(Stability::stable) >= 2 && count(Stability::saddle) >= 1; }

    /// Background state E1: the stable equilibrium with the lowest biomass.
    std::optional<Equilibrium> background() const {
        for (const auto& e : equilibria)
            if (e.stability == Stability::stable) return e;
        return std::nullopt;
    }
    /// Bloom state E3: the stable equilibrium with the highest biomass.
    std::optional<Equilibrium> bloom() const {
        for (auto it = equilibria.rbegin(); it != equilibria.rend(); ++it)
            if (it->stability == Stability::stable) return *it;
        return std::nullopt;
    }
    std::optional<Equilibrium> saddle() const {
        for (const auto& e : equilibria)
            if (e.stability == Stability::saddle) return e;
        return std::nullopt;
    }
};

inline std::array<std::complex<double>, 2> eigenvalues2(const std::array<double, 4>& J) {
    const double tr = J[0] + J[3];
    const double det = J[0] * J[3] - J[1] * J[2];
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det));
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

inline Stability classify(const std::array<std::complex<double>, 2>& ev) {
    const double a = ev[0].real();
    const double b = ev[1].real();
    if (a == 0.0 || b == 0.0) return Stability::degenerate;
    if (a < 0.0 && b < 0.0) return Stability::stable;
    if (a > 0.0 && b > 0.0) return Stability::unstable;
    return Stability::saddle;
}

/// Padded search box: equilibria may sit slightly outside the physical domain
/// (e.g. the bloom state for large b1), regions are clipped to the grid later.
inline Box<2> default_search_box() { return Box<2>{{0.25, 0.0}, {0.70, 0.25}}; }

/// Newton iterations from a 20x20 seed lattice; roots closer than 1e-6 are merged.
inline EquilibriumSet find_equilibria(const PhytoplanktonModel& model, const Box<2>& search = default_search_box(),
                                      double newton_tol = 1e-12) {
    constexpr int kSeeds = 20;
    constexpr int kMaxIter = 60;
    EquilibriumSet out;
    for (int i = 0; i < kSeeds; ++i) {
        for (int j = 0; j < kSeeds; ++j) {
            Point2 x{search.lo[0] + search.extent(0) * i / (kSeeds - 1.0),
                     search.lo[1] + search.extent(1) * j / (kSeeds - 1.0)};
            bool ok = false;
            for (int it = 0; it < kMaxIter; ++it) {
                const auto F = model.drift(x);
                if (norm2(F) < newton_tol) {
                    ok = true;
                    break;
                }
                const auto J = model.jacobian(x);
                const double det = J[0] * J[3] - J[1] * J[2];
                if (det == 0.0 || !std::isfinite(det)) break;
                const double dx = (J[3] * F[0] - J[1] * F[1]) / det;
                const double dy = (-J[2] * F[0] + J[0] * F[1]) / det;
                x[0] -= dx;
                x[1] -= dy;
                if (!all_finite(x) || x[0] <= 0.0) break;
            }
            if (!ok || !search.contains(x, 1e-12)) continue;
            if (x[1] < 0.0) x[1] = 0.0;
            const bool dup = std::any_of(out.equilibria.begin(), out.equilibria.end(), [&](const Equilibrium& e) {
                return std::hypot(e.state[0] - x[0], e.state[1] - x[1]) < 1e-6;
            });
            if (dup) continue;
            Equilibrium e;
            e.state = x;
            e.eigenvalues = eigenvalues2(model.jacobian(x));
            e.stability = classify(e.eigenvalues);
            out.equilibria.push_back(e);
        }
    }
    std::sort(out.equilibria.begin(), out.equilibria.end(), [](const Equilibrium& a, const Equilibrium& b) {
        return a.state[1] != b.state[1] ? a.state[1] < b.state[1] : a.state[0] < b.state[0];
    });
    out.empty_warning = out.equilibria.empty();
    return out;
}

namespace detail {

// Backward-time branch of the stable manifold from `start`, parametrised by
// arc length: dx/ds = -F/|F|, classical RK4 with step ds.
inline std::vector<Point2> backward_branch(const PhytoplanktonModel& model, Point2 start, const Box<2>& box,
                                           double ds, std::size_t max_vertices) {
    std::vector<Point2> pts;
    pts.push_back(start);
    const auto dir = [&](const Point2& x) -> std::optional<Point2> {
        const auto F = model.drift(x);
        const double n = norm2(F);
        if (!(n > 1e-300)) return std::nullopt;
        return Point2{-F[0] / n, -F[1] / n};
    };
    Point2 x = start;
    while (pts.size() < max_vertices) {
        const auto k1 = dir(x);
        if (!k1) break;
        const auto k2 = dir({x[0] + 0.5 * ds * (*k1)[0], x[1] + 0.5 * ds * (*k1)[1]});
        if (!k2) break;
        const auto k3 = dir({x[0] + 0.5 * ds * (*k2)[0], x[1] + 0.5 * ds * (*k2)[1]});
        if (!k3) break;
        const auto k4 = dir({x[0] + ds * (*k3)[0], x[1] + ds * (*k3)[1]});
        if (!k4) break;
        Point2 y{x[0] + ds / 6.0 * ((*k1)[0] + 2 * (*k2)[0] + 2 * (*k3)[0] + (*k4)[0]),
                 x[1] + ds / 6.0 * ((*k1)[1] + 2 * (*k2)[1] + 2 * (*k3)[1] + (*k4)[1])};
        if (!box.contains(y)) {
            // Clip the last step onto the boundary.
            double t = 1.0;
            for (std::size_t a = 0; a < 2; ++a) {
                const double d = y[a] - x[a];
                if (y[a] < box.lo[a] && d != 0.0) t = std::min(t, (box.lo[a] - x[a]) / d);
                if (y[a] > box.hi[a] && d != 0.0) t = std::min(t, (box.hi[a] - x[a]) / d);
            }
            pts.push_back({x[0] + t * (y[0] - x[0]), x[1] + t * (y[1] - x[1])});
            break;
        }
        pts.push_back(y);
        x = y;
    }
    return pts;
}

}  // namespace detail

/// Stable manifold of the saddle E2, obtained by integrating the deterministic
/// flow backward in time from E2 +- 1e-5 v_s and clipped to `box`. Vertices are
/// at most `step` apart.
inline Polyline deterministic_separatrix(const PhytoplanktonModel& model, const Box<2>& box, double step,
                                         std::size_t max_vertices = 200000) {
    const auto eq = find_equilibria(model);
    const auto saddle = eq.saddle();
    if (!saddle) throw NumericalError("not bistable: no saddle equilibrium");
    const auto J = model.jacobian(saddle->state);
    const double lam = std::min(saddle->eigenvalues[0].real(), saddle->eigenvalues[1].real());
    // Eigenvector of J for the stable eigenvalue.
    Point2 v{J[1], lam - J[0]};
    if (std::hypot(v[0], v[1]) < 1e-14) v = {lam - J[3], J[2]};
    const double nv = std::hypot(v[0], v[1]);
    v = {v[0] / nv, v[1] / nv};
    const Point2& e2 = saddle->state;
    constexpr double kOffset = 1e-5;
    const auto a = detail::backward_branch(model, {e2[0] + kOffset * v[0], e2[1] + kOffset * v[1]}, box, step, max_vertices);
    const auto b = detail::backward_branch(model, {e2[0] - kOffset * v[0], e2[1] - kOffset * v[1]}, box, step, max_vertices);
    Polyline out;
    for (auto it = a.rbegin(); it != a.rend(); ++it) out.push_back(*it);
    out.push_back(e2);
    for (const auto& p : b) out.push_back(p);
    return out;
}

struct BistableWindow {
    double lower = 0.0;
    double upper = 0.0;
};

/// Endpoints of the b1 interval with two stable equilibria and a saddle.
/// A coarse scan brackets each change of the bistable flag, bisection refines it.
inline BistableWindow bistable_window(const ModelParams& base, double lo = 1.8, double hi = 2.7, double step = 0.01,
                                      double tol = 1e-6) {
    const auto bistable = [&](double b1) { return find_equilibria(PhytoplanktonModel(base.with_b1(b1))).bistable(); };
    std::vector<double> edges;
    bool prev = bistable(lo);
    for (double a = lo; a < hi - 1e-12;) {
        const double b = std::min(a + step, hi);
        const bool cur = bistable(b);
        if (cur != prev) {
            double x0 = a, x1 = b;
            while (x1 - x0 > tol) {
                const double m = 0.5 * (x0 + x1);
                (bistable(m) == prev ? x0 : x1) = m;
            }
            edges.push_back(0.5 * (x0 + x1));
        }
        prev = cur;
        a = b;
    }
    if (edges.size() != 2) throw NumericalError("expected one bistable interval in the b1 scan, found " +
                                                std::to_string(edges.size()) + " transitions");
    return {edges[0], edges[1]};
}

}  // namespace geomews
