#pragma once

// Transition-layer geometry on a committor field: EWS_geom, directed curve
// distances (MDB / MDS) and the second-order half-width asymmetry.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "geomews/contour.hpp"
#include "geomews/grid.hpp"
#include "geomews/polyline.hpp"
#include "geomews/quadrature.hpp"

namespace geomews {

inline constexpr double kGradientFloor = 1e-6;
inline constexpr double kDefaultAlpha = 0.1;

/// Pairwise summation; keeps the reduction order independent of how the terms were produced.
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t m = n / 2;
    return pairwise_sum(x, m) + pairwise_sum(x + m, n - m);
}
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

/// Node-wise first and second derivatives of a 2D field by centred differences
/// (one-sided first differences on the outer rows).
class FieldDerivatives {
public:
    explicit FieldDerivatives(const ScalarField<2>& q) : grid_(q.grid()) {
        const std::size_t n = grid_.size();
        std::vector<double> gx(n), gy(n), gxx(n), gyy(n);
        for (std::size_t a = 0; a < 2; ++a) {
            auto& g = a == 0 ? gx : gy;
            auto& gg = a == 0 ? gxx : gyy;
            const double h = grid_.spacing(a);
            const std::size_t s = grid_.stride(a);
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t i = grid_.unflat(k)[a];
                const std::size_t last = grid_.n(a) - 1;
                if (i == 0) {
                    g[k] = (q[k + s] - q[k]) / h;
                    gg[k] = (q[k + 2 * s] - 2.0 * q[k + s] + q[k]) / (h * h);
                } else if (i == last) {
                    g[k] = (q[k] - q[k - s]) / h;
                    gg[k] = (q[k] - 2.0 * q[k - s] + q[k - 2 * s]) / (h * h);
                } else {
                    g[k] = (q[k + s] - q[k - s]) / (2.0 * h);
                    gg[k] = (q[k + s] - 2.0 * q[k] + q[k - s]) / (h * h);
                }
            }
        }
        // Mixed derivative: differentiate d/dx along y.
        std::vector<double> gxy(n);
        const double hy = grid_.spacing(1);
        const std::size_t sy = grid_.stride(1);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = grid_.unflat(k)[1];
            if (j == 0) {
                gxy[k] = (gx[k + sy] - gx[k]) / hy;
            } else if (j + 1 == grid_.n(1)) {
                gxy[k] = (gx[k] - gx[k - sy]) / hy;
            } else {
                gxy[k] = (gx[k + sy] - gx[k - sy]) / (2.0 * hy);
            }
        }
        std::vector<double> mag(n);
        for (std::size_t k = 0; k < n; ++k) mag[k] = std::max(std::hypot(gx[k], gy[k]), kGradientFloor);
        gx_.emplace(grid_, std::move(gx));
        gy_.emplace(grid_, std::move(gy));
        gxx_.emplace(grid_, std::move(gxx));
        gyy_.emplace(grid_, std::move(gyy));
        gxy_.emplace(grid_, std::move(gxy));
        mag_.emplace(grid_, std::move(mag));
    }

    /// Regularised gradient magnitude max(|grad q|, 1e-6), bilinearly interpolated.
    double grad_norm(const Point2& x) const { return mag_->interpolate(x); }
    Point2 gradient(const Point2& x) const { return {gx_->interpolate(x), gy_->interpolate(x)}; }
    std::array<double, 3> hessian(const Point2& x) const {
        return {gxx_->interpolate(x), gxy_->interpolate(x), gyy_->interpolate(x)};
    }

private:
    Grid<2> grid_;
    std::optional<ScalarField<2>> gx_, gy_, gxx_, gyy_, gxy_, mag_;
};

/// Arc-length average of the local width 2 alpha / |grad q| along gamma,
/// midpoint rule on the polyline segments.
inline double ews_geom(const ScalarField<2>& q, const Polyline& gamma, double alpha = kDefaultAlpha) {
    if (gamma.degenerate()) throw NumericalError("ews_geom: degenerate polyline");
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("alpha must lie in (0, 1/2)");
    const FieldDerivatives d(q.clamped(0.0, 1.0));
    std::vector<double> terms;
    terms.reserve(gamma.size() - 1);
    for (std::size_t k = 0; k + 1 < gamma.size(); ++k) {
        const Point2 mid{0.5 * (gamma[k][0] + gamma[k + 1][0]), 0.5 * (gamma[k][1] + gamma[k + 1][1])};
        const double ds = gamma.arc_length()[k + 1] - gamma.arc_length()[k];
        terms.push_back(2.0 * alpha / d.grad_norm(mid) * ds);
    }
    return pairwise_sum(terms) / gamma.length();
}

/// 1D analogue: the width 2 alpha / |q'(x*)| at the single crossing q(x*) = 1/2.
inline double ews_geom_1d(const ScalarField<1>& q_raw, double alpha = kDefaultAlpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("alpha must lie in (0, 1/2)");
    const ScalarField<1> q = q_raw.clamped(0.0, 1.0);
    const auto& g = q.grid();
    const std::size_t n = g.n(0);
    const double h = g.spacing(0);
    const auto deriv = [&](std::size_t i) {
        if (i == 0) return (q[1] - q[0]) / h;
        if (i + 1 == n) return (q[n - 1] - q[n - 2]) / h;
        return (q[i + 1] - q[i - 1]) / (2.0 * h);
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = q[i] - 0.5;
        const double b = q[i + 1] - 0.5;
        if ((a < 0.0) != (b < 0.0)) {
            const double t = a / (a - b);
            const double dq = (1.0 - t) * deriv(i) + t * deriv(i + 1);
            return 2.0 * alpha / std::max(std::abs(dq), kGradientFloor);
        }
    }
    throw NumericalError("level not attained");
}

/// Directed arc-length-averaged distance (1/L) int_from dist(x(s), to) ds.
/// The integral is taken per segment with 8-point Gauss-Legendre on 16 panels,
/// so the value does not depend on how densely `from` is sampled.
inline double curve_distance(const Polyline& from, const Polyline& to) {
    if (from.degenerate() || to.degenerate()) throw NumericalError("curve_distance: degenerate polyline");
    constexpr int kPanels = 16;
    std::vector<double> terms;
    terms.reserve((from.size() - 1) * kPanels);
    for (std::size_t k = 0; k + 1 < from.size(); ++k) {
        const Point2& a = from[k];
        const Point2& b = from[k + 1];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        // A segment shared with `to` lies on it; skip the projection rounding.
        bool shared = false;
        for (std::size_t j = 0; j + 1 < to.size() && !shared; ++j) {
            shared = (to[j] == a && to[j + 1] == b) || (to[j] == b && to[j + 1] == a);
        }
        if (shared) {
            terms.insert(terms.end(), kPanels, 0.0);
            continue;
        }
        for (int p = 0; p < kPanels; ++p) {
            double acc = 0.0;
            for (std::size_t g = 0; g < detail::kGl8x.size(); ++g) {
                const double t = (p + 0.5 * (1.0 + detail::kGl8x[g])) / kPanels;
                acc += detail::kGl8w[g] * point_polyline_distance({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}, to);
            }
            terms.push_back(0.5 * acc * len / kPanels);
        }
    }
    return pairwise_sum(terms) / from.length();
}

struct WidthSample {
    Point2 x{};
    double grad_norm = 0.0;  // kappa1
    double kappa2 = 0.0;     // n^T (Hess q) n
    double w_alpha = 0.0;    // 2 alpha / kappa1
    double xi_plus_pred = 0.0;
    double xi_minus_pred = 0.0;
    double xi_plus = 0.0;  // measured along +n to q = 1/2 + alpha
    double xi_minus = 0.0;
    bool valid = false;  // false when a normal ray leaves the domain first
};

struct WidthProfile {
    double alpha = kDefaultAlpha;
    std::vector<WidthSample> samples;
    std::size_t valid_count() const {
        return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const WidthSample& s) { return s.valid; }));
    }
};

namespace detail {

// Smallest s > 0 with q(x + s dir) = level, found by marching then bisection.
inline std::optional<double> ray_root(const ScalarField<2>& q, const Point2& x, const Point2& dir, double level) {
    const auto& box = q.grid().bounds();
    const double step = 0.25 * std::min(q.grid().spacing(0), q.grid().spacing(1));
    const auto f = [&](double s) { return q.interpolate({x[0] + s * dir[0], x[1] + s * dir[1]}) - level; };
    const auto inside = [&](double s) { return box.contains({x[0] + s * dir[0], x[1] + s * dir[1]}); };
    double s0 = 0.0;
    double f0 = f(0.0);
    for (int it = 0; it < 100000; ++it) {
        const double s1 = s0 + step;
        if (!inside(s1)) return std::nullopt;
        const double f1 = f(s1);
        if ((f0 < 0.0) != (f1 < 0.0) || f1 == 0.0) {
            double lo = s0, hi = s1, flo = f0;
            for (int b = 0; b < 100 && hi - lo > 1e-15 * (1.0 + hi); ++b) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0) && fm != 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        s0 = s1;
        f0 = f1;
    }
    return std::nullopt;
}

}  // namespace detail

/// Per-vertex half widths of the band 1/2 - alpha <= q <= 1/2 + alpha: the
/// second-order prediction from kappa1, kappa2 and the values measured along
/// the unit normal n = grad q / |grad q|.
inline WidthProfile width_asymmetry(const ScalarField<2>& q_raw, const Polyline& gamma, double alpha = kDefaultAlpha) {
    if (gamma.degenerate()) throw NumericalError("width_asymmetry: degenerate polyline");
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("alpha must lie in (0, 1/2)");
    const ScalarField<2> q = q_raw.clamped(0.0, 1.0);
    const FieldDerivatives d(q);
    WidthProfile out;
    out.alpha = alpha;
    for (const auto& x : gamma.vertices()) {
        WidthSample s;
        s.x = x;
        const Point2 g = d.gradient(x);
        const double k1 = std::max(std::hypot(g[0], g[1]), kGradientFloor);
        const Point2 n{g[0] / k1, g[1] / k1};
        const auto H = d.hessian(x);
        s.grad_norm = k1;
        s.kappa2 = n[0] * n[0] * H[0] + 2.0 * n[0] * n[1] * H[1] + n[1] * n[1] * H[2];
        s.w_alpha = 2.0 * alpha / k1;
        s.xi_plus_pred = alpha / k1 - s.kappa2 * alpha * alpha / (2.0 * k1 * k1 * k1);
        s.xi_minus_pred = alpha / k1 + s.kappa2 * alpha * alpha / (2.0 * k1 * k1 * k1);
        const double q0 = q.interpolate(x);
        const auto plus = detail::ray_root(q, x, n, q0 + alpha);
        const auto minus = detail::ray_root(q, x, {-n[0], -n[1]}, q0 - alpha);
        if (plus && minus) {
            s.xi_plus = *plus;
            s.xi_minus = *minus;
            s.valid = true;
        }
        out.samples.push_back(s);
    }
    return out;
}

}  // namespace geomews
