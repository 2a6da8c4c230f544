#pragma once

// Five-point (three-point in 1D) discretisation of the backward Kolmogorov
// generator  L phi = sum_a F_a d_a phi + (1/2) G_a^2 d_aa phi  on a uniform
// grid, with zero normal derivative on the outer boundary.

#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "geomews/core.hpp"
#include "geomews/grid.hpp"
#include "geomews/model.hpp"
#include "geomews/quadrature.hpp"

namespace geomews {

enum class Scheme {
    /// Second-order centred differences, mirror ghost nodes at the boundary.
    centred,
    /// First-order upwinding of the drift term.
    upwind,
    /// Conservative finite volumes on the per-axis flux form
    /// D phi'' + F phi' = (D/psi)(psi phi')', psi = exp(int F/D), with the
    /// cell integrals evaluated by graded quadrature. Monotone at any cell
    /// Peclet number and resolves diffusion that degenerates inside a cell.
    exponential_fitting,
};

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::centred: return "centred";
        case Scheme::upwind: return "upwind";
        case Scheme::exponential_fitting: return "exponential_fitting";
    }
    return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "centred" || s == "centered") return Scheme::centred;
    if (s == "upwind") return Scheme::upwind;
    if (s == "exponential_fitting" || s == "exponential") return Scheme::exponential_fitting;
    throw ConfigError("unknown discretisation scheme '" + s + "'");
}

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

template <std::size_t N>
struct DiscreteOperator {
    Grid<N> grid;
    SparseMatrix matrix;  // one row per grid node
    Scheme scheme = Scheme::centred;

    std::vector<double> apply(std::span<const double> phi) const {
        Eigen::Map<const Eigen::VectorXd> x(phi.data(), static_cast<Eigen::Index>(phi.size()));
        Eigen::VectorXd y = matrix * x;
        return std::vector<double>(y.data(), y.data() + y.size());
    }
};

namespace detail {

// Integrals needed by the exponential-fitting scheme on one side of a node:
// with Phi(t) = int_0^t F/D (t = signed distance along the axis),
//   resistance = int_0^{h} exp(-Phi)   and   weight = int_0^{h/2} exp(Phi) / D.
struct SideIntegrals {
    double resistance = 0.0;
    double weight = 0.0;
};

// Panels of [a, b] geometrically refined toward the end where D is small.
inline std::vector<double> graded_panels(double a, double b, double d_a, double d_b) {
    const double lo = std::min(d_a, d_b);
    const double hi = std::max(d_a, d_b);
    if (!(lo > 0.0) || hi / lo <= 2.0) return {a, b};
    const int levels = std::min(40, static_cast<int>(std::ceil(std::log2(hi / lo))) + 3);
    const bool toward_a = d_a < d_b;
    std::vector<double> cuts;
    cuts.reserve(static_cast<std::size_t>(levels) + 2);
    cuts.push_back(0.0);
    for (int l = levels; l >= 0; --l) cuts.push_back(std::ldexp(1.0, -l));
    for (double& c : cuts) c = toward_a ? a + c * (b - a) : b - c * (b - a);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

// f(t) returns {F, D} at signed offset t from the node along the axis.
template <class AxisFn>
SideIntegrals side_integrals(AxisFn&& fd, double h) {
    SideIntegrals out;
    const auto ratio = [&](double t) {
        const auto [F, D] = fd(t);
        return F / D;
    };
    const auto d_at = [&](double t) { return fd(t)[1]; };
    double phi_start = 0.0;
    const double half = 0.5 * h;
    for (int part = 0; part < 2; ++part) {
        const double a = part == 0 ? 0.0 : half;
        const double b = part == 0 ? half : h;
        const std::vector<double> cuts = graded_panels(a, b, d_at(a), d_at(b));
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double pa = cuts[p];
            const double pb = cuts[p + 1];
            const double mid = 0.5 * (pa + pb);
            const double rad = 0.5 * (pb - pa);
            double phi_end_incr = 0.0;
            for (std::size_t q = 0; q < kGl8x.size(); ++q) {
                const double t = mid + rad * kGl8x[q];
                const auto [F, D] = fd(t);
                const double r = F / D;
                phi_end_incr += kGl8w[q] * r;
                // Phi(t) = Phi(pa) + int_pa^t F/D
                const double imid = 0.5 * (pa + t);
                const double irad = 0.5 * (t - pa);
                double inner = 0.0;
                for (std::size_t s = 0; s < kGl4x.size(); ++s) inner += kGl4w[s] * ratio(imid + irad * kGl4x[s]);
                const double phi = phi_start + irad * inner;
                if (std::abs(phi) > 700.0) throw NumericalError("exponent overflow in generator assembly");
                out.resistance += kGl8w[q] * rad * std::exp(-phi);
                if (part == 0) out.weight += kGl8w[q] * rad * std::exp(phi) / D;
            }
            phi_start += rad * phi_end_incr;
        }
    }
    return out;
}

}  // namespace detail

struct GeneratorOptions {
    Scheme scheme = Scheme::exponential_fitting;
};

/// Assembles the generator over every grid node. Rows are later overwritten
/// by identity rows for Dirichlet nodes when a boundary-value problem is set up.
template <SdeModel M>
DiscreteOperator<M::dim> assemble_generator(const M& model, const Grid<M::dim>& grid, GeneratorOptions opts = {}) {
    constexpr std::size_t N = M::dim;
    using X = State<N>;
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(grid.size() * (2 * N + 1));

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto idx = grid.unflat(k);
        const X x = grid.node(k);
        const X F = model.drift(x);
        const X G = model.noise(x);
        double diag = 0.0;
        for (std::size_t a = 0; a < N; ++a) {
            const double h = grid.spacing(a);
            const bool has_lo = idx[a] > 0;
            const bool has_hi = idx[a] + 1 < grid.n(a);
            const std::size_t k_lo = has_lo ? k - grid.stride(a) : k + grid.stride(a);
            const std::size_t k_hi = has_hi ? k + grid.stride(a) : k - grid.stride(a);
            const double D = 0.5 * G[a] * G[a];
            double c_lo = 0.0;
            double c_hi = 0.0;
            switch (opts.scheme) {
                case Scheme::centred:
                    c_lo = D / (h * h) - F[a] / (2.0 * h);
                    c_hi = D / (h * h) + F[a] / (2.0 * h);
                    break;
                case Scheme::upwind:
                    c_lo = D / (h * h) + std::max(-F[a], 0.0) / h;
                    c_hi = D / (h * h) + std::max(F[a], 0.0) / h;
                    break;
                case Scheme::exponential_fitting: {
                    if (!(D > 0.0)) {
                        throw NumericalError("exponential fitting needs positive diffusion; node " + std::to_string(k));
                    }
                    const auto along = [&](double sign) {
                        return [&, sign](double t) {
                            X y = x;
                            y[a] += sign * t;
                            const X f = model.drift(y);
                            const X g = model.noise(y);
                            return std::array<double, 2>{sign * f[a], 0.5 * g[a] * g[a]};
                        };
                    };
                    detail::SideIntegrals lo{}, hi{};
                    if (has_lo) lo = detail::side_integrals(along(-1.0), h);
                    if (has_hi) hi = detail::side_integrals(along(+1.0), h);
                    const double w = lo.weight + hi.weight;
                    c_lo = has_lo ? 1.0 / (lo.resistance * w) : 0.0;
                    c_hi = has_hi ? 1.0 / (hi.resistance * w) : 0.0;
                    break;
                }
            }
            if (opts.scheme != Scheme::exponential_fitting && (!has_lo || !has_hi)) {
                // Mirror ghost value: both stencil arms land on the interior neighbour.
                const double c = c_lo + c_hi;
                if (!has_lo) {
                    c_lo = 0.0;
                    c_hi = c;
                } else {
                    c_hi = 0.0;
                    c_lo = c;
                }
            }
            if (!std::isfinite(c_lo) || !std::isfinite(c_hi)) {
                std::string where;
                for (std::size_t b = 0; b < N; ++b) where += (b ? "," : "") + std::to_string(x[b]);
                throw NumericalError("non-finite generator coefficient at node " + std::to_string(k) + " (" + where + ")");
            }
            if (c_lo != 0.0) trip.emplace_back(static_cast<int>(k), static_cast<int>(k_lo), c_lo);
            if (c_hi != 0.0) trip.emplace_back(static_cast<int>(k), static_cast<int>(k_hi), c_hi);
            diag -= c_lo + c_hi;
        }
        trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
    }
    SparseMatrix A(static_cast<int>(grid.size()), static_cast<int>(grid.size()));
    A.setFromTriplets(trip.begin(), trip.end());
    return DiscreteOperator<N>{grid, std::move(A), opts.scheme};
}

}  // namespace geomews
