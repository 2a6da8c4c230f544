#pragma once

// Stationary density of the reduced 1D biomass model and the
// expectation-centred stochastic bifurcation diagram.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "geomews/equilibria.hpp"
#include "geomews/model.hpp"
#include "geomews/parallel.hpp"

namespace geomews {

/// Density on a grid of [0, u_max]. Nodes are uniform in s = ln(u + delta)
/// and every integral is a trapezoid rule in s, which integrates the
/// 1/(u + delta) factor exactly and keeps resolution near u = 0.
struct Density1D {
    std::vector<double> u;
    std::vector<double> p;
    std::vector<double> cdf;
    double delta = 1e-4;

    /// Trapezoid integral of g(u) p(u) du.
    template <class G>
    double expect(G&& g) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            const double ds = std::log((u[i + 1] + delta) / (u[i] + delta));
            acc += 0.5 * ds * (g(u[i]) * p[i] * (u[i] + delta) + g(u[i + 1]) * p[i + 1] * (u[i + 1] + delta));
        }
        return acc;
    }
    double mass() const {
        return expect([](double) { return 1.0; });
    }
    double mean() const {
        return expect([](double x) { return x; });
    }
    /// p(u_max) / max p. The density is reflected at u_max, so a sizeable
    /// value means the domain truncates the upper tail; reported, not an error.
    double tail_ratio() const { return p.back() / *std::max_element(p.begin(), p.end()); }
    /// Inverse of the piecewise-linear cdf.
    double quantile(double level) const {
        if (!(level >= 0.0 && level <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), level);
        if (it == cdf.begin()) return u.front();
        if (it == cdf.end()) return u.back();
        const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
        const double c0 = cdf[i - 1];
        const double c1 = cdf[i];
        const double t = c1 > c0 ? (level - c0) / (c1 - c0) : 0.0;
        return u[i - 1] + t * (u[i] - u[i - 1]);
    }
};

/// p(u) proportional to exp(int_0^u 2 f(z) / (sigma^2 (z + delta)) dz) / (u + delta),
/// evaluated in log space. `log_shift` is added to the unnormalised log density.
inline Density1D stationary_density_1d(const std::function<double(double)>& f, double sigma, double delta, double u_max,
                                       std::size_t n, double log_shift = 0.0) {
    if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
    if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
    if (!(u_max > 0.0)) throw ConfigError("u_max must be > 0");
    if (n < 3) throw ConfigError("density needs at least 3 nodes");
    Density1D d;
    d.delta = delta;
    d.u.resize(n);
    const double s0 = std::log(delta);
    const double s1 = std::log(u_max + delta);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n - 1);
        d.u[i] = i == 0 ? 0.0 : (i + 1 == n ? u_max : std::exp(s) - delta);
    }
    // Exponent: int 2 f / (sigma^2 (z + delta)) dz = int 2 f / sigma^2 ds.
    std::vector<double> logp(n);
    double expo = 0.0;
    double prev = 2.0 * f(d.u[0]) / (sigma * sigma);
    logp[0] = -std::log(d.u[0] + delta) + log_shift;
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = 2.0 * f(d.u[i]) / (sigma * sigma);
        expo += 0.5 * (prev + cur) * std::log((d.u[i] + delta) / (d.u[i - 1] + delta));
        prev = cur;
        logp[i] = expo - std::log(d.u[i] + delta) + log_shift;
    }
    const double lmax = *std::max_element(logp.begin(), logp.end());
    if (!std::isfinite(lmax)) throw NumericalError("non-finite log density");
    d.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(logp[i])) throw NumericalError("non-finite log density");
        d.p[i] = std::exp(logp[i] - lmax);
    }
    const double z = d.mass();
    for (double& v : d.p) v /= z;
    d.cdf.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double ds = std::log((d.u[i] + delta) / (d.u[i - 1] + delta));
        d.cdf[i] = d.cdf[i - 1] + 0.5 * ds * (d.p[i - 1] * (d.u[i - 1] + delta) + d.p[i] * (d.u[i] + delta));
    }
    const double last = d.cdf.back();
    for (double& c : d.cdf) c /= last;
    return d;
}

inline Density1D stationary_density_1d(const Reduced1DModel& reduced, double sigma, double u_max = 0.13,
                                       std::size_t n = 4001) {
    return stationary_density_1d([&](double u) { return reduced.f(u); }, sigma, reduced.params().delta, u_max, n);
}

struct BifurcationPoint {
    double b1 = 0.0;
    double sigma = 0.0;
    double ubar = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
};

struct DeterministicBranch {
    double b1 = 0.0;
    std::optional<Equilibrium> e1;  // u = 0 branch
    std::optional<Equilibrium> e2;  // interior saddle
    std::optional<Equilibrium> e3;  // interior stable state with largest u
};

struct BifurcationCurve {
    std::vector<double> b1_grid;
    std::vector<double> sigmas;
    std::vector<BifurcationPoint> points;  // b1-major, sigma-minor
    std::vector<DeterministicBranch> branches;
};

inline DeterministicBranch deterministic_branch(const ModelParams& p) {
    DeterministicBranch br;
    br.b1 = p.b1;
    const auto eq = find_equilibria(PhytoplanktonModel(p));
    for (const auto& e : eq.equilibria) {
        if (e.state[1] < 1e-9) {
            if (!br.e1) br.e1 = e;
        } else if (e.stability == Stability::saddle) {
            if (!br.e2) br.e2 = e;
        } else if (e.stability == Stability::stable) {
            br.e3 = e;
        }
    }
    return br;
}

inline BifurcationCurve bifurcation_curve(const ModelParams& base, const std::vector<double>& b1_grid,
                                          const std::vector<double>& sigmas, double u_max = 0.13, std::size_t n = 4001,
                                          std::size_t jobs = 1) {
    if (b1_grid.empty() || sigmas.empty()) throw ConfigError("bifurcation sweep grids must be non-empty");
    BifurcationCurve out;
    out.b1_grid = b1_grid;
    out.sigmas = sigmas;
    out.points.resize(b1_grid.size() * sigmas.size());
    out.branches.resize(b1_grid.size());
    parallel_for(b1_grid.size(), jobs, [&](std::size_t i) {
        const ModelParams p = base.with_b1(b1_grid[i]);
        const Reduced1DModel red(p);
        for (std::size_t j = 0; j < sigmas.size(); ++j) {
            const auto d = stationary_density_1d(red, sigmas[j], u_max, n);
            out.points[i * sigmas.size() + j] = {b1_grid[i], sigmas[j], d.mean(), d.quantile(0.1), d.quantile(0.9)};
        }
        out.branches[i] = deterministic_branch(p);
    });
    return out;
}

}  // namespace geomews
