#pragma once

// Stochastic models: the temperature-phytoplankton system, the Schlogl
// reaction model, and the quasi-steady 1D reduction of the former.
//
// Every model satisfies `SdeModel`: an Ito SDE dX = F(X) dt + G(X) dW with
// diagonal G on an axis-aligned box. All models are immutable values and
// their evaluators are safe to call concurrently.

#include <cmath>
#include <concepts>
#include <functional>
#include <string>

#include "geomews/core.hpp"

namespace geomews {

template <class M>
concept SdeModel = requires(const M& m, const typename M::state_type& x) {
    { M::dim } -> std::convertible_to<std::size_t>;
    requires std::same_as<typename M::state_type, State<M::dim>>;
    { m.drift(x) } -> std::same_as<typename M::state_type>;
    { m.noise(x) } -> std::same_as<typename M::state_type>;
    { m.domain() } -> std::same_as<Box<M::dim>>;
};

/// Dimensionless parameters of the temperature-phytoplankton model.
struct ModelParams {
    double a = 1.0;
    double b = 0.3;
    double s0 = 0.1;
    double s1 = 0.95;
    double alpha1 = 3.0;
    double T0 = 1.0;
    double alpha2 = 1.0;
    double gamma = 1.0;
    double mu = 0.1;
    double b1 = 2.1;
    double delta = 1e-4;
    double sigma_T = 0.01;
    double sigma_u = 0.01;

    ModelParams with_b1(double v) const {
        ModelParams p = *this;
        p.b1 = v;
        return p;
    }
    ModelParams with_sigma(double v) const {
        ModelParams p = *this;
        p.sigma_T = v;
        p.sigma_u = v;
        return p;
    }

    void validate() const {
        const double all[] = {a, b, s0, s1, alpha1, T0, alpha2, gamma, mu, b1, delta, sigma_T, sigma_u};
        for (double v : all) {
            if (!std::isfinite(v)) throw ConfigError("model parameters must be finite");
        }
        if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
        if (sigma_T < 0.0 || sigma_u < 0.0) throw ConfigError("noise intensities must be >= 0");
        if (!(s0 < s1)) throw ConfigError("s0 must be < s1");
        if (gamma == 0.0) throw ConfigError("gamma must be nonzero");
    }

    /// The biomass diffusion factorises as sigma^2 * a~ only for equal intensities.
    bool separable_diffusion() const { return sigma_T == sigma_u; }
};

inline Box<2> default_phyto_domain() { return Box<2>{{0.30, 0.0}, {0.60, 0.13}}; }

/// dT = F_T dt + sigma_T dW,  du = F_u dt + sigma_u sqrt(u + delta) dW.
class PhytoplanktonModel {
public:
    static constexpr std::size_t dim = 2;
    using state_type = State<2>;

    explicit PhytoplanktonModel(ModelParams p = {}, Box<2> domain = default_phyto_domain())
        : p_(p), box_(domain) {
        p_.validate();
        if (!(box_.lo[0] < box_.hi[0]) || !(box_.lo[1] < box_.hi[1]))
            throw ConfigError("empty model domain");
    }

    const ModelParams& params() const { return p_; }
    Box<2> domain() const { return box_; }

    double albedo(double u) const { return p_.s0 + (p_.s1 - p_.s0) * std::exp(-p_.alpha1 * u); }

    /// Arrhenius growth; defined as 0 for T <= 0 where exp(-T0/T) -> 0.
    double growth(double T) const {
        if (T <= 0.0) return 0.0;
        return p_.b1 * std::exp(-p_.T0 / T - p_.alpha2 * T);
    }

    state_type drift(const state_type& x) const {
        const double T = x[0];
        const double u = x[1];
        const double T2 = T * T;
        state_type f{(-p_.a * T2 * T2 + p_.b * (1.0 - albedo(u))) / p_.gamma,
                     u * (growth(T) - p_.mu - u)};
        if (!all_finite(f)) throw DomainError("non-finite drift at T=" + std::to_string(T) + ", u=" + std::to_string(u));
        return f;
    }

    state_type noise(const state_type& x) const {
        return {p_.sigma_T, p_.sigma_u * std::sqrt(std::max(x[1] + p_.delta, 0.0))};
    }

    /// Analytic Jacobian dF_i/dx_j, row-major.
    std::array<double, 4> jacobian(const state_type& x) const {
        const double T = x[0];
        const double u = x[1];
        const double g = growth(T);
        const double dg = T > 0.0 ? g * (p_.T0 / (T * T) - p_.alpha2) : 0.0;
        const double dS = -p_.alpha1 * (p_.s1 - p_.s0) * std::exp(-p_.alpha1 * u);
        return {-4.0 * p_.a * T * T * T / p_.gamma, -p_.b * dS / p_.gamma,
                u * dg, g - p_.mu - 2.0 * u};
    }

private:
    ModelParams p_;
    Box<2> box_;
};

/// Schlogl model dX = -(X-x1)(X-x2)(X-x3) dt + sigma dW on [0, 1].
class SchloglModel {
public:
    static constexpr std::size_t dim = 1;
    using state_type = State<1>;

    SchloglModel(double x1, double x2, double x3, double sigma, Box<1> domain = {{0.0}, {1.0}})
        : x1_(x1), x2_(x2), x3_(x3), sigma_(sigma), box_(domain) {
        if (!(x1 < x2 && x2 < x3)) throw ConfigError("Schlogl roots must satisfy x1 < x2 < x3");
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be finite and >= 0");
    }

    double x1() const { return x1_; }
    double x2() const { return x2_; }
    double x3() const { return x3_; }
    double sigma() const { return sigma_; }
    Box<1> domain() const { return box_; }

    double f(double x) const { return -(x - x1_) * (x - x2_) * (x - x3_); }
    double df(double x) const {
        return -((x - x2_) * (x - x3_) + (x - x1_) * (x - x3_) + (x - x1_) * (x - x2_));
    }
    /// Potential with f = -V', V(x1) = 0.
    double potential(double x) const { return potential_raw(x) - potential_raw(x1_); }

    state_type drift(const state_type& x) const { return {f(x[0])}; }
    state_type noise(const state_type&) const { return {sigma_}; }

private:
    double potential_raw(double x) const {
        // -integral of f: x^4/4 - e1 x^3/3 + e2 x^2/2 - e3 x
        const double e1 = x1_ + x2_ + x3_;
        const double e2 = x1_ * x2_ + x1_ * x3_ + x2_ * x3_;
        const double e3 = x1_ * x2_ * x3_;
        return x * x * x * x / 4.0 - e1 * x * x * x / 3.0 + e2 * x * x / 2.0 - e3 * x;
    }

    double x1_, x2_, x3_, sigma_;
    Box<1> box_;
};

inline SchloglModel schlogl_system(double x1, double x2, double x3, double sigma) {
    return SchloglModel(x1, x2, x3, sigma);
}

/// Model assembled from callables; used for synthetic checks.
template <std::size_t N>
class FunctionModel {
public:
    static constexpr std::size_t dim = N;
    using state_type = State<N>;
    using Fn = std::function<state_type(const state_type&)>;

    FunctionModel(Fn drift, Fn noise, Box<N> domain)
        : drift_(std::move(drift)), noise_(std::move(noise)), box_(domain) {}

    state_type drift(const state_type& x) const { return drift_(x); }
    state_type noise(const state_type& x) const { return noise_(x); }
    Box<N> domain() const { return box_; }

private:
    Fn drift_;
    Fn noise_;
    Box<N> box_;
};

/// Quasi-steady reduction T = T*(u) of the phytoplankton model.
class Reduced1DModel {
public:
    explicit Reduced1DModel(const ModelParams& p) : full_(p, Box<2>{{1e-6, 0.0}, {10.0, 10.0}}), p_(p) {}

    const ModelParams& params() const { return p_; }

    double t_star(double u) const {
        const double r = p_.b * (1.0 - full_.albedo(u)) / p_.a;
        if (r < 0.0) throw DomainError("negative radicand in T*(u)");
        return std::pow(r, 0.25);
    }
    double f(double u) const { return u * (full_.growth(t_star(u)) - u) - p_.mu * u; }
    double D(double u) const { return 0.5 * p_.sigma_u * p_.sigma_u * (u + p_.delta); }

private:
    PhytoplanktonModel full_;
    ModelParams p_;
};

inline Reduced1DModel reduce_1d(const ModelParams& p) { return Reduced1DModel(p); }

}  // namespace geomews
