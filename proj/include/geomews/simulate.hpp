#pragma once

// Euler-Maruyama integration with reflecting walls, Monte Carlo first-passage
// estimation and long-run histograms.

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geomews/core.hpp"
#include "geomews/grid.hpp"
#include "geomews/model.hpp"
#include "geomews/parallel.hpp"

namespace geomews {

struct SimConfig {
    double dt = 1e-2;
    double t_max = 1e6;
    std::uint64_t seed = 20240501;
    std::size_t n_traj = 10000;
    std::size_t jobs = 1;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
        if (!(t_max >= dt)) throw ConfigError("t_max must be >= dt");
        if (n_traj < 1) throw ConfigError("n_traj must be >= 1");
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

/// Independent engine for stream `index` under `master`; depends on nothing else,
/// so a trajectory is reproducible regardless of which thread runs it.
inline Engine make_engine(std::uint64_t master, std::uint64_t index) {
    const std::uint64_t a = splitmix64(master);
    const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(b >> 32), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return Engine(seq);
}

/// Mirror reflection x -> 2*bound - x at each wall, then clamping into the box
/// (which also enforces u >= 0 after a reflection overshoot).
template <std::size_t N>
void reflect_into(State<N>& x, const Box<N>& box) {
    for (std::size_t a = 0; a < N; ++a) {
        if (x[a] < box.lo[a]) x[a] = 2.0 * box.lo[a] - x[a];
        if (x[a] > box.hi[a]) x[a] = 2.0 * box.hi[a] - x[a];
        x[a] = std::clamp(x[a], box.lo[a], box.hi[a]);
    }
}

/// One Euler-Maruyama integrator bound to a model and a random stream.
template <SdeModel M>
class EulerMaruyama {
public:
    using X = typename M::state_type;

    EulerMaruyama(const M& model, double dt, Engine engine)
        : model_(model), box_(model.domain()), dt_(dt), sqrt_dt_(std::sqrt(dt)), engine_(std::move(engine)) {}

    void step(X& x) {
        const X F = model_.drift(x);
        const X G = model_.noise(x);
        for (std::size_t a = 0; a < M::dim; ++a) x[a] += F[a] * dt_ + G[a] * sqrt_dt_ * normal_(engine_);
        if (!all_finite(x)) throw NumericalError("non-finite state in Euler-Maruyama step");
        reflect_into(x, box_);
    }

    Engine& engine() { return engine_; }

private:
    const M& model_;
    Box<M::dim> box_;
    double dt_;
    double sqrt_dt_;
    Engine engine_;
    boost::random::normal_distribution<double> normal_;
};

template <std::size_t N>
struct PathSample {
    std::vector<double> t;
    std::vector<State<N>> x;
};

/// Integrates from x0 over [0, t_max] and records every `stride`-th state.
template <SdeModel M>
PathSample<M::dim> simulate_path(const M& model, const typename M::state_type& x0, const SimConfig& cfg,
                                 std::uint64_t stream = 0, std::size_t stride = 1) {
    cfg.validate();
    if (!model.domain().contains(x0, 1e-12)) throw DomainError("initial state outside the domain");
    if (stride < 1) throw ConfigError("stride must be >= 1");
    EulerMaruyama<M> em(model, cfg.dt, make_engine(cfg.seed, stream));
    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
    PathSample<M::dim> out;
    out.t.reserve(steps / stride + 1);
    out.x.reserve(steps / stride + 1);
    auto x = x0;
    out.t.push_back(0.0);
    out.x.push_back(x);
    for (std::size_t n = 1; n <= steps; ++n) {
        try {
            em.step(x);
        } catch (const NumericalError&) {
            throw NumericalError("non-finite state at step " + std::to_string(n));
        }
        if (n % stride == 0) {
            out.t.push_back(static_cast<double>(n) * cfg.dt);
            out.x.push_back(x);
        }
    }
    return out;
}

/// Uniform draw in the region intersected with the model box (bounding-box rejection).
template <std::size_t N>
State<N> sample_in_region(const EllipseRegion<N>& region, const Box<N>& box, Engine& eng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        State<N> x{};
        for (std::size_t a = 0; a < N; ++a) x[a] = region.center[a] + region.semi_axes[a] * unit(eng);
        if (region.contains(x) && box.contains(x)) return x;
    }
    throw NumericalError("start region does not intersect the domain");
}

struct MfptEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double censored_fraction = 0.0;
    std::size_t n = 0;
};

/// Kaplan-Meier restricted mean (integral of the survival estimate up to
/// t_max) with Greenwood standard error. Without censoring this is the sample
/// mean with the plain standard error.
inline MfptEstimate kaplan_meier_mean(std::vector<double> times, const std::vector<char>& censored, double t_max) {
    const std::size_t n = times.size();
    if (n == 0 || censored.size() != n) throw NumericalError("kaplan_meier_mean: bad sample");
    std::size_t n_cens = 0;
    for (char c : censored) n_cens += c ? 1 : 0;
    if (n_cens == n) throw NoTransitionsError("no transitions observed; increase t_max or sigma");
    MfptEstimate out;
    out.n = n;
    out.censored_fraction = static_cast<double>(n_cens) / static_cast<double>(n);
    if (n_cens == 0) {
        double s = 0.0;
        for (double t : times) s += t;
        const double m = s / static_cast<double>(n);
        double ss = 0.0;
        for (double t : times) ss += (t - m) * (t - m);
        out.mean = m;
        out.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
        return out;
    }
    // Distinct event times with death counts and risk sets.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return times[a] != times[b] ? times[a] < times[b] : censored[a] < censored[b];
    });
    struct Event {
        double t;
        double d;
        double at_risk;
    };
    std::vector<Event> ev;
    std::size_t at_risk = n;
    for (std::size_t i = 0; i < n;) {
        const double t = times[order[i]];
        std::size_t d = 0, c = 0;
        std::size_t j = i;
        for (; j < n && times[order[j]] == t; ++j) (censored[order[j]] ? c : d) += 1;
        if (d > 0) ev.push_back({t, static_cast<double>(d), static_cast<double>(at_risk)});
        at_risk -= d + c;
        i = j;
    }
    // Survival just after each event, then restricted mean and Greenwood.
    const std::size_t m = ev.size();
    std::vector<double> surv(m);
    double s = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        s *= 1.0 - ev[k].d / ev[k].at_risk;
        surv[k] = s;
    }
    // area_after[k] = int_{t_k}^{t_max} S(t) dt
    std::vector<double> area_after(m);
    double tail = 0.0;
    for (std::size_t k = m; k-- > 0;) {
        const double next_t = k + 1 < m ? ev[k + 1].t : t_max;
        tail += surv[k] * (next_t - ev[k].t);
        area_after[k] = tail;
    }
    out.mean = (m > 0 ? ev[0].t : t_max) + (m > 0 ? area_after[0] : 0.0);
    double var = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double denom = ev[k].at_risk * (ev[k].at_risk - ev[k].d);
        if (denom > 0.0) var += area_after[k] * area_after[k] * ev[k].d / denom;
    }
    out.std_error = std::sqrt(var);
    return out;
}

/// Monte Carlo mean first passage time from the start region into `target`
/// (any type with contains(x)). Trajectory i uses stream i, so the estimate is
/// independent of cfg.jobs.
template <SdeModel M, class Target>
MfptEstimate mc_mfpt(const M& model, const EllipseRegion<M::dim>& start, const Target& target, const SimConfig& cfg,
                     std::vector<double>* raw_times = nullptr, std::vector<char>* raw_censored = nullptr) {
    cfg.validate();
    const auto box = model.domain();
    const auto max_steps = static_cast<std::uint64_t>(std::llround(cfg.t_max / cfg.dt));
    std::vector<double> times(cfg.n_traj);
    std::vector<char> cens(cfg.n_traj);
    parallel_for(cfg.n_traj, cfg.jobs, [&](std::size_t i) {
        EulerMaruyama<M> em(model, cfg.dt, make_engine(cfg.seed, i));
        auto x = sample_in_region(start, box, em.engine());
        std::uint64_t n = 0;
        bool hit = target.contains(x);
        while (!hit && n < max_steps) {
            em.step(x);
            ++n;
            hit = target.contains(x);
        }
        times[i] = static_cast<double>(n) * cfg.dt;
        cens[i] = hit ? 0 : 1;
    });
    if (raw_times) *raw_times = times;
    if (raw_censored) *raw_censored = cens;
    return kaplan_meier_mean(std::move(times), cens, static_cast<double>(max_steps) * cfg.dt);
}

struct Histogram1D {
    std::vector<double> edges;  // bins + 1
    std::vector<double> mass;   // sums to 1
};

template <std::size_t N>
struct Marginals {
    std::array<Histogram1D, N> axis;
    std::size_t samples = 0;
};

/// Normalised per-axis histograms of one long path after `burn_in`.
template <SdeModel M>
Marginals<M::dim> stationary_histogram(const M& model, const typename M::state_type& x0, const SimConfig& cfg,
                                       double burn_in, std::size_t bins = 200) {
    cfg.validate();
    if (!(burn_in < cfg.t_max)) throw ConfigError("burn_in must be < t_max");
    if (bins < 1) throw ConfigError("bins must be >= 1");
    const auto box = model.domain();
    Marginals<M::dim> out;
    std::array<std::vector<double>, M::dim> counts;
    for (std::size_t a = 0; a < M::dim; ++a) {
        counts[a].assign(bins, 0.0);
        out.axis[a].edges.resize(bins + 1);
        for (std::size_t b = 0; b <= bins; ++b)
            out.axis[a].edges[b] = box.lo[a] + box.extent(a) * static_cast<double>(b) / static_cast<double>(bins);
    }
    EulerMaruyama<M> em(model, cfg.dt, make_engine(cfg.seed, 0));
    auto x = x0;
    const auto steps = static_cast<std::uint64_t>(std::llround(cfg.t_max / cfg.dt));
    const auto skip = static_cast<std::uint64_t>(std::ceil(burn_in / cfg.dt));
    for (std::uint64_t n = 1; n <= steps; ++n) {
        em.step(x);
        if (n <= skip) continue;
        for (std::size_t a = 0; a < M::dim; ++a) {
            auto b = static_cast<std::size_t>((x[a] - box.lo[a]) / box.extent(a) * static_cast<double>(bins));
            counts[a][std::min(b, bins - 1)] += 1.0;
        }
        ++out.samples;
    }
    if (out.samples == 0) throw NumericalError("stationary_histogram: no samples after burn-in");
    for (std::size_t a = 0; a < M::dim; ++a) {
        out.axis[a].mass.resize(bins);
        for (std::size_t b = 0; b < bins; ++b) out.axis[a].mass[b] = counts[a][b] / static_cast<double>(out.samples);
    }
    return out;
}

}  // namespace geomews
