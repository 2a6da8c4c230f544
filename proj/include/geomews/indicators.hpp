#pragma once

// Classical time-series indicators (variance, lag-1 autocorrelation of the
// biomass) under conditional sampling inside the background neighbourhood.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "geomews/grid.hpp"
#include "geomews/simulate.hpp"

namespace geomews {

struct TimeseriesProtocol {
    double t_sim = 4000.0;
    double t_transient = 1000.0;
    double dt = 1e-2;
    double dt_obs = 1.0;
    std::size_t n_ens = 50;
    std::uint64_t seed = 20240502;
    std::size_t jobs = 1;
    /// Observed coordinate (1 = biomass u).
    std::size_t axis = 1;

    void validate() const {
        if (!(dt > 0.0) || !(dt_obs >= dt)) throw ConfigError("timeseries: need 0 < dt <= dt_obs");
        if (!(t_transient >= 0.0) || !(t_sim > t_transient)) throw ConfigError("timeseries: need 0 <= t_transient < t_sim");
        if (n_ens < 1) throw ConfigError("timeseries: n_ens must be >= 1");
        if (observations() < 3) throw ConfigError("timeseries: fewer than 3 observations");
    }
    std::size_t observations() const {
        return static_cast<std::size_t>(std::llround((t_sim - t_transient) / dt_obs));
    }
};

/// Unbiased sample variance.
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

/// Pearson correlation of (x_1..x_{M-1}) with (x_2..x_M); NaN for a constant series.
inline double lag1_autocorrelation(std::span<const double> x) {
    const std::size_t m = x.size();
    if (m < 3) return std::numeric_limits<double>::quiet_NaN();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        ma += x[i];
        mb += x[i + 1];
    }
    ma /= static_cast<double>(m - 1);
    mb /= static_cast<double>(m - 1);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = x[i] - ma;
        const double b = x[i + 1] - mb;
        sab += a * b;
        saa += a * a;
        sbb += b * b;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

struct SeriesStats {
    double variance = 0.0;
    double ac1 = 0.0;
    bool valid = false;  // false for degenerate (constant) series
};

inline SeriesStats series_stats(std::span<const double> x) {
    SeriesStats s;
    s.variance = sample_variance(x);
    s.ac1 = lag1_autocorrelation(x);
    s.valid = std::isfinite(s.variance) && s.variance > 0.0 && std::isfinite(s.ac1);
    return s;
}

struct EnsembleEwsResult {
    double log10_variance = std::numeric_limits<double>::quiet_NaN();  // mean of log10 Var over retained members
    double ac1 = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_valid = 0;
    std::size_t n_ens = 0;
    bool gap = true;
};

/// Complement of a region; used to retain trajectories that never reach a target.
template <std::size_t N>
struct OutsideRegion {
    EllipseRegion<N> region;
    bool contains(const State<N>& x) const { return !region.contains(x); }
};

/// Runs n_ens trajectories from x0; a member is retained only if its state
/// stays inside `stay` (any type with contains(x)) at every integration step
/// of the observation window.
template <SdeModel M, class Stay>
EnsembleEwsResult classic_ews(const M& model, const Stay& stay, const typename M::state_type& x0,
                              const TimeseriesProtocol& proto) {
    proto.validate();
    const auto steps = static_cast<std::uint64_t>(std::llround(proto.t_sim / proto.dt));
    const auto burn = static_cast<std::uint64_t>(std::llround(proto.t_transient / proto.dt));
    const auto every = static_cast<std::uint64_t>(std::llround(proto.dt_obs / proto.dt));
    const std::size_t m = proto.observations();
    std::vector<SeriesStats> member(proto.n_ens);
    std::vector<char> kept(proto.n_ens, 0);
    parallel_for(proto.n_ens, proto.jobs, [&](std::size_t i) {
        EulerMaruyama<M> em(model, proto.dt, make_engine(proto.seed, i));
        auto x = x0;
        std::vector<double> obs;
        obs.reserve(m);
        bool inside = true;
        for (std::uint64_t n = 1; n <= steps; ++n) {
            em.step(x);
            if (n <= burn) continue;
            if (!stay.contains(x)) {
                inside = false;
                break;
            }
            if ((n - burn) % every == 0 && obs.size() < m) obs.push_back(x[proto.axis]);
        }
        if (!inside) return;
        member[i] = series_stats(obs);
        kept[i] = member[i].valid ? 1 : 0;
    });
    EnsembleEwsResult out;
    out.n_ens = proto.n_ens;
    double lv = 0.0, ac = 0.0;
    for (std::size_t i = 0; i < proto.n_ens; ++i) {
        if (!kept[i]) continue;
        lv += std::log10(member[i].variance);
        ac += member[i].ac1;
        ++out.n_valid;
    }
    if (out.n_valid > 0) {
        out.log10_variance = lv / static_cast<double>(out.n_valid);
        out.ac1 = ac / static_cast<double>(out.n_valid);
        out.gap = false;
    }
    return out;
}

struct NormalizedScores {
    std::vector<double> values;  // NaN marks a gap
    bool warning = false;        // set when max == min
};

/// Min-max normalisation over the finite entries; NaN gaps are preserved.
inline NormalizedScores normalize_scores(std::span<const double> series) {
    NormalizedScores out;
    out.values.assign(series.begin(), series.end());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t finite = 0;
    for (double v : series) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++finite;
    }
    if (finite < 2) throw NumericalError("normalize_scores: need at least two non-gap values");
    for (double& v : out.values) {
        if (!std::isfinite(v)) {
            v = std::numeric_limits<double>::quiet_NaN();
        } else if (hi == lo) {
            v = 0.5;
        } else {
            v = (v - lo) / (hi - lo);
        }
    }
    out.warning = hi == lo;
    return out;
}

}  // namespace geomews
