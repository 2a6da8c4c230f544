#pragma once

// JSON run configuration. Every field is optional; missing fields keep the
// defaults below, unknown keys are rejected so typos do not pass silently.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geomews/indicators.hpp"
#include "geomews/io.hpp"
#include "geomews/scan.hpp"
#include "geomews/schlogl.hpp"
#include "geomews/simulate.hpp"
#include "geomews/sweep.hpp"

namespace geomews {

using Json = nlohmann::json;

struct McSettings {
    bool enabled = true;
    SimConfig sim;
    /// Per-sigma trajectory counts; sigmas not listed use sim.n_traj.
    std::map<double, std::size_t> n_traj_at;
    /// MC is skipped below this sigma (the mean passage time explodes).
    double min_sigma = 0.0;

    std::size_t n_for(double sigma) const {
        for (const auto& [s, n] : n_traj_at) {
            if (std::abs(s - sigma) <= 1e-12) return n;
        }
        return sim.n_traj;
    }
};

struct BifurcationSettings {
    std::vector<double> b1 = linspace_step(1.9, 2.6, 0.005);
    std::vector<double> sigmas{0.005, 0.01, 0.02};
    double u_max = 0.13;
    std::size_t n = 4001;
};

struct MarginalSettings {
    double b1 = 2.1;
    double sigma = 0.02;
    double t_max = 2e5;
    double burn_in = 1e3;
    std::size_t bins = 200;
};

struct RunConfig {
    std::string preset = "phyto";
    ModelParams params;
    CellSpec cell;  // params inside are overwritten per cell
    SchloglSpec schlogl;
    std::vector<double> b1{2.1};
    std::vector<double> sigma = linspace_step(0.005, 0.025, 0.0025);
    std::vector<double> b1_scan = default_b1_scan();
    std::vector<double> scan_sigmas{0.005, 0.01, 0.02};
    GeometricScanOptions geometric;
    McSettings mc;
    TimeseriesProtocol timeseries;
    Retention retention = Retention::basin;
    bool classic = true;
    double validity_tolerance = 0.05;
    BifurcationSettings bifurcation;
    MarginalSettings marginals;
    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir;
    bool svg = false;
    std::uint64_t seed = 20240501;
    std::size_t jobs = 1;
    std::string hash;  // FNV-1a of the canonical JSON text

    void validate() const;
};

namespace detail {

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

/// A list of numbers, or {"from", "to", "step"}.
inline void read_grid(const Json& j, const char* key, std::vector<double>& out, const std::string& where) {
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    try {
        if (v.is_array()) {
            out = v.get<std::vector<double>>();
        } else if (v.is_object()) {
            reject_unknown(v, {"from", "to", "step"}, where + "." + key);
            out = linspace_step(v.at("from").get<double>(), v.at("to").get<double>(), v.at("step").get<double>());
        } else if (v.is_number()) {
            out = {v.get<double>()};
        } else {
            throw ConfigError(where + "." + key + " must be a number, list or range");
        }
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
    if (out.empty()) throw ConfigError(where + "." + key + " is empty");
}

inline void read_params(const Json& j, ModelParams& p) {
    reject_unknown(j, {"a", "b", "s0", "s1", "alpha1", "T0", "alpha2", "gamma", "mu", "b1", "delta", "sigma_T", "sigma_u"},
                   "model.params");
    read(j, "a", p.a, "model.params");
    read(j, "b", p.b, "model.params");
    read(j, "s0", p.s0, "model.params");
    read(j, "s1", p.s1, "model.params");
    read(j, "alpha1", p.alpha1, "model.params");
    read(j, "T0", p.T0, "model.params");
    read(j, "alpha2", p.alpha2, "model.params");
    read(j, "gamma", p.gamma, "model.params");
    read(j, "mu", p.mu, "model.params");
    read(j, "b1", p.b1, "model.params");
    read(j, "delta", p.delta, "model.params");
    read(j, "sigma_T", p.sigma_T, "model.params");
    read(j, "sigma_u", p.sigma_u, "model.params");
}

}  // namespace detail

inline void RunConfig::validate() const {
    if (preset != "phyto" && preset != "schlogl") throw ConfigError("unknown model preset '" + preset + "'");
    params.validate();
    if (cell.n < 5) throw ConfigError("grid.n must be >= 5");
    if (!(cell.semi_axes[0] > 0.0 && cell.semi_axes[1] > 0.0 && cell.kappa > 0.0))
        throw ConfigError("region semi-axes and kappa must be > 0");
    if (!(cell.alpha > 0.0 && cell.alpha < 0.5)) throw ConfigError("alpha must lie in (0, 1/2)");
    for (int a = 0; a < 2; ++a) {
        if (!(cell.domain.hi[a] > cell.domain.lo[a])) throw ConfigError("domain must have hi > lo on every axis");
    }
    if (b1.empty() || sigma.empty() || b1_scan.empty() || scan_sigmas.empty()) throw ConfigError("sweep grids must be non-empty");
    for (double s : sigma)
        if (!(s > 0.0)) throw ConfigError("sweep sigmas must be > 0");
    for (double s : scan_sigmas)
        if (!(s > 0.0)) throw ConfigError("scan sigmas must be > 0");
    mc.sim.validate();
    timeseries.validate();
    if (schlogl.n < 5 || !(schlogl.radius > 0.0)) throw ConfigError("schlogl grid or radius invalid");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

inline RunConfig parse_config(const Json& j) {
    using detail::read;
    using detail::read_grid;
    using detail::reject_unknown;
    RunConfig c;
    reject_unknown(j, {"model", "grid", "regions", "schlogl", "sweep", "mc", "timeseries", "analysis", "bifurcation",
                       "marginals", "output", "seed", "jobs"},
                   "config");
    read(j, "seed", c.seed, "config");
    read(j, "jobs", c.jobs, "config");
    if (j.contains("model")) {
        const Json& m = j.at("model");
        reject_unknown(m, {"preset", "params", "domain"}, "model");
        read(m, "preset", c.preset, "model");
        if (m.contains("params")) detail::read_params(m.at("params"), c.params);
        if (m.contains("domain")) {
            const Json& d = m.at("domain");
            reject_unknown(d, {"T", "u"}, "model.domain");
            std::vector<double> t{c.cell.domain.lo[0], c.cell.domain.hi[0]};
            std::vector<double> u{c.cell.domain.lo[1], c.cell.domain.hi[1]};
            read(d, "T", t, "model.domain");
            read(d, "u", u, "model.domain");
            if (t.size() != 2 || u.size() != 2) throw ConfigError("model.domain axes must be [lo, hi]");
            c.cell.domain = Box<2>{{t[0], u[0]}, {t[1], u[1]}};
        }
    }
    if (j.contains("grid")) {
        const Json& g = j.at("grid");
        reject_unknown(g, {"n", "scheme"}, "grid");
        read(g, "n", c.cell.n, "grid");
        if (g.contains("scheme")) c.cell.scheme = scheme_from_string(g.at("scheme").get<std::string>());
    }
    if (j.contains("regions")) {
        const Json& r = j.at("regions");
        reject_unknown(r, {"semi_axes", "kappa"}, "regions");
        std::vector<double> ax{c.cell.semi_axes[0], c.cell.semi_axes[1]};
        read(r, "semi_axes", ax, "regions");
        if (ax.size() != 2) throw ConfigError("regions.semi_axes must have two entries");
        c.cell.semi_axes = {ax[0], ax[1]};
        read(r, "kappa", c.cell.kappa, "regions");
    }
    if (j.contains("schlogl")) {
        const Json& s = j.at("schlogl");
        reject_unknown(s, {"roots", "n", "radius", "domain", "scheme"}, "schlogl");
        std::vector<double> roots{c.schlogl.x1, c.schlogl.x2, c.schlogl.x3};
        read(s, "roots", roots, "schlogl");
        if (roots.size() != 3) throw ConfigError("schlogl.roots must have three entries");
        c.schlogl.x1 = roots[0];
        c.schlogl.x2 = roots[1];
        c.schlogl.x3 = roots[2];
        read(s, "n", c.schlogl.n, "schlogl");
        read(s, "radius", c.schlogl.radius, "schlogl");
        std::vector<double> dom{c.schlogl.domain.lo[0], c.schlogl.domain.hi[0]};
        read(s, "domain", dom, "schlogl");
        if (dom.size() != 2 || !(dom[1] > dom[0])) throw ConfigError("schlogl.domain must be [lo, hi] with hi > lo");
        c.schlogl.domain = Box<1>{{dom[0]}, {dom[1]}};
        if (s.contains("scheme")) c.schlogl.scheme = scheme_from_string(s.at("scheme").get<std::string>());
    }
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        reject_unknown(s, {"b1", "sigma", "b1_scan", "scan_sigmas", "sigma_ref"}, "sweep");
        read_grid(s, "b1", c.b1, "sweep");
        read_grid(s, "sigma", c.sigma, "sweep");
        read_grid(s, "b1_scan", c.b1_scan, "sweep");
        read_grid(s, "scan_sigmas", c.scan_sigmas, "sweep");
        read(s, "sigma_ref", c.geometric.sigma_ref, "sweep");
    }
    if (j.contains("mc")) {
        const Json& m = j.at("mc");
        reject_unknown(m, {"enabled", "dt", "t_max", "n_traj", "n_traj_at", "min_sigma"}, "mc");
        read(m, "enabled", c.mc.enabled, "mc");
        read(m, "dt", c.mc.sim.dt, "mc");
        read(m, "t_max", c.mc.sim.t_max, "mc");
        read(m, "n_traj", c.mc.sim.n_traj, "mc");
        read(m, "min_sigma", c.mc.min_sigma, "mc");
        if (m.contains("n_traj_at")) {
            const Json& a = m.at("n_traj_at");
            if (!a.is_array()) throw ConfigError("mc.n_traj_at must be a list of [sigma, n] pairs");
            for (const auto& e : a) {
                if (!e.is_array() || e.size() != 2) throw ConfigError("mc.n_traj_at entries must be [sigma, n]");
                c.mc.n_traj_at[e[0].get<double>()] = e[1].get<std::size_t>();
            }
        }
    }
    if (j.contains("timeseries")) {
        const Json& t = j.at("timeseries");
        reject_unknown(t, {"enabled", "t_sim", "t_transient", "dt", "dt_obs", "n_ens", "seed", "retention"}, "timeseries");
        read(t, "enabled", c.classic, "timeseries");
        read(t, "t_sim", c.timeseries.t_sim, "timeseries");
        read(t, "t_transient", c.timeseries.t_transient, "timeseries");
        read(t, "dt", c.timeseries.dt, "timeseries");
        read(t, "dt_obs", c.timeseries.dt_obs, "timeseries");
        read(t, "n_ens", c.timeseries.n_ens, "timeseries");
        read(t, "seed", c.timeseries.seed, "timeseries");
        if (t.contains("retention")) c.retention = retention_from_string(t.at("retention").get<std::string>());
    }
    if (j.contains("analysis")) {
        const Json& a = j.at("analysis");
        reject_unknown(a, {"alpha", "validity_tolerance", "mdb", "mds", "det_step"}, "analysis");
        read(a, "alpha", c.cell.alpha, "analysis");
        read(a, "validity_tolerance", c.validity_tolerance, "analysis");
        read(a, "mdb", c.geometric.with_mdb, "analysis");
        read(a, "mds", c.geometric.with_mds, "analysis");
        read(a, "det_step", c.geometric.det_step, "analysis");
    }
    if (j.contains("bifurcation")) {
        const Json& b = j.at("bifurcation");
        reject_unknown(b, {"b1", "sigmas", "u_max", "n"}, "bifurcation");
        read_grid(b, "b1", c.bifurcation.b1, "bifurcation");
        read_grid(b, "sigmas", c.bifurcation.sigmas, "bifurcation");
        read(b, "u_max", c.bifurcation.u_max, "bifurcation");
        read(b, "n", c.bifurcation.n, "bifurcation");
    }
    if (j.contains("marginals")) {
        const Json& m = j.at("marginals");
        reject_unknown(m, {"b1", "sigma", "t_max", "burn_in", "bins"}, "marginals");
        read(m, "b1", c.marginals.b1, "marginals");
        read(m, "sigma", c.marginals.sigma, "marginals");
        read(m, "t_max", c.marginals.t_max, "marginals");
        read(m, "burn_in", c.marginals.burn_in, "marginals");
        read(m, "bins", c.marginals.bins, "marginals");
    }
    if (j.contains("output")) {
        const Json& o = j.at("output");
        reject_unknown(o, {"dir", "cache_dir", "svg"}, "output");
        std::string dir = c.output_dir.string();
        std::string cache;
        read(o, "dir", dir, "output");
        read(o, "cache_dir", cache, "output");
        read(o, "svg", c.svg, "output");
        c.output_dir = dir;
        c.cache_dir = cache;
    }
    c.mc.sim.seed = c.seed;
    c.mc.sim.jobs = c.jobs;
    c.timeseries.jobs = c.jobs;
    c.cell.params = c.params;
    // Job count and output location do not change results, so they stay out of the hash.
    Json keyed = j;
    keyed.erase("jobs");
    keyed.erase("output");
    c.hash = hex64(fnv1a(keyed.dump()));
    c.validate();
    return c;
}

inline RunConfig default_config() { return parse_config(Json::object()); }

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace geomews
