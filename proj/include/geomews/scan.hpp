#pragma once

// b1 scans at fixed sigma: geometric indicators (EWS_geom, MDB, MDS) from
// committor fields, the classical time-series pair, and BIC breakpoints.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geomews/equilibria.hpp"
#include "geomews/indicators.hpp"
#include "geomews/regression.hpp"
#include "geomews/sweep.hpp"

namespace geomews {

inline std::vector<double> linspace_step(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("range needs step > 0 and hi >= lo");
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) v.push_back(lo + step * static_cast<double>(i));
    return v;
}

/// Default indicator scan grid 2.00:0.004:2.44.
inline std::vector<double> default_b1_scan() { return linspace_step(2.0, 2.44, 0.004); }

struct GeometricRow {
    double b1 = 0.0;
    double sigma = 0.0;
    double ews = 0.0;
    double mdb = std::numeric_limits<double>::quiet_NaN();
    double mds = std::numeric_limits<double>::quiet_NaN();
    std::size_t vertices = 0;
};

struct GeometricScanOptions {
    double sigma_ref = 0.005;
    bool with_mdb = true;
    bool with_mds = true;
    double det_step = 1e-3;
};

/// One row per b1. MDS needs a second committor solve at sigma_ref, shared
/// through the cache when the reference scan was run before.
inline std::vector<GeometricRow> geometric_scan(const CellSpec& base, const std::vector<double>& b1_grid, double sigma,
                                                const GeometricScanOptions& opt = {}, const FieldCache& cache = {},
                                                std::size_t jobs = 1) {
    std::vector<GeometricRow> rows(b1_grid.size());
    parallel_for(b1_grid.size(), jobs, [&](std::size_t i) {
        CellSpec spec = base;
        spec.params = with_noise(base.params.with_b1(b1_grid[i]), sigma);
        spec.want_tau = false;
        auto cell = compute_cell(spec, cache);
        GeometricRow& r = rows[i];
        r.b1 = b1_grid[i];
        r.sigma = sigma;
        r.ews = cell.ews;
        r.vertices = cell.gamma.size();
        if (opt.with_mdb) {
            const PhytoplanktonModel m(spec.params, spec.domain);
            r.mdb = curve_distance(cell.gamma, deterministic_separatrix(m, spec.domain, opt.det_step));
        }
        if (opt.with_mds) {
            if (sigma == opt.sigma_ref) {
                r.mds = 0.0;
            } else {
                CellSpec ref = spec;
                ref.params = with_noise(spec.params, opt.sigma_ref);
                r.mds = curve_distance(cell.gamma, compute_cell(ref, cache).gamma);
            }
        }
    });
    return rows;
}

/// Trajectory retention rule for the classical indicators.
enum class Retention {
    ellipse,  // stay inside R_E1 for the whole observation window
    basin,    // never enter R_E3
};

inline const char* to_string(Retention r) { return r == Retention::ellipse ? "ellipse" : "basin"; }

inline Retention retention_from_string(const std::string& s) {
    if (s == "ellipse") return Retention::ellipse;
    if (s == "basin") return Retention::basin;
    throw ConfigError("unknown retention rule '" + s + "' (expected ellipse or basin)");
}

struct ClassicRow {
    double b1 = 0.0;
    double sigma = 0.0;
    EnsembleEwsResult ews;
};

inline std::vector<ClassicRow> classic_scan(const ModelParams& base, const Box<2>& domain, const std::vector<double>& b1_grid,
                                            double sigma, const TimeseriesProtocol& proto, Retention rule,
                                            State<2> semi_axes = {0.018, 0.008}) {
    std::vector<ClassicRow> rows;
    for (double b1 : b1_grid) {
        const ModelParams p = with_noise(base.with_b1(b1), sigma);
        const PhytoplanktonModel m(p, domain);
        const auto regions = basin_regions(p, semi_axes);
        ClassicRow row{b1, sigma, {}};
        if (rule == Retention::ellipse) {
            row.ews = classic_ews(m, regions.source, regions.e1, proto);
        } else {
            row.ews = classic_ews(m, OutsideRegion<2>{regions.target}, regions.e1, proto);
        }
        rows.push_back(row);
    }
    return rows;
}

/// Hinge fit over the finite entries of y; nullopt when fewer than 6 remain.
inline std::optional<HingeFit> breakpoint_of(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(y[i])) {
            xs.push_back(x[i]);
            ys.push_back(y[i]);
        }
    }
    if (xs.size() < 6) return std::nullopt;
    return hinge_fit_bic(xs, ys);
}

}  // namespace geomews
