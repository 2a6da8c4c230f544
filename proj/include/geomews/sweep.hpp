#pragma once

// One (b1, sigma) cell of the 2D model: committor, MFPT, separatrix and
// indicators, with optional reuse of solved fields through FieldCache.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geomews/bvp.hpp"
#include "geomews/contour.hpp"
#include "geomews/equilibria.hpp"
#include "geomews/generator.hpp"
#include "geomews/geometry.hpp"
#include "geomews/io.hpp"
#include "geomews/model.hpp"
#include "geomews/parallel.hpp"

namespace geomews {

struct CellSpec {
    ModelParams params;
    Box<2> domain = default_phyto_domain();
    std::size_t n = 141;
    Scheme scheme = Scheme::exponential_fitting;
    State<2> semi_axes{0.018, 0.008};
    double kappa = 1.0;
    double alpha = kDefaultAlpha;
    bool want_tau = true;

    /// Canonical text identifying a solved field of the given kind.
    std::string field_key(const char* kind) const {
        std::ostringstream s;
        const auto& p = params;
        s << kind << "|" << kVersion << "|phyto|" << fmt_double(p.a) << ',' << fmt_double(p.b) << ',' << fmt_double(p.s0) << ','
          << fmt_double(p.s1) << ',' << fmt_double(p.alpha1) << ',' << fmt_double(p.T0) << ',' << fmt_double(p.alpha2)
          << ',' << fmt_double(p.gamma) << ',' << fmt_double(p.mu) << ',' << fmt_double(p.b1) << ','
          << fmt_double(p.delta) << ',' << fmt_double(p.sigma_T) << ',' << fmt_double(p.sigma_u) << "|box|"
          << fmt_double(domain.lo[0]) << ',' << fmt_double(domain.lo[1]) << ',' << fmt_double(domain.hi[0]) << ','
          << fmt_double(domain.hi[1]) << "|n|" << n << "|scheme|" << to_string(scheme) << "|regions|"
          << fmt_double(semi_axes[0] * kappa) << ',' << fmt_double(semi_axes[1] * kappa);
        return s.str();
    }
};

struct CellResult {
    double b1 = 0.0;
    double sigma = 0.0;  // sigma_u
    Point2 e1{};
    Point2 e3{};
    std::optional<ScalarField<2>> q;
    std::optional<ScalarField<2>> tau;
    Polyline gamma;
    double ews = 0.0;
    double tau_avg = 0.0;
    double log_tau = 0.0;
};

struct RegionPair {
    Point2 e1{};
    Point2 e3{};
    EllipseRegion<2> source;
    EllipseRegion<2> target;
};

/// Background and bloom neighbourhoods for the given parameters.
inline RegionPair basin_regions(const ModelParams& p, State<2> semi_axes, double kappa = 1.0) {
    const auto eq = find_equilibria(PhytoplanktonModel(p));
    const auto e1 = eq.background();
    const auto e3 = eq.bloom();
    if (!e1 || !e3 || e1->state == e3->state || !eq.saddle()) {
        throw NumericalError("not bistable at b1=" + fmt_double(p.b1));
    }
    const State<2> r{semi_axes[0] * kappa, semi_axes[1] * kappa};
    return RegionPair{e1->state, e3->state, EllipseRegion<2>(e1->state, r), EllipseRegion<2>(e3->state, r)};
}

inline CellResult compute_cell(const CellSpec& spec, const FieldCache& cache = {}) {
    const PhytoplanktonModel model(spec.params, spec.domain);
    const auto regions = basin_regions(spec.params, spec.semi_axes, spec.kappa);
    const auto grid = Grid<2>::uniform(spec.domain, spec.n);
    const std::string qkey = spec.field_key("committor");
    const std::string tkey = spec.field_key("mfpt");
    auto q = cache.load<2>(qkey);
    std::optional<ScalarField<2>> tau;
    if (spec.want_tau) tau = cache.load<2>(tkey);
    if (q && !(q->grid() == grid)) q.reset();
    if (tau && !(tau->grid() == grid)) tau.reset();
    if (!q || (spec.want_tau && !tau)) {
        const auto op = assemble_generator(model, grid, {spec.scheme});
        if (!q) {
            q = solve_committor(op, regions.source, regions.target);
            cache.store(qkey, *q);
        }
        if (spec.want_tau && !tau) {
            tau = solve_mfpt(op, regions.target);
            cache.store(tkey, *tau);
        }
    }
    CellResult r;
    r.b1 = spec.params.b1;
    r.sigma = spec.params.sigma_u;
    r.e1 = regions.e1;
    r.e3 = regions.e3;
    r.gamma = extract_separatrix(*q);
    r.ews = ews_geom(*q, r.gamma, spec.alpha);
    if (tau) {
        r.tau_avg = region_average(*tau, regions.source);
        r.log_tau = std::log(r.tau_avg);
    }
    r.q = std::move(q);
    r.tau = std::move(tau);
    return r;
}

/// Cells are independent; results come back in input order for any job count.
inline std::vector<CellResult> compute_cells(const std::vector<CellSpec>& specs, const FieldCache& cache = {},
                                             std::size_t jobs = 1, bool keep_fields = true) {
    std::vector<CellResult> out(specs.size());
    parallel_for(specs.size(), jobs, [&](std::size_t i) {
        out[i] = compute_cell(specs[i], cache);
        if (!keep_fields) {
            out[i].q.reset();
            out[i].tau.reset();
        }
    });
    return out;
}

/// sigma_T = ratio * sigma, sigma_u = sigma.
inline ModelParams with_noise(const ModelParams& p, double sigma, double t_ratio = 1.0) {
    ModelParams out = p;
    out.sigma_u = sigma;
    out.sigma_T = t_ratio * sigma;
    return out;
}

/// Domain enlarged by `fraction` of its extent on every side except u = 0.
inline Box<2> padded_domain(const Box<2>& d, double fraction) {
    Box<2> out = d;
    out.lo[0] -= fraction * d.extent(0);
    out.hi[0] += fraction * d.extent(0);
    out.hi[1] += fraction * d.extent(1);
    return out;
}

}  // namespace geomews
