#pragma once

// The same committor / MFPT / EWS pipeline applied to the 1D Schlogl model.

#include <cmath>
#include <vector>

#include "geomews/bvp.hpp"
#include "geomews/generator.hpp"
#include "geomews/geometry.hpp"
#include "geomews/model.hpp"
#include "geomews/parallel.hpp"
#include "geomews/scaling.hpp"

namespace geomews {

struct SchloglSpec {
    double x1 = 0.2;
    double x2 = 0.5;
    double x3 = 0.8;
    Box<1> domain{{0.0}, {1.0}};
    std::size_t n = 4001;
    double radius = 0.015;
    double alpha = kDefaultAlpha;
    Scheme scheme = Scheme::exponential_fitting;
};

struct SchloglCell {
    double sigma = 0.0;
    double tau_avg = 0.0;
    double log_tau = 0.0;
    double ews = 0.0;
    double separatrix = 0.0;  // x where q = 1/2
};

inline SchloglCell schlogl_cell(const SchloglSpec& spec, double sigma) {
    const SchloglModel model(spec.x1, spec.x2, spec.x3, sigma, spec.domain);
    const auto grid = Grid<1>::uniform(spec.domain, spec.n);
    const EllipseRegion<1> source(State<1>{spec.x1}, State<1>{spec.radius});
    const EllipseRegion<1> target(State<1>{spec.x3}, State<1>{spec.radius});
    const auto op = assemble_generator(model, grid, {spec.scheme});
    const auto q = solve_committor(op, source, target);
    const auto tau = solve_mfpt(op, target);
    SchloglCell c;
    c.sigma = sigma;
    c.tau_avg = region_average(tau, source);
    c.log_tau = std::log(c.tau_avg);
    c.ews = ews_geom_1d(q, spec.alpha);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = q[i] - 0.5;
        const double b = q[i + 1] - 0.5;
        if ((a < 0.0) != (b < 0.0)) {
            const double t = a / (a - b);
            c.separatrix = grid.node(i)[0] + t * grid.spacing(0);
            break;
        }
    }
    return c;
}

struct SchloglResult {
    std::vector<SchloglCell> cells;
    ScalingReport report;
};

inline SchloglResult schlogl_pipeline(const SchloglSpec& spec, const std::vector<double>& sigmas, std::size_t jobs = 1) {
    SchloglResult r;
    r.cells.resize(sigmas.size());
    parallel_for(sigmas.size(), jobs, [&](std::size_t i) { r.cells[i] = schlogl_cell(spec, sigmas[i]); });
    std::vector<double> s, lt, e;
    for (const auto& c : r.cells) {
        s.push_back(c.sigma);
        lt.push_back(c.log_tau);
        e.push_back(c.ews);
    }
    r.report = scaling_pipeline(s, lt, e);
    return r;
}

}  // namespace geomews
