// geomews command-line front end. Every subcommand reads the JSON config,
// writes seed-stamped CSV/JSON into the output directory and exits with
// 0 (ok), 2 (config), 3 (numerical or io) or 4 (no transitions observed).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "geomews/geomews.hpp"

namespace fs = std::filesystem;
using namespace geomews;

namespace {

struct Context {
    RunConfig cfg;
    std::string command;
    bool quiet = false;

    OutputHeader header() const { return {command, cfg.hash, cfg.seed}; }
    fs::path out(const std::string& name) const { return cfg.output_dir / name; }
    FieldCache cache() const { return FieldCache(cfg.cache_dir); }

    void log(const std::string& msg) const {
        if (!quiet) std::cerr << "[" << command << "] " << msg << "\n";
    }
};

Json json_header(const Context& ctx) {
    return Json{{"geomews_version", kVersion}, {"command", ctx.command}, {"config_hash", ctx.cfg.hash}, {"seed", ctx.cfg.seed}};
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

Json fit_json(const FitResult& f) {
    return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"n", f.n}};
}

Json scaling_json(const ScalingReport& r) {
    return Json{{"delta", r.delta},
                {"K", r.K},
                {"c1", r.c1},
                {"c2_fit", r.c2_fit},
                {"c2_pred", r.c2_pred},
                {"rel_err", r.rel_err},
                {"r2_i", r.tau_vs_inv_sigma2.r_squared},
                {"r2_ii", r.ews_vs_sigma.r_squared},
                {"r2_iii", r.tau_vs_inv_ews2.r_squared},
                {"fit_i", fit_json(r.tau_vs_inv_sigma2)},
                {"fit_ii", fit_json(r.ews_vs_sigma)},
                {"fit_iii", fit_json(r.tau_vs_inv_ews2)}};
}

std::string tag(double v) {
    std::string s = fmt_double(v);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

// ---------------------------------------------------------------- equilibria

int cmd_equilibria(const Context& ctx) {
    const auto& c = ctx.cfg;
    CsvWriter w(ctx.out("equilibria.csv"), ctx.header(),
                {"b1", "index", "T", "u", "stability", "eig1_re", "eig1_im", "eig2_re", "eig2_im"});
    for (double b1 : c.b1) {
        const auto eq = find_equilibria(PhytoplanktonModel(c.params.with_b1(b1), c.cell.domain));
        if (eq.empty_warning) ctx.log("warning: no equilibria found at b1=" + fmt_double(b1));
        long long k = 0;
        for (const auto& e : eq.equilibria) {
            w.row({b1, ++k, e.state[0], e.state[1], std::string(to_string(e.stability)), e.eigenvalues[0].real(),
                   e.eigenvalues[0].imag(), e.eigenvalues[1].real(), e.eigenvalues[1].imag()});
            ctx.log("b1=" + fmt_double(b1) + " E" + std::to_string(k) + "=(" + fmt_double(e.state[0]) + ", " +
                    fmt_double(e.state[1]) + ") " + to_string(e.stability));
        }
    }
    const auto win = bistable_window(c.params);
    Json j = json_header(ctx);
    j["bistable_window"] = {{"lower", win.lower}, {"upper", win.upper}};
    write_json(ctx.out("equilibria.json"), j);
    ctx.log("bistable window [" + fmt_double(win.lower) + ", " + fmt_double(win.upper) + "]");
    return 0;
}

// ---------------------------------------------------------------- bifurcation

int cmd_bifurcation(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto curve = bifurcation_curve(c.params, c.bifurcation.b1, c.bifurcation.sigmas, c.bifurcation.u_max,
                                         c.bifurcation.n, c.jobs);
    CsvWriter w(ctx.out("bifurcation.csv"), ctx.header(), {"b1", "sigma", "ubar", "q10", "q90"});
    for (const auto& p : curve.points) w.row({p.b1, p.sigma, p.ubar, p.q10, p.q90});
    CsvWriter d(ctx.out("branches.csv"), ctx.header(), {"b1", "e1_u", "e2_u", "e3_u"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& br : curve.branches) {
        d.row({br.b1, br.e1 ? br.e1->state[1] : nan, br.e2 ? br.e2->state[1] : nan, br.e3 ? br.e3->state[1] : nan});
    }
    if (c.svg) {
        std::vector<SvgSeries> s;
        for (std::size_t j = 0; j < curve.sigmas.size(); ++j) {
            SvgSeries line{"sigma=" + fmt_double(curve.sigmas[j]), {}, {}, false};
            for (std::size_t i = 0; i < curve.b1_grid.size(); ++i) {
                line.x.push_back(curve.b1_grid[i]);
                line.y.push_back(curve.points[i * curve.sigmas.size() + j].ubar);
            }
            s.push_back(line);
        }
        write_svg_plot(ctx.out("bifurcation.svg"), "Expected biomass", "b1", "E[u]", s);
    }
    ctx.log("wrote " + std::to_string(curve.points.size()) + " points");
    return 0;
}

// ---------------------------------------------------------------- marginals

int cmd_marginals(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto& m = c.marginals;
    const ModelParams p = with_noise(c.params.with_b1(m.b1), m.sigma);
    const PhytoplanktonModel model(p, c.cell.domain);
    const auto eq = find_equilibria(model);
    const auto e1 = eq.background();
    if (!e1) throw NumericalError("no stable background state at b1=" + fmt_double(m.b1));
    SimConfig sim = c.mc.sim;
    sim.t_max = m.t_max;
    const auto hist = stationary_histogram(model, e1->state, sim, m.burn_in, m.bins);
    const auto dens = stationary_density_1d(Reduced1DModel(p), m.sigma, c.cell.domain.hi[1], c.bifurcation.n);
    CsvWriter w(ctx.out("marginals.csv"), ctx.header(), {"source", "axis", "x", "density"});
    const char* names[] = {"T", "u"};
    for (std::size_t a = 0; a < 2; ++a) {
        const auto& h = hist.axis[a];
        for (std::size_t b = 0; b < h.mass.size(); ++b) {
            const double width = h.edges[b + 1] - h.edges[b];
            w.row({std::string("simulation"), std::string(names[a]), 0.5 * (h.edges[b] + h.edges[b + 1]), h.mass[b] / width});
        }
    }
    for (std::size_t i = 0; i < dens.u.size(); ++i) w.row({std::string("fpe_reduced"), std::string("u"), dens.u[i], dens.p[i]});
    ctx.log("samples=" + std::to_string(hist.samples));
    return 0;
}

// ---------------------------------------------------------------- separatrix

int cmd_separatrix(const Context& ctx, bool with_fields) {
    const auto& c = ctx.cfg;
    CsvWriter w(ctx.out("separatrix.csv"), ctx.header(), {"b1", "sigma", "T", "u", "s"});
    CsvWriter d(ctx.out("deterministic_separatrix.csv"), ctx.header(), {"b1", "sigma", "T", "u", "s"});
    CsvWriter sumw(ctx.out("separatrix_summary.csv"), ctx.header(), {"b1", "sigma", "vertices", "length", "ews_geom", "mdb"});
    const auto cache = ctx.cache();
    for (double b1 : c.b1) {
        const PhytoplanktonModel m(c.params.with_b1(b1), c.cell.domain);
        const auto det = deterministic_separatrix(m, c.cell.domain, c.geometric.det_step);
        write_polyline_csv(d, b1, 0.0, det);
        std::vector<CellSpec> specs;
        for (double s : c.scan_sigmas) {
            CellSpec spec = c.cell;
            spec.params = with_noise(c.params.with_b1(b1), s);
            spec.want_tau = false;
            specs.push_back(spec);
        }
        const auto cells = compute_cells(specs, cache, c.jobs, with_fields);
        for (const auto& cell : cells) {
            write_polyline_csv(w, b1, cell.sigma, cell.gamma);
            sumw.row({b1, cell.sigma, static_cast<long long>(cell.gamma.size()), cell.gamma.length(), cell.ews,
                      curve_distance(cell.gamma, det)});
            if (with_fields && cell.q) {
                write_field_csv(ctx.out("committor_b1_" + tag(b1) + "_sigma_" + tag(cell.sigma) + ".csv"), ctx.header(), *cell.q);
            }
        }
    }
    return 0;
}

// ---------------------------------------------------------------- indicators

int cmd_indicators(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto cache = ctx.cache();
    CsvWriter w(ctx.out("indicators.csv"), ctx.header(),
                {"b1", "sigma", "ews_geom", "ews_geom_norm", "mdb", "mds", "log10var", "ac1", "n_valid", "gap"});
    CsvWriter bw(ctx.out("breakpoints.csv"), ctx.header(), {"indicator", "sigma", "breakpoint", "lower", "upper"});
    Json report = json_header(ctx);
    report["retention"] = to_string(c.retention);
    report["breakpoints"] = Json::array();
    const auto add_break = [&](const std::string& name, double sigma, const std::vector<double>& y) {
        const auto h = breakpoint_of(c.b1_scan, y);
        if (!h) {
            ctx.log("no breakpoint for " + name + " at sigma=" + fmt_double(sigma) + " (fewer than 6 values)");
            return;
        }
        bw.row({name, sigma, h->breakpoint, h->lower, h->upper});
        report["breakpoints"].push_back(
            {{"indicator", name}, {"sigma", sigma}, {"breakpoint", h->breakpoint}, {"lower", h->lower}, {"upper", h->upper}});
    };
    std::vector<SvgSeries> plot;
    for (double sigma : c.scan_sigmas) {
        ctx.log("geometric scan sigma=" + fmt_double(sigma));
        const auto geo = geometric_scan(c.cell, c.b1_scan, sigma, c.geometric, cache, c.jobs);
        std::vector<double> ews;
        for (const auto& r : geo) ews.push_back(r.ews);
        const auto norm = normalize_scores(ews);
        std::vector<ClassicRow> classic;
        if (c.classic) {
            ctx.log("classic scan sigma=" + fmt_double(sigma) + " retention=" + to_string(c.retention));
            TimeseriesProtocol proto = c.timeseries;
            classic = classic_scan(c.params, c.cell.domain, c.b1_scan, sigma, proto, c.retention,
                                   {c.cell.semi_axes[0] * c.cell.kappa, c.cell.semi_axes[1] * c.cell.kappa});
        }
        std::vector<double> lv, ac;
        for (std::size_t i = 0; i < geo.size(); ++i) {
            const auto& g = geo[i];
            EnsembleEwsResult e;
            if (!classic.empty()) e = classic[i].ews;
            lv.push_back(e.log10_variance);
            ac.push_back(e.ac1);
            w.row({g.b1, sigma, g.ews, norm.values[i], g.mdb, g.mds, e.log10_variance, e.ac1,
                   static_cast<long long>(e.n_valid), static_cast<long long>(e.gap ? 1 : 0)});
        }
        add_break("ews_geom", sigma, ews);
        if (c.classic) {
            add_break("log10var", sigma, lv);
            add_break("ac1", sigma, ac);
        }
        plot.push_back({"sigma=" + fmt_double(sigma), c.b1_scan, norm.values, false});
    }
    write_json(ctx.out("breakpoints.json"), report);
    if (c.svg) write_svg_plot(ctx.out("indicators.svg"), "Normalised EWS_geom", "b1", "score", plot);
    return 0;
}

// ---------------------------------------------------------------- scaling

int cmd_scaling(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto cache = ctx.cache();
    CsvWriter w(ctx.out("scaling.csv"), ctx.header(),
                {"b1", "sigma", "ews_geom", "tau_fdm", "log_tau_fdm", "tau_mc", "mc_se", "censored_fraction", "n_traj",
                 "log_tau_mc"});
    Json report = json_header(ctx);
    report["runs"] = Json::array();
    for (double b1 : c.b1) {
        std::vector<CellSpec> specs;
        for (double s : c.sigma) {
            CellSpec spec = c.cell;
            spec.params = with_noise(c.params.with_b1(b1), s);
            specs.push_back(spec);
        }
        ctx.log("FDM sweep b1=" + fmt_double(b1));
        const auto cells = compute_cells(specs, cache, c.jobs, false);
        std::vector<double> sig, lt, ews;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& cell = cells[i];
            sig.push_back(cell.sigma);
            lt.push_back(cell.log_tau);
            ews.push_back(cell.ews);
            std::optional<MfptEstimate> mc;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            if (c.mc.enabled && cell.sigma >= c.mc.min_sigma) {
                SimConfig sim = c.mc.sim;
                sim.n_traj = c.mc.n_for(cell.sigma);
                const auto regions = basin_regions(specs[i].params, c.cell.semi_axes, c.cell.kappa);
                const PhytoplanktonModel model(specs[i].params, c.cell.domain);
                ctx.log("MC sigma=" + fmt_double(cell.sigma) + " n=" + std::to_string(sim.n_traj));
                try {
                    mc = mc_mfpt(model, regions.source, regions.target, sim);
                } catch (const NoTransitionsError& e) {
                    ctx.log(std::string("MC: ") + e.what());
                }
            }
            w.row({b1, cell.sigma, cell.ews, cell.tau_avg, cell.log_tau, mc ? mc->mean : nan, mc ? mc->std_error : nan,
                   mc ? mc->censored_fraction : nan, static_cast<long long>(mc ? mc->n : 0),
                   mc ? std::log(mc->mean) : nan});
        }
        const auto rep = scaling_pipeline(sig, lt, ews);
        const auto val = validity_check(sig, ews, c.params.separable_diffusion(), c.validity_tolerance);
        Json r = scaling_json(rep);
        r["b1"] = b1;
        r["sigma_max"] = val.sigma_max;
        r["separable_diffusion"] = val.separable;
        r["ews_over_sigma"] = val.ratio;
        report["runs"].push_back(r);
        if (c.svg) {
            std::vector<double> x;
            for (double e : ews) x.push_back(1.0 / (e * e));
            write_svg_plot(ctx.out("scaling_b1_" + tag(b1) + ".svg"), "log<tau> vs 1/EWS^2", "1/EWS_geom^2", "log<tau>",
                           {{"b1=" + fmt_double(b1), x, lt, true}});
        }
        ctx.log("b1=" + fmt_double(b1) + " c2_fit=" + fmt_double(rep.c2_fit) + " c2_pred=" + fmt_double(rep.c2_pred) +
                " R2(iii)=" + fmt_double(rep.tau_vs_inv_ews2.r_squared) + " sigma_max=" + fmt_double(val.sigma_max));
    }
    write_json(ctx.out("scaling_report.json"), report);
    return 0;
}

// ---------------------------------------------------------------- robustness

int cmd_robustness(const Context& ctx) {
    const auto& c = ctx.cfg;
    CsvWriter w(ctx.out("robustness.csv"), ctx.header(), {"b1", "test", "variation", "slope", "slope_change_pct", "r_squared", "status"});
    for (double b1 : c.b1) {
        CellSpec base = c.cell;
        base.params = c.params.with_b1(b1);
        const auto rows = robustness_suite(base, c.sigma, default_variations(base), ctx.cache(), c.jobs);
        for (const auto& r : rows) {
            w.row({b1, r.test, r.variation, r.slope, r.slope_change_pct, r.r_squared, r.ok ? std::string("ok") : r.error});
            ctx.log(r.test + " / " + r.variation + ": " + (r.ok ? fmt_double(r.slope_change_pct) + "%" : r.error));
        }
    }
    return 0;
}

// ---------------------------------------------------------------- schlogl

int cmd_schlogl(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto res = schlogl_pipeline(c.schlogl, c.sigma, c.jobs);
    CsvWriter w(ctx.out("schlogl.csv"), ctx.header(), {"sigma", "tau_avg", "log_tau", "ews_geom", "separatrix"});
    for (const auto& cell : res.cells) w.row({cell.sigma, cell.tau_avg, cell.log_tau, cell.ews, cell.separatrix});
    Json j = json_header(ctx);
    j["report"] = scaling_json(res.report);
    write_json(ctx.out("schlogl.json"), j);
    ctx.log("delta=" + fmt_double(res.report.delta) + " K=" + fmt_double(res.report.K) + " c2_fit=" +
            fmt_double(res.report.c2_fit) + " c2_pred=" + fmt_double(res.report.c2_pred) + " rel_err=" +
            fmt_double(res.report.rel_err));
    return 0;
}

void write_error(const fs::path& dir, const std::string& command, const char* kind, int code, const std::string& msg) {
    const Json e{{"error", {{"command", command}, {"kind", kind}, {"exit_code", code}, {"message", msg}}}};
    std::cerr << e.dump() << "\n";
    std::error_code ec;
    if (!dir.empty() && (fs::create_directories(dir, ec), fs::is_directory(dir, ec))) {
        std::ofstream out(dir / "error.json");
        if (out) out << e.dump(2) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric early-warning analysis of noise-induced transitions"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<double> b1;
    std::optional<std::size_t> jobs;
    std::string out_dir;
    bool svg = false;
    bool quiet = false;
    app.add_option("-c,--config", config_path, "JSON configuration file");
    app.add_option("--b1", b1, "Override the sweep b1 list with a single value");
    app.add_option("-j,--jobs", jobs, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
    app.add_option("-o,--out", out_dir, "Output directory");
    app.add_flag("--svg", svg, "Also write SVG plots");
    app.add_flag("-q,--quiet", quiet, "No progress messages");

    bool fields = false;
    auto* eq = app.add_subcommand("equilibria", "Equilibria, stability and the bistable window");
    auto* bif = app.add_subcommand("bifurcation", "Expectation-centred stochastic bifurcation diagram");
    auto* mar = app.add_subcommand("marginals", "Stationary marginals from simulation and the reduced density");
    auto* sep = app.add_subcommand("separatrix", "Stochastic and deterministic separatrices");
    sep->add_flag("--fields", fields, "Also write committor fields as CSV");
    auto* ind = app.add_subcommand("indicators", "EWS_geom, MDB, MDS, variance, AC1 and breakpoints over b1");
    auto* sca = app.add_subcommand("scaling", "log<tau> vs 1/EWS_geom^2 with FDM and Monte Carlo");
    auto* rob = app.add_subcommand("robustness", "Robustness of the scaling slope");
    auto* sch = app.add_subcommand("schlogl", "Scaling pipeline on the Schlogl model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    fs::path out_path = out_dir;
    try {
        Json j = Json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config file " + config_path);
            try {
                j = Json::parse(in, nullptr, true, true);
            } catch (const Json::parse_error& e) {
                throw ConfigError("config parse error in " + config_path + ": " + e.what());
            }
        }
        if (b1) j["sweep"]["b1"] = Json::array({*b1});
        if (jobs) j["jobs"] = *jobs;
        if (!out_dir.empty()) j["output"]["dir"] = out_dir;
        if (svg) j["output"]["svg"] = true;
        Context ctx{parse_config(j), command, quiet};
        out_path = ctx.cfg.output_dir;
        fs::create_directories(ctx.cfg.output_dir);
        if (sep->parsed()) return cmd_separatrix(ctx, fields);
        if (eq->parsed()) return cmd_equilibria(ctx);
        if (bif->parsed()) return cmd_bifurcation(ctx);
        if (mar->parsed()) return cmd_marginals(ctx);
        if (ind->parsed()) return cmd_indicators(ctx);
        if (sca->parsed()) return cmd_scaling(ctx);
        if (rob->parsed()) return cmd_robustness(ctx);
        if (sch->parsed()) return cmd_schlogl(ctx);
        throw ConfigError("unknown command");
    } catch (const Error& e) {
        write_error(out_path, command, e.kind(), e.exit_code(), e.what());
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        write_error(out_path, command, "io", 3, e.what());
        return 3;
    } catch (const std::exception& e) {
        write_error(out_path, command, "numerical", 3, e.what());
        return 3;
    }
}
