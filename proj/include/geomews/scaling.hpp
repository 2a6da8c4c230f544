#pragma once

// The geometric-temporal scaling relation log<tau> = c1 + c2 / EWS^2 and the
// fits, validity window and robustness harness around it.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "geomews/regression.hpp"
#include "geomews/sweep.hpp"

namespace geomews {

struct ScalingReport {
    FitResult tau_vs_inv_sigma2;  // (i)   slope = Delta
    FitResult ews_vs_sigma;       // (ii)  through origin, slope = K
    FitResult tau_vs_inv_ews2;    // (iii) slope = c2_fit, intercept = c1
    double delta = 0.0;
    double K = 0.0;
    double c1 = 0.0;
    double c2_fit = 0.0;
    double c2_pred = 0.0;
    double rel_err = 0.0;
};

inline ScalingReport scaling_pipeline(std::span<const double> sigma, std::span<const double> log_tau,
                                      std::span<const double> ews) {
    if (sigma.size() != log_tau.size() || sigma.size() != ews.size()) throw NumericalError("scaling: column length mismatch");
    if (sigma.size() < 5) throw NumericalError("scaling: insufficient points (need at least 5 sigma values)");
    std::vector<double> inv_s2, inv_e2;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (!(sigma[i] > 0.0) || !(ews[i] > 0.0)) throw NumericalError("scaling: sigma and EWS must be positive");
        inv_s2.push_back(1.0 / (sigma[i] * sigma[i]));
        inv_e2.push_back(1.0 / (ews[i] * ews[i]));
    }
    ScalingReport r;
    r.tau_vs_inv_sigma2 = linear_fit(inv_s2, log_tau);
    r.ews_vs_sigma = fit_through_origin(sigma, ews);
    r.tau_vs_inv_ews2 = linear_fit(inv_e2, log_tau);
    r.delta = r.tau_vs_inv_sigma2.slope;
    r.K = r.ews_vs_sigma.slope;
    r.c1 = r.tau_vs_inv_ews2.intercept;
    r.c2_fit = r.tau_vs_inv_ews2.slope;
    r.c2_pred = r.delta * r.K * r.K;
    r.rel_err = std::abs(r.c2_fit - r.c2_pred) / std::abs(r.c2_pred);
    return r;
}

struct ValidityResult {
    std::vector<double> ratio;      // EWS / sigma
    std::vector<double> deviation;  // |ratio - prefix mean| / prefix mean at the largest accepted prefix
    double sigma_max = 0.0;
    std::size_t count = 0;  // number of sigma values in the window
    bool separable = true;
};

/// Largest sigma such that every EWS/sigma ratio up to it lies within
/// `tolerance` of the mean ratio over that prefix. Sigmas must be increasing.
inline ValidityResult validity_check(std::span<const double> sigma, std::span<const double> ews, bool separable = true,
                                     double tolerance = 0.05) {
    if (sigma.size() != ews.size()) throw NumericalError("validity: column length mismatch");
    if (sigma.size() < 4) throw NumericalError("validity: need at least 4 sigma values");
    ValidityResult v;
    v.separable = separable;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (i > 0 && !(sigma[i] > sigma[i - 1])) throw NumericalError("validity: sigma must be increasing");
        v.ratio.push_back(ews[i] / sigma[i]);
    }
    const auto deviations = [&](std::size_t k) {
        double m = 0.0;
        for (std::size_t i = 0; i < k; ++i) m += v.ratio[i];
        m /= static_cast<double>(k);
        std::vector<double> d;
        for (std::size_t i = 0; i < k; ++i) d.push_back(std::abs(v.ratio[i] - m) / m);
        return d;
    };
    v.count = 1;
    for (std::size_t k = 2; k <= sigma.size(); ++k) {
        const auto d = deviations(k);
        if (*std::max_element(d.begin(), d.end()) < tolerance) {
            v.count = k;
        } else {
            break;
        }
    }
    v.sigma_max = sigma[v.count - 1];
    v.deviation = deviations(v.count);
    return v;
}

struct SigmaSweep {
    std::vector<double> sigma;
    std::vector<double> log_tau;
    std::vector<double> ews;
};

/// Runs compute_cell over sigma at fixed settings; sigma_T = t_ratio * sigma.
inline SigmaSweep run_sigma_sweep(const CellSpec& base, const std::vector<double>& sigmas, double t_ratio = 1.0,
                                  const FieldCache& cache = {}, std::size_t jobs = 1) {
    std::vector<CellSpec> specs;
    for (double s : sigmas) {
        CellSpec c = base;
        c.params = with_noise(base.params, s, t_ratio);
        c.want_tau = true;
        specs.push_back(c);
    }
    const auto cells = compute_cells(specs, cache, jobs, false);
    SigmaSweep out;
    for (const auto& c : cells) {
        out.sigma.push_back(c.sigma);
        out.log_tau.push_back(c.log_tau);
        out.ews.push_back(c.ews);
    }
    return out;
}

struct RobustnessRow {
    std::string test;
    std::string variation;
    double slope = 0.0;  // c2 of fit (iii)
    double slope_change_pct = 0.0;
    double r_squared = 0.0;
    bool ok = false;
    std::string error;
};

struct RobustnessVariation {
    std::string test;
    std::string variation;
    CellSpec spec;
    double t_ratio = 1.0;
};

inline std::vector<RobustnessVariation> default_variations(const CellSpec& base) {
    std::vector<RobustnessVariation> v;
    const auto add = [&](std::string test, std::string var, auto&& edit, double ratio = 1.0) {
        CellSpec s = base;
        edit(s);
        v.push_back({std::move(test), std::move(var), s, ratio});
    };
    add("grid", "101x101", [](CellSpec& s) { s.n = 101; });
    add("grid", "181x181", [](CellSpec& s) { s.n = 181; });
    add("domain", "+10% padding", [&](CellSpec& s) { s.domain = padded_domain(base.domain, 0.10); });
    add("domain", "+30% padding", [&](CellSpec& s) { s.domain = padded_domain(base.domain, 0.30); });
    add("regularisation", "delta=5e-5", [](CellSpec& s) { s.params.delta = 5e-5; });
    add("regularisation", "delta=2e-4", [](CellSpec& s) { s.params.delta = 2e-4; });
    for (double k : {0.5, 1.5, 2.0, 2.5, 3.0}) {
        add("neighbourhood", "kappa=" + fmt_double(k), [k](CellSpec& s) { s.kappa = k; });
    }
    add("noise", "sigma_T=2sigma_u", [](CellSpec&) {}, 2.0);
    add("noise", "sigma_T=0.5sigma_u", [](CellSpec&) {}, 0.5);
    return v;
}

/// Reruns the sigma sweep under each variation and compares the fitted c2
/// with the base run. A failed variation is recorded with its error message.
inline std::vector<RobustnessRow> robustness_suite(const CellSpec& base, const std::vector<double>& sigmas,
                                                   const std::vector<RobustnessVariation>& variations,
                                                   const FieldCache& cache = {}, std::size_t jobs = 1) {
    const auto b = run_sigma_sweep(base, sigmas, 1.0, cache, jobs);
    const auto base_fit = scaling_pipeline(b.sigma, b.log_tau, b.ews);
    std::vector<RobustnessRow> rows;
    rows.push_back({"base", "default", base_fit.c2_fit, 0.0, base_fit.tau_vs_inv_ews2.r_squared, true, ""});
    for (const auto& v : variations) {
        RobustnessRow row;
        row.test = v.test;
        row.variation = v.variation;
        try {
            const auto s = run_sigma_sweep(v.spec, sigmas, v.t_ratio, cache, jobs);
            const auto f = scaling_pipeline(s.sigma, s.log_tau, s.ews);
            row.slope = f.c2_fit;
            row.slope_change_pct = 100.0 * (f.c2_fit - base_fit.c2_fit) / base_fit.c2_fit;
            row.r_squared = f.tau_vs_inv_ews2.r_squared;
            row.ok = true;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace geomews
