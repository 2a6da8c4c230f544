#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "geomews/core.hpp"

namespace geomews {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

namespace detail {

inline void check_xy(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
    if (x.size() != y.size()) throw NumericalError("regression: x and y differ in length");
    if (x.size() < min_n) throw NumericalError("regression: insufficient points");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw NumericalError("regression: non-finite data");
    }
}

inline double r_squared(std::span<const double> y, double rss) {
    double m = 0.0;
    for (double v : y) m += v;
    m /= static_cast<double>(y.size());
    double tss = 0.0;
    for (double v : y) tss += (v - m) * (v - m);
    if (!(tss > 0.0)) return rss > 0.0 ? 0.0 : 1.0;
    return 1.0 - rss / tss;
}

}  // namespace detail

/// Ordinary least squares y = intercept + slope x.
inline FitResult linear_fit(std::span<const double> x, std::span<const double> y) {
    detail::check_xy(x, y, 2);
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw NumericalError("linear_fit: x is constant");
    FitResult f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += r * r;
    }
    f.r_squared = detail::r_squared(y, rss);
    return f;
}

/// Least squares y = slope x without intercept. R^2 uses the centred total sum of squares.
inline FitResult fit_through_origin(std::span<const double> x, std::span<const double> y) {
    detail::check_xy(x, y, 1);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    if (!(sxx > 0.0)) throw NumericalError("fit_through_origin: x is identically zero");
    FitResult f;
    f.n = x.size();
    f.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.slope * x[i];
        rss += r * r;
    }
    f.r_squared = detail::r_squared(y, rss);
    return f;
}

struct HingeFit {
    double breakpoint = 0.0;
    double lower = 0.0;  // warning interval: candidates with BIC <= min + 2
    double upper = 0.0;
    double left_slope = 0.0;
    double right_slope = 0.0;
    double intercept = 0.0;
    std::vector<double> candidates;
    std::vector<double> bic;
};

inline constexpr int kHingeParams = 4;  // three coefficients and the noise variance

/// RSS of y = b0 + b1 x + b2 max(0, x - k); also returns the coefficients.
inline double hinge_rss(std::span<const double> x, std::span<const double> y, double k, Eigen::Vector3d* coef = nullptr) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        A(i, 0) = 1.0;
        A(i, 1) = x[u];
        A(i, 2) = std::max(0.0, x[u] - k);
        b(i) = y[u];
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
    if (coef) *coef = c;
    return (A * c - b).squaredNorm();
}

/// Continuous two-segment fit; every interior sample is a candidate breakpoint
/// and BIC(k) = n ln(RSS/n) + 4 ln n selects the optimum.
inline HingeFit hinge_fit_bic(std::span<const double> x, std::span<const double> y) {
    detail::check_xy(x, y, 6);
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw NumericalError("hinge_fit_bic: x must be strictly increasing");
    }
    const auto n = static_cast<double>(x.size());
    HingeFit h;
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double rss = std::max(hinge_rss(x, y, x[i]), 1e-300);
        h.candidates.push_back(x[i]);
        h.bic.push_back(n * std::log(rss / n) + kHingeParams * std::log(n));
        if (h.bic.back() < h.bic[best]) best = h.bic.size() - 1;
    }
    h.breakpoint = h.candidates[best];
    h.lower = h.breakpoint;
    h.upper = h.breakpoint;
    for (std::size_t i = 0; i < h.bic.size(); ++i) {
        if (h.bic[i] <= h.bic[best] + 2.0) {
            h.lower = std::min(h.lower, h.candidates[i]);
            h.upper = std::max(h.upper, h.candidates[i]);
        }
    }
    Eigen::Vector3d c;
    hinge_rss(x, y, h.breakpoint, &c);
    h.intercept = c(0);
    h.left_slope = c(1);
    h.right_slope = c(1) + c(2);
    return h;
}

}  // namespace geomews
