#pragma once

// Committor and mean-first-passage-time boundary-value problems for the
// discretised generator, solved by sparse LU.

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "geomews/generator.hpp"
#include "geomews/grid.hpp"

namespace geomews {

namespace detail {

// Replaces the rows of Dirichlet nodes by identity rows and solves A x = b.
template <std::size_t N>
std::vector<double> solve_dirichlet(const DiscreteOperator<N>& op, const std::vector<char>& fixed,
                                    const std::vector<double>& rhs) {
    const int n = static_cast<int>(op.grid.size());
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(static_cast<std::size_t>(op.matrix.nonZeros()));
    for (int r = 0; r < n; ++r) {
        if (fixed[static_cast<std::size_t>(r)]) {
            trip.emplace_back(r, r, 1.0);
            continue;
        }
        for (SparseMatrix::InnerIterator it(op.matrix, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
    }
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NumericalError("singular linear system: " + lu.lastErrorMessage());
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw NumericalError("sparse LU solve failed");

    // One step of iterative refinement, then the relative residual contract.
    const auto rel_residual = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
        r = b - A * v;
        double a_norm = 0.0;
        for (int c = 0; c < A.outerSize(); ++c) {
            for (decltype(A)::InnerIterator it(A, c); it; ++it) a_norm = std::max(a_norm, std::abs(it.value()));
        }
        const double scale = a_norm * v.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
        return scale > 0.0 ? r.lpNorm<Eigen::Infinity>() / scale : 0.0;
    };
    Eigen::VectorXd r;
    double res = rel_residual(x, r);
    if (res > 1e-13) {
        x += lu.solve(r);
        res = rel_residual(x, r);
    }
    if (!(res < 1e-10)) throw NumericalError("linear solve residual too large: " + std::to_string(res));
    return std::vector<double>(x.data(), x.data() + n);
}

template <std::size_t N>
std::vector<char> region_mask(const Grid<N>& grid, const EllipseRegion<N>& region, const char* name) {
    std::vector<char> m = region.mask(grid);
    std::size_t count = 0;
    for (char c : m) count += c ? 1 : 0;
    if (count == 0) throw NumericalError(std::string("region ") + name + " contains no grid node");
    return m;
}

// 1D tridiagonal generator with zero row sums: the increments d_i = tau_{i+1} - tau_i
// obey c_i d_i - a_i d_{i-1} = -1, which is swept from a reflecting end with only
// same-sign terms. Unlike LU this keeps full relative accuracy when tau spans many
// orders of magnitude. Returns false when the structure does not apply.
inline bool solve_mfpt_1d(const DiscreteOperator<1>& op, const std::vector<char>& in_tgt, std::vector<double>& tau) {
    const std::size_t n = op.grid.size();
    std::vector<double> a(n, 0.0), c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0.0;
        for (SparseMatrix::InnerIterator it(op.matrix, static_cast<int>(i)); it; ++it) {
            const auto j = static_cast<std::size_t>(it.col());
            if (j + 1 == i) {
                a[i] = it.value();
            } else if (j == i + 1) {
                c[i] = it.value();
            } else if (j == i) {
                diag = it.value();
            } else if (it.value() != 0.0) {
                return false;
            }
        }
        if (a[i] < 0.0 || c[i] < 0.0) return false;
        if (std::abs(diag + a[i] + c[i]) > 1e-10 * (std::abs(diag) + 1.0)) return false;
    }
    tau.assign(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        if (in_tgt[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && !in_tgt[j + 1]) ++j;
        const bool left_wall = i == 0;
        const bool right_wall = j + 1 == n;
        if (left_wall == right_wall) return false;  // no target at all, or targets on both sides
        if (left_wall) {
            // d_{k} for k = i..j, tau_{j+1} = 0.
            std::vector<double> d(j - i + 1);
            double prev = 0.0;
            for (std::size_t k = i; k <= j; ++k) {
                if (!(c[k] > 0.0)) return false;
                prev = (a[k] * prev - 1.0) / c[k];
                d[k - i] = prev;
            }
            double acc = 0.0;
            for (std::size_t k = j + 1; k-- > i;) {
                acc -= d[k - i];
                tau[k] = acc;
            }
        } else {
            // e_k = tau_k - tau_{k-1}... swept from the right wall, tau_{i-1} = 0.
            std::vector<double> e(j - i + 1);
            double next = 0.0;
            for (std::size_t k = j + 1; k-- > i;) {
                if (!(a[k] > 0.0)) return false;
                next = (c[k] * next - 1.0) / a[k];
                e[k - i] = next;
            }
            double acc = 0.0;
            for (std::size_t k = i; k <= j; ++k) {
                acc -= e[k - i];
                tau[k] = acc;
            }
        }
        i = j + 1;
    }
    return true;
}

}  // namespace detail

/// q = 0 on the source region, q = 1 on the target region, L q = 0 elsewhere.
/// The returned field is not truncated to [0, 1].
template <std::size_t N>
ScalarField<N> solve_committor(const DiscreteOperator<N>& op, const EllipseRegion<N>& source,
                               const EllipseRegion<N>& target) {
    const auto in_src = detail::region_mask(op.grid, source, "source");
    const auto in_tgt = detail::region_mask(op.grid, target, "target");
    std::vector<char> fixed(op.grid.size(), 0);
    std::vector<double> rhs(op.grid.size(), 0.0);
    for (std::size_t k = 0; k < fixed.size(); ++k) {
        if (in_src[k] && in_tgt[k]) throw NumericalError("source and target regions overlap");
        fixed[k] = in_src[k] || in_tgt[k];
        if (in_tgt[k]) rhs[k] = 1.0;
    }
    auto q = detail::solve_dirichlet(op, fixed, rhs);
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (in_src[k]) q[k] = 0.0;
        if (in_tgt[k]) q[k] = 1.0;
    }
    return ScalarField<N>(op.grid, std::move(q));
}

/// tau = 0 on the target region, L tau = -1 elsewhere.
template <std::size_t N>
ScalarField<N> solve_mfpt(const DiscreteOperator<N>& op, const EllipseRegion<N>& target) {
    const auto in_tgt = detail::region_mask(op.grid, target, "target");
    std::vector<double> rhs(op.grid.size(), -1.0);
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (in_tgt[k]) rhs[k] = 0.0;
    }
    std::vector<double> tau;
    bool done = false;
    if constexpr (N == 1) done = detail::solve_mfpt_1d(op, in_tgt, tau);
    if (!done) tau = detail::solve_dirichlet(op, in_tgt, rhs);
    // Rounding is relative to the largest value, which can be astronomically large at weak noise.
    double top = 1.0;
    for (double v : tau) top = std::max(top, std::abs(v));
    for (std::size_t k = 0; k < tau.size(); ++k) {
        if (in_tgt[k]) tau[k] = 0.0;
        if (tau[k] < 0.0) {
            if (tau[k] < -1e-9 * top)
                throw NumericalError("negative mean first passage time at node " + std::to_string(k));
            tau[k] = 0.0;
        }
    }
    return ScalarField<N>(op.grid, std::move(tau));
}

/// Arithmetic mean of node values inside the region.
template <std::size_t N>
double region_average(const ScalarField<N>& field, const EllipseRegion<N>& region) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < field.grid().size(); ++k) {
        if (region.contains(field.grid().node(k))) {
            sum += field[k];
            ++count;
        }
    }
    if (count == 0) throw NumericalError("region_average: region contains no grid node");
    return sum / static_cast<double>(count);
}

}  // namespace geomews
