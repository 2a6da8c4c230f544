#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "geomews/core.hpp"

namespace geomews {

/// Uniform node-based grid. Axis 0 varies fastest in the flat node index.
template <std::size_t N>
class Grid {
public:
    using Index = std::array<std::size_t, N>;

    Grid(Box<N> bounds, Index n) : bounds_(bounds), n_(n) {
        total_ = 1;
        for (std::size_t k = 0; k < N; ++k) {
            if (n_[k] < 3) throw ConfigError("grid needs at least 3 nodes per axis");
            if (!(bounds_.hi[k] > bounds_.lo[k])) throw ConfigError("grid bounds are empty");
            h_[k] = bounds_.extent(k) / static_cast<double>(n_[k] - 1);
            total_ *= n_[k];
        }
    }

    /// Same node count on every axis.
    static Grid uniform(Box<N> bounds, std::size_t n) {
        Index idx;
        idx.fill(n);
        return Grid(bounds, idx);
    }

    const Box<N>& bounds() const { return bounds_; }
    std::size_t n(std::size_t axis) const { return n_[axis]; }
    const Index& shape() const { return n_; }
    double spacing(std::size_t axis) const { return h_[axis]; }
    std::size_t size() const { return total_; }

    double coord(std::size_t axis, std::size_t i) const {
        // Pin the last node exactly on the upper bound.
        if (i + 1 == n_[axis]) return bounds_.hi[axis];
        return bounds_.lo[axis] + static_cast<double>(i) * h_[axis];
    }

    std::size_t flat(const Index& idx) const {
        std::size_t k = 0;
        std::size_t stride = 1;
        for (std::size_t a = 0; a < N; ++a) {
            k += idx[a] * stride;
            stride *= n_[a];
        }
        return k;
    }

    Index unflat(std::size_t k) const {
        Index idx{};
        for (std::size_t a = 0; a < N; ++a) {
            idx[a] = k % n_[a];
            k /= n_[a];
        }
        return idx;
    }

    State<N> node(std::size_t k) const {
        const Index idx = unflat(k);
        State<N> x{};
        for (std::size_t a = 0; a < N; ++a) x[a] = coord(a, idx[a]);
        return x;
    }

    std::size_t stride(std::size_t axis) const {
        std::size_t s = 1;
        for (std::size_t a = 0; a < axis; ++a) s *= n_[a];
        return s;
    }

    bool operator==(const Grid& o) const {
        for (std::size_t a = 0; a < N; ++a) {
            if (n_[a] != o.n_[a] || bounds_.lo[a] != o.bounds_.lo[a] || bounds_.hi[a] != o.bounds_.hi[a])
                return false;
        }
        return true;
    }

private:
    Box<N> bounds_;
    Index n_;
    State<N> h_{};
    std::size_t total_ = 0;
};

/// Node values on a grid (committor q or mean first passage time tau).
template <std::size_t N>
class ScalarField {
public:
    ScalarField(Grid<N> grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size()) throw NumericalError("field size does not match grid");
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (!std::isfinite(values_[k])) throw NumericalError("non-finite field value at node " + std::to_string(k));
        }
    }

    const Grid<N>& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }

    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }

    ScalarField clamped(double lo, double hi) const {
        std::vector<double> v(values_);
        for (double& x : v) x = std::clamp(x, lo, hi);
        return ScalarField(grid_, std::move(v));
    }

    ScalarField complement() const {
        std::vector<double> v(values_);
        for (double& x : v) x = 1.0 - x;
        return ScalarField(grid_, std::move(v));
    }

    /// Multilinear interpolation; points outside the grid are clamped onto it.
    double interpolate(const State<N>& x) const {
        std::array<std::size_t, N> base{};
        std::array<double, N> w{};
        for (std::size_t a = 0; a < N; ++a) {
            const double h = grid_.spacing(a);
            double t = (x[a] - grid_.bounds().lo[a]) / h;
            t = std::clamp(t, 0.0, static_cast<double>(grid_.n(a) - 1));
            std::size_t i = static_cast<std::size_t>(std::floor(t));
            if (i + 1 >= grid_.n(a)) i = grid_.n(a) - 2;
            base[a] = i;
            w[a] = t - static_cast<double>(i);
        }
        double acc = 0.0;
        for (std::size_t corner = 0; corner < (std::size_t{1} << N); ++corner) {
            std::array<std::size_t, N> idx{};
            double wt = 1.0;
            for (std::size_t a = 0; a < N; ++a) {
                const bool up = (corner >> a) & 1U;
                idx[a] = base[a] + (up ? 1 : 0);
                wt *= up ? w[a] : 1.0 - w[a];
            }
            if (wt != 0.0) acc += wt * values_[grid_.flat(idx)];
        }
        return acc;
    }

private:
    Grid<N> grid_;
    std::vector<double> values_;
};

/// Axis-aligned ellipse (an interval in 1D), intersected with the grid box.
template <std::size_t N>
struct EllipseRegion {
    State<N> center{};
    State<N> semi_axes{};

    EllipseRegion(State<N> c, State<N> r) : center(c), semi_axes(r) {
        for (double v : semi_axes) {
            if (!(v > 0.0)) throw ConfigError("ellipse semi-axes must be positive");
        }
    }

    bool contains(const State<N>& x) const {
        double s = 0.0;
        for (std::size_t a = 0; a < N; ++a) {
            const double z = (x[a] - center[a]) / semi_axes[a];
            s += z * z;
        }
        return s <= 1.0;
    }

    EllipseRegion scaled(double kappa) const {
        State<N> r = semi_axes;
        for (double& v : r) v *= kappa;
        return EllipseRegion(center, r);
    }

    /// Flags of grid nodes inside the region.
    std::vector<char> mask(const Grid<N>& grid) const {
        std::vector<char> m(grid.size(), 0);
        for (std::size_t k = 0; k < grid.size(); ++k) m[k] = contains(grid.node(k)) ? 1 : 0;
        return m;
    }
};

}  // namespace geomews
