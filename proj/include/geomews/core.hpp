#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace geomews {

template <std::size_t N>
using State = std::array<double, N>;

/// Axis-aligned box [lo, hi] in N dimensions.
template <std::size_t N>
struct Box {
    State<N> lo{};
    State<N> hi{};

    double extent(std::size_t axis) const { return hi[axis] - lo[axis]; }

    bool contains(const State<N>& x, double tol = 0.0) const {
        for (std::size_t k = 0; k < N; ++k) {
            if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
        }
        return true;
    }
};

// Error hierarchy. The CLI maps each family onto a stable exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const { return 3; }
    virtual const char* kind() const { return "numerical"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 2; }
    const char* kind() const override { return "config"; }
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Raised when a state or coefficient leaves the set where the model is defined.
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* kind() const override { return "domain"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const override { return "io"; }
};

class NoTransitionsError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
    const char* kind() const override { return "no_transitions"; }
};

template <std::size_t N>
bool all_finite(const State<N>& x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

template <std::size_t N>
double norm2(const State<N>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace geomews
