#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geomews/equilibria.hpp"
#include "geomews/model.hpp"

using namespace geomews;

namespace {

// Independent transcription of the drift, used as an oracle.
std::array<double, 2> hand_drift(double T, double u, double b1) {
    const double a = 1.0, b = 0.3, s0 = 0.1, s1 = 0.95, alpha1 = 3.0, T0 = 1.0, alpha2 = 1.0, gamma = 1.0, mu = 0.1;
    const double S = s0 + (s1 - s0) * std::exp(-alpha1 * u);
    const double g = b1 * std::exp(-T0 / T) * std::exp(-alpha2 * T);
    return {(-a * std::pow(T, 4) + b * (1.0 - S)) / gamma, u * (g - mu - u)};
}

// Interior equilibria of the reduced model satisfy b1 = (mu + u) / G(T*(u)) with
// G(T) = exp(-T0/T - alpha2 T). The saddle-node is the minimum of that curve over
// u > 0 and the transcritical point is its value at u = 0.
double b1_on_curve(double u) {
    const ModelParams p;
    const double S = p.s0 + (p.s1 - p.s0) * std::exp(-p.alpha1 * u);
    const double T = std::pow(p.b * (1.0 - S) / p.a, 0.25);
    return (p.mu + u) / std::exp(-p.T0 / T - p.alpha2 * T);
}

double saddle_node_oracle() {
    double lo = 1e-6, hi = 0.2;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        (b1_on_curve(m1) < b1_on_curve(m2) ? hi : lo) = (b1_on_curve(m1) < b1_on_curve(m2) ? m2 : m1);
    }
    return b1_on_curve(0.5 * (lo + hi));
}

}  // namespace

TEST(PhytoplanktonModel, DriftMatchesHandFormula) {
    ModelParams p;
    const PhytoplanktonModel m(p);
    const auto f = m.drift({0.45, 0.05});
    const auto g = hand_drift(0.45, 0.05, 2.1);
    EXPECT_NEAR(f[0], g[0], 1e-12);
    EXPECT_NEAR(f[1], g[1], 1e-12);
}

TEST(PhytoplanktonModel, BiomassDriftVanishesOnAxis) {
    const PhytoplanktonModel m;
    for (double T : {0.3, 0.41, 0.5, 0.6}) EXPECT_EQ(m.drift({T, 0.0})[1], 0.0);
}

TEST(PhytoplanktonModel, DriftVanishesAtBackgroundState) {
    const PhytoplanktonModel m;
    const auto e1 = find_equilibria(m).background();
    ASSERT_TRUE(e1);
    EXPECT_LT(std::hypot(m.drift(e1->state)[0], m.drift(e1->state)[1]), 1e-10);
    // The three-decimal value quoted for E1 leaves a residual of about 6e-6 in F_T.
    EXPECT_LT(std::hypot(m.drift({0.350, 0.0})[0], m.drift({0.350, 0.0})[1]), 1e-5);
}

TEST(PhytoplanktonModel, JacobianMatchesFiniteDifferences) {
    const PhytoplanktonModel m;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> T(0.3, 0.6), U(0.0, 0.13);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const State<2> x{T(rng), U(rng)};
        const auto J = m.jacobian(x);
        for (int c = 0; c < 2; ++c) {
            State<2> xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            const auto fp = m.drift(xp), fm = m.drift(xm);
            for (int r = 0; r < 2; ++r) {
                const double fd = (fp[r] - fm[r]) / (2 * h);
                const double an = J[2 * r + c];
                EXPECT_LE(std::abs(an - fd), 1e-5 * std::max(1.0, std::abs(fd))) << "entry " << r << c;
            }
        }
    }
}

TEST(PhytoplanktonModel, NoiseFactorPositiveAndIncreasing) {
    const PhytoplanktonModel m;
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double u = 0.0013 * i;
        const double g = m.noise({0.4, u})[1];
        EXPECT_GT(g, prev);
        prev = g;
    }
}

TEST(PhytoplanktonModel, RejectsInvalidParameters) {
    ModelParams p;
    p.delta = 0.0;
    EXPECT_THROW(PhytoplanktonModel{p}, ConfigError);
    p = {};
    p.sigma_u = -1.0;
    EXPECT_THROW(PhytoplanktonModel{p}, ConfigError);
}

TEST(Equilibria, ThreeStatesAtDefaultB1) {
    const auto eq = find_equilibria(PhytoplanktonModel());
    ASSERT_EQ(eq.equilibria.size(), 3u);
    const auto e1 = eq.background(), e2 = eq.saddle(), e3 = eq.bloom();
    ASSERT_TRUE(e1 && e2 && e3);
    EXPECT_NEAR(e1->state[0], 0.350, 1e-3);
    EXPECT_NEAR(e1->state[1], 0.000, 1e-3);
    EXPECT_NEAR(e2->state[0], 0.395, 1e-3);
    EXPECT_NEAR(e2->state[1], 0.012, 1e-3);
    EXPECT_NEAR(e3->state[0], 0.511, 1e-3);
    EXPECT_NEAR(e3->state[1], 0.078, 1e-3);
}

TEST(Equilibria, MonostableBelowWindow) {
    const auto eq = find_equilibria(PhytoplanktonModel(ModelParams{}.with_b1(1.9)));
    EXPECT_EQ(eq.count(Stability::stable), 1u);
    ASSERT_TRUE(eq.background());
    EXPECT_LT(eq.background()->state[1], 1e-9);
    // Reduced-drift oracle: g(T*(u)) - mu - u has no positive root at b1 = 1.9.
    for (int i = 1; i <= 20000; ++i) EXPECT_GT(b1_on_curve(1e-5 * i), 1.9);
}

TEST(Equilibria, WindowEndpointsMatchReducedOracle) {
    const auto w = bistable_window(ModelParams{});
    EXPECT_NEAR(w.lower, saddle_node_oracle(), 1e-5);
    EXPECT_NEAR(w.upper, b1_on_curve(0.0), 1e-5);
}

TEST(Equilibria, StableCountAlongB1Scan) {
    const double lo = saddle_node_oracle(), hi = b1_on_curve(0.0);
    for (int i = 0; i <= 400; ++i) {
        const double b1 = 1.8 + 0.002 * i;
        if (std::abs(b1 - lo) < 2e-3 || std::abs(b1 - hi) < 2e-3) continue;
        const auto eq = find_equilibria(PhytoplanktonModel(ModelParams{}.with_b1(b1)));
        const bool inside = b1 > lo && b1 < hi;
        EXPECT_EQ(eq.count(Stability::stable), inside ? 2u : 1u) << "b1=" << b1;
        if (inside) {
            EXPECT_EQ(eq.equilibria.size(), 3u) << "b1=" << b1;
        }
    }
}

TEST(Equilibria, DeterministicSeparatrixThroughSaddle) {
    const PhytoplanktonModel m;
    const auto box = default_phyto_domain();
    const auto sep = deterministic_separatrix(m, box, 1e-3);
    const auto e2 = find_equilibria(m).saddle()->state;
    double best = 1.0;
    for (const auto& v : sep.vertices()) {
        best = std::min(best, std::hypot(v[0] - e2[0], v[1] - e2[1]));
        EXPECT_TRUE(box.contains(v, 1e-12));
    }
    EXPECT_LT(best, 1e-3);
    EXPECT_THROW(deterministic_separatrix(PhytoplanktonModel(ModelParams{}.with_b1(1.9)), box, 1e-3), NumericalError);
}

TEST(Reduced1D, QuasiSteadyTemperature) {
    const Reduced1DModel r(ModelParams{});
    EXPECT_NEAR(r.t_star(0.0), 0.350, 1e-3);
    EXPECT_NEAR(r.t_star(10.0), std::pow(0.3 * 0.9, 0.25), 1e-6);
    for (double b1 : {1.9, 2.1, 2.5}) EXPECT_EQ(Reduced1DModel(ModelParams{}.with_b1(b1)).f(0.0), 0.0);
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double t = r.t_star(0.01 * i);
        EXPECT_GT(t, prev);
        prev = t;
    }
}

TEST(Schlogl, RootsAndSaddle) {
    const SchloglModel s(0.2, 0.5, 0.8, 0.01);
    EXPECT_EQ(s.f(0.2), 0.0);
    EXPECT_EQ(s.f(0.8), 0.0);
    EXPECT_EQ(s.f(0.5), 0.0);
    EXPECT_GT(s.df(0.5), 0.0);
    // -(0 - 0.2)(0 - 0.5)(0 - 0.8) = +0.08: the drift at 0 points back toward x1.
    EXPECT_NEAR(s.f(0.0), 0.08, 1e-15);
    EXPECT_THROW(SchloglModel(0.5, 0.2, 0.8, 0.01), ConfigError);
}

TEST(Schlogl, PotentialIsNegativeAntiderivative) {
    const SchloglModel s(0.2, 0.5, 0.8, 0.01);
    EXPECT_EQ(s.potential(0.2), 0.0);
    for (double x = 0.05; x < 1.0; x += 0.05) {
        const double h = 1e-5;
        EXPECT_NEAR(-(s.potential(x + h) - s.potential(x - h)) / (2 * h), s.f(x), 1e-9);
    }
}
