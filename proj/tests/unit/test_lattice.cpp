#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dnls/lattice.hpp"
#include "dnls/timestep.hpp"
#include "test_support.hpp"

using namespace dnls;
using dnls::oracle::Gen;

namespace {

constexpr double pi = std::numbers::pi;

LatticeConfig mi_lattice() { return LatticeConfig::from_nodes(50, 100, 1.5, -1.5); }

}  // namespace

TEST(LatticeConfig, DerivesSpacingAndCoupling) {
    const auto cfg = LatticeConfig::from_nodes(200, 400, 0.0025, -0.01);
    EXPECT_DOUBLE_EQ(cfg.h(), 1.0);
    EXPECT_DOUBLE_EQ(cfg.k(), 1.0);
    EXPECT_EQ(cfg.central_index(), 200);

    const auto fine = LatticeConfig::from_spacing(10, 0.5, 1.0, -1.0);
    EXPECT_EQ(fine.N(), 40);
    EXPECT_DOUBLE_EQ(fine.k(), 4.0);
}

TEST(LatticeConfig, RejectsBadGeometry) {
    EXPECT_THROW(LatticeConfig::from_nodes(10, 3, 1, -1), ConfigError);
    EXPECT_THROW(LatticeConfig::from_nodes(-1, 10, 1, -1), InputError);
    EXPECT_THROW(LatticeConfig::from_spacing(10, 0.3, 1, -1), InputError);
    EXPECT_THROW(LatticeConfig::from_nodes(10, 21, 1, -1).central_index(), InputError);
}

TEST(ComplexState, RejectsNonFiniteEntries) {
    EXPECT_THROW(ComplexState({cplx{1, 0}, cplx{std::nan(""), 0}}), ValidationError);
    EXPECT_THROW(ComplexState({cplx{0, INFINITY}}), ValidationError);
    EXPECT_NO_THROW(ComplexState({cplx{1, 2}}));
}

TEST(Gate, CriticalAmplitudeValues) {
    EXPECT_EQ(critical_amplitude(1.5, -1.5), 1.0);
    EXPECT_EQ(critical_amplitude(0.0025, -0.01), 0.5);
    EXPECT_EQ(critical_amplitude(0.01, -0.01), 1.0);
    EXPECT_THROW(critical_amplitude(0.0, -1.0), DomainError);
    EXPECT_THROW(critical_amplitude(1.0, 0.5), DomainError);
}

TEST(Gate, SolvabilityAndGeneralized) {
    EXPECT_TRUE(solvability_gate(0.5, 0.0025, -0.01, 1e-12));
    EXPECT_FALSE(solvability_gate(0.6, 0.0025, -0.01, 1e-12));
    EXPECT_THROW(solvability_gate(0.5, 0.0025, -0.01, 0.0), DomainError);

    const auto ok = GeneralizedBCSpec::make(std::polar(1.0, 0.3), std::polar(1.0, -1.2), 1.0);
    EXPECT_TRUE(generalized_gate(ok, 1.5, -1.5, 1e-12));
    const auto off = GeneralizedBCSpec::make(std::polar(1.0, 0.3), std::polar(1.0, -1.2), 1.1);
    EXPECT_FALSE(generalized_gate(off, 1.5, -1.5, 1e-12));
    EXPECT_THROW(GeneralizedBCSpec::make(1.0, 2.0, 1.0), DomainError);

    const auto bg = BackgroundSpec::make(0.5, 0.0025, -0.01);
    EXPECT_TRUE(bg.is_critical(1e-14));
}

TEST(Rhs, LaplacianOfPlaneWaveIsEigen) {
    const auto cfg = LatticeConfig::from_spacing(8, 0.5, 1, -1);
    const auto grid = NodeGrid::from(cfg);
    for (int K : {0, 1, 5, cfg.N() / 2}) {
        const auto u = make_initial_condition(PlaneWaveIC{1.0, 0.0, K}, grid);
        const auto lap = discrete_laplacian(u, cfg);
        const double s = std::sin(pi * K / cfg.N());
        const double eig = -4.0 * cfg.k() * s * s;
        for (std::size_t n = 0; n < u.size(); ++n) {
            EXPECT_NEAR(std::abs(lap[n] - eig * u[n]), 0.0, 1e-12) << "K=" << K;
        }
    }
}

TEST(Rhs, DnlsMatchesNaiveOracle) {
    Gen gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 2 * gen.integer(2, 40);
        const double h = gen.uniform(0.2, 2.0);
        const auto cfg = LatticeConfig::from_nodes(N * h / 2, N, gen.uniform(0.01, 2), -gen.uniform(0.01, 2));
        const auto u = gen.state(N, 2.0);
        const auto got = dnls_rhs(u, cfg);
        const auto want = oracle::naive_dnls_rhs(u, cfg.k(), cfg.gamma(), cfg.delta());
        EXPECT_LT(oracle::max_abs_diff(got.values(), want), 1e-11 * (1 + cfg.k()));
    }
}

TEST(Rhs, AlMatchesNaiveOracle) {
    Gen gen(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int N = gen.integer(4, 60);
        const auto cfg = LatticeConfig::from_nodes(N / 2.0, N, 1, -1);
        const auto p = gen.state(N, 1.5);
        EXPECT_LT(oracle::max_abs_diff(al_rhs(p, cfg).values(), oracle::naive_al_rhs(p, cfg.k())),
                  1e-12);
    }
}

TEST(Rhs, BoundaryModesAreEnforced) {
    const auto per = mi_lattice();
    const auto dir = per.with_boundary(Boundary::DirichletZero);
    const auto u = ComplexState::zeros(per.N());
    EXPECT_THROW(dnls_rhs(u, dir), ConfigError);
    EXPECT_THROW(al_rhs(u, dir), ConfigError);
    EXPECT_THROW(shifted_rhs(u, per, 1.0), ConfigError);
    EXPECT_THROW(dnls_rhs(ComplexState::zeros(7), per), LengthMismatch);
}

TEST(Rhs, ShiftedVanishesOnlyAtCriticalBackground) {
    const auto cfg = LatticeConfig::from_nodes(200, 400, 0.0025, -0.01, Boundary::DirichletZero);
    const auto zero = ComplexState::zeros(cfg.N());
    const double A_star = 0.5;
    double at_star = 0.0;
    for (auto v : shifted_rhs(zero, cfg, A_star).values()) at_star = std::max(at_star, std::abs(v));
    EXPECT_LT(at_star, 1e-14);
    for (double A : {0.4, 0.6}) {
        double off = 0.0;
        for (auto v : shifted_rhs(zero, cfg, A).values()) off = std::max(off, std::abs(v));
        EXPECT_GT(off, 1e-4);
    }
}

// Power balance: d/dt ||u||^2 = 2 g ||u||^2 + 2 d h sum |u|^4 holds exactly
// for the right-hand side, since the conservative part is norm preserving.
TEST(Property, DnlsPowerBalanceIdentity) {
    Gen gen(21);
    for (int trial = 0; trial < 50; ++trial) {
        const int N = gen.integer(4, 80);
        const auto cfg = LatticeConfig::from_nodes(N / 2.0, N, gen.uniform(0.01, 3), -gen.uniform(0.01, 3));
        const auto u = gen.state(N, 1.5);
        const auto f = dnls_rhs(u, cfg);
        double lhs = 0.0, p2 = 0.0, p4 = 0.0;
        for (std::size_t n = 0; n < u.size(); ++n) {
            lhs += 2.0 * std::real(std::conj(u[n]) * f[n]);
            p2 += std::norm(u[n]);
            p4 += std::norm(u[n]) * std::norm(u[n]);
        }
        const double rhs = 2.0 * cfg.gamma() * p2 + 2.0 * cfg.delta() * p4;
        EXPECT_NEAR(lhs, rhs, 1e-11 * (std::abs(rhs) + p2 * cfg.k()));
        EXPECT_LT(instantaneous_balance_residual(u, cfg), 1e-10 * (1 + p4 + p2 * cfg.k()));
    }
}

// The AL flow conserves h sum ln(1 + |phi|^2) pointwise in state space.
TEST(Property, AlInvariantHasZeroDerivative) {
    Gen gen(22);
    for (int trial = 0; trial < 50; ++trial) {
        const int N = gen.integer(4, 80);
        const auto cfg = LatticeConfig::from_nodes(N / 2.0, N, 1, -1);
        const auto p = gen.state(N, 2.0);
        const auto f = al_rhs(p, cfg);
        double d = 0.0, scale = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) {
            const double term = 2.0 * std::real(std::conj(p[n]) * f[n]) / (1.0 + std::norm(p[n]));
            d += term;
            scale += std::abs(term);
        }
        EXPECT_NEAR(d, 0.0, 1e-12 * (1.0 + scale));
    }
}

TEST(Property, ShiftedRhsIsGaugeImageOfDnls) {
    // With zero Dirichlet ghosts and node values far from the edges, the
    // shifted right-hand side equals the gauge-transformed DNLS one.
    Gen gen(23);
    const auto per = LatticeConfig::from_nodes(20, 40, 0.0025, -0.01);
    const auto dir = per.with_boundary(Boundary::DirichletZero);
    const double A = 0.5;
    for (int trial = 0; trial < 10; ++trial) {
        const double t = gen.uniform(0, 5);
        std::vector<cplx> U(40);
        for (int n = 5; n < 35; ++n) U[n] = {gen.uniform(-0.3, 0.3), gen.uniform(-0.3, 0.3)};
        const ComplexState Us(U, t);
        const auto u = shifted_to_physical(Us, A);
        const auto Ud = shifted_rhs(Us, dir, A);
        const auto ud = dnls_rhs(u, per);
        const cplx phase = std::polar(1.0, A * A * t);
        for (int n = 2; n < 38; ++n) {
            // u' = (U' + i A^2 (U + A)) e^{i A^2 t}
            const cplx want = (Ud[n] + cplx{0, A * A} * (U[n] + A)) * phase;
            EXPECT_NEAR(std::abs(want - ud[n]), 0.0, 1e-13);
        }
    }
}

TEST(GaugeMaps, RoundTrip) {
    Gen gen(24);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = gen.state(16, 1.0);
        s.set_t(gen.uniform(-10, 10));
        const double A = gen.uniform(0.1, 2);
        const auto back = physical_to_shifted(shifted_to_physical(s, A), A);
        EXPECT_LT(oracle::max_abs_diff(back.values(), s.values()), 1e-13);
    }
}

TEST(InitialConditions, ShapesAndValidation) {
    const auto cfg = LatticeConfig::from_nodes(200, 400, 0.0025, -0.01);
    const auto grid = NodeGrid::from(cfg);
    const int c = cfg.central_index();
    EXPECT_DOUBLE_EQ(grid.x[c], 0.0);

    const auto alg = make_initial_condition(AlgebraicBumpIC{0.5, 1, 1, 4}, grid);
    EXPECT_DOUBLE_EQ(alg[c].real(), 1.5);
    EXPECT_DOUBLE_EQ(alg[c + 1].real(), 0.5 + 1.0 / 5.0);

    const auto sech_ic = make_initial_condition(SechBumpIC{0.5, 0.6, 1}, grid);
    EXPECT_DOUBLE_EQ(sech_ic[c].real(), 1.1);
    EXPECT_NEAR(sech_ic[0].real(), 0.5, 1e-80);

    const auto pw = make_initial_condition(PlaneWaveIC{1.0, 2.0, 7}, grid);
    for (auto v : pw.values()) EXPECT_NEAR(std::abs(v), 3.0, 1e-14);
    // exp(i q x_n) at x = 0 is 1
    EXPECT_NEAR(std::abs(pw[c] - cplx{3.0, 0.0}), 0.0, 1e-13);

    EXPECT_THROW(make_initial_condition(PlaneWaveIC{1.0, 0.0, 201}, grid), WavenumberError);
    EXPECT_THROW(make_initial_condition(PlaneWaveIC{1.0, 0.0, -1}, grid), WavenumberError);
    EXPECT_THROW(make_initial_condition(AlgebraicBumpIC{0.5, 1, 0, 4}, grid), DomainError);
    EXPECT_DOUBLE_EQ(background_amplitude(PlaneWaveIC{1.0, -0.999, 45}), 1.0 - 0.999);
    EXPECT_EQ(sech(800.0), 0.0);
}
