#pragma once

// Ablowitz-Ladik side of the comparison: the discrete Peregrine soliton, the
// AL conserved quantity and its l2 bound, and the DNLS/AL distance curves
// with their analytic upper estimates.

#include <optional>
#include <utility>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/timestep.hpp"

namespace dnls {

struct DpsParams {
    double q = 0.5;   ///< background amplitude
    double t0 = 0.0;  ///< time of the peak
};

/// Discrete Peregrine soliton of the AL lattice with k = 1. Throws
/// ConfigError unless the grid spacing is 1.
ComplexState dps_eval(const NodeGrid& grid, double t, const DpsParams& params);

/// Density of the dPS at (x, t) = (0, t0): q^2 (3 + 4 q^2)^2.
double dps_peak_density(double q) noexcept;

/// N = h sum ln(1 + |phi_n|^2)
double al_invariant(const ComplexState& state, const LatticeConfig& cfg);

/// Uniform-in-time bound h exp(N0 / h) - h on ||phi(t)||^2.
double al_norm_bound(double N0, const LatticeConfig& cfg);

/// ||u||^2 = h sum |u_n|^2
double l2_norm_squared(const ComplexState& state, double h);

/// ||u - v|| in the periodic l2 norm.
double l2_distance(const ComplexState& u, const ComplexState& v, double h);

/// alpha = g A* sqrt(Nh) + sqrt(d^2+1) sqrt(h) A*^3 N^{3/2} + 2 sqrt(h) (exp(N0/h) - 1)^{3/2}
struct EstimateIIRate {
    double gain_term = 0.0;
    double nonlinear_term = 0.0;
    double al_term = 0.0;
    double alpha() const noexcept { return gain_term + nonlinear_term + al_term; }
};

EstimateIIRate estimate_II_terms(const LatticeConfig& cfg, double gamma, double delta,
                                 double A_star, double N0);
double estimate_II_rate(const LatticeConfig& cfg, double gamma, double delta, double A_star,
                        double N0);

/// Bound B(s) on ||u(s)||^2 given ||u(0)||^2.
double norm_bound_B(double s, double gamma, double delta, double u0_norm_sq, const LatticeConfig& cfg);

enum class EstimateIExponent {
    AsPrinted,      ///< last term uses exp(N0)
    ScaledBySpacing ///< last term uses exp(N0 / h), as in estimate II
};

struct EstimateIOptions {
    EstimateIExponent exponent = EstimateIExponent::AsPrinted;
    double max_step = 1e-2;  ///< Simpson sub-step for F1, F2
};

/// F(t) = d0 + g F1(t) + sqrt(d^2+1) F2(t) + 2 (exp(N0) - 1)^{3/2} t, with
/// F1 = int sqrt(B), F2 = int B^{3/2} by quadrature. Throws
/// HypothesisViolated unless gamma / ||u(0)||^2 > -delta / (N h).
std::vector<double> estimate_I_curve(const LatticeConfig& cfg, double gamma, double delta,
                                     double u0_norm_sq, double N0, double d0,
                                     const std::vector<double>& times,
                                     const EstimateIOptions& options = {});

/// F1(t), F2(t) by quadrature on the given times.
std::pair<std::vector<double>, std::vector<double>> estimate_I_integrals(
    const LatticeConfig& cfg, double gamma, double delta, double u0_norm_sq,
    const std::vector<double>& times, double max_step);

/// Closed-form antiderivatives for F1, F2 as printed alongside the estimate.
/// Kept for cross-checking the quadrature only: the printed F1 does not
/// vanish at t = 0.
double F1_printed(double t, double gamma, double delta, double u0_norm_sq, const LatticeConfig& cfg);
double F2_printed(double t, double gamma, double delta, double u0_norm_sq, const LatticeConfig& cfg);

/// gamma^3 < min(-d/(Nh), -d^3/((d^2+1) h N^3))
struct SmallnessCondition {
    double lhs = 0.0;
    double power_term = 0.0;
    double cubic_term = 0.0;
    bool satisfied = false;
};

SmallnessCondition smallness_terms(const LatticeConfig& cfg, double gamma, double delta);
bool smallness_condition(const LatticeConfig& cfg, double gamma, double delta);

struct Window {
    double lo = -10.0;
    double hi = 10.0;
};

struct ProximityReport {
    std::vector<double> times;
    std::vector<double> D_a;
    std::vector<double> D_a_r;
    /// Estimate I curve F(t)/sqrt(Nh); empty when its hypothesis fails.
    std::vector<double> bound_I;
    /// Estimate I with exp(N0/h) in the last term; empty when hypothesis fails.
    std::vector<double> bound_I_scaled;
    /// Estimate II curve F_b(t)/sqrt(Nh).
    std::vector<double> bound_II;
    double alpha = 0.0;
    double N0 = 0.0;
    double initial_distance = 0.0;
    int window_nodes = 0;
    bool estimate_I_hypothesis = false;
    bool smallness_ok = false;
    SmallnessCondition smallness;
};

/// D_a(t) and D_{a,r}(t) only. Throws GridMismatch unless both trajectories
/// share the sampling grid and node count.
ProximityReport distance_curves(const Trajectory& traj_u, const Trajectory& traj_phi,
                                const LatticeConfig& cfg, Window window = {});

/// Distance curves plus both analytic estimates, all in averaged units.
ProximityReport proximity_report(const Trajectory& traj_u, const Trajectory& traj_phi,
                                 const LatticeConfig& cfg, Window window = {});

}  // namespace dnls
