#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

enum class System { DNLS, AL, Shifted };
enum class Method { RK4Fixed, DP54Adaptive };

const char* to_string(System s) noexcept;
const char* to_string(Method m) noexcept;

/// Time-stepping parameters. `dt` is the fixed step for RK4 and the initial
/// step for DP54. Samples are recorded at t0 + j * sample_every.
struct IntegratorSpec {
    Method method = Method::DP54Adaptive;
    double dt = 5e-3;
    double rtol = 1e-9;
    double atol = 1e-11;
    double t_end = 0.0;
    double sample_every = 0.1;

    /// Throws ValidationError on dt <= 0, tolerances <= 0 or sample_every < dt.
    void validate() const;
};

/// Any node modulus above this aborts the run with BlowUpDetected.
inline constexpr double kBlowUpModulus = 1e6;
/// DP54 gives up (StepFailure) once the step drops below this.
inline constexpr double kMinAdaptiveStep = 1e-12;

struct SampleDiagnostics {
    double averaged_power = 0.0;
    /// |d/dt(h sum |u|^2) - 2 g h sum |u|^2 - 2 d h sum |u|^4| evaluated
    /// from the instantaneous right-hand side. DNLS runs only.
    std::optional<double> balance_residual;
    /// h sum ln(1 + |phi|^2). AL runs only.
    std::optional<double> al_invariant;
};

struct IntegratorStats {
    long long accepted_steps = 0;
    long long rejected_steps = 0;
    long long rhs_evaluations = 0;
    double min_step = 0.0;
    double max_step = 0.0;
};

/// Sampled solution of one lattice system. For the shifted system the
/// stored states are U_n and `background` holds A.
struct Trajectory {
    System system = System::DNLS;
    std::optional<double> background;
    std::vector<double> times;
    std::vector<ComplexState> states;
    std::vector<SampleDiagnostics> diagnostics;
    IntegratorStats stats;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

/// Called on every recorded sample; returning false stops the run after
/// that sample.
using SampleObserver = std::function<bool(const ComplexState&)>;

/// Integrates `system` from `ic` (starting at ic.t()) up to spec.t_end.
///
/// The shifted system needs `background` and a Dirichlet config; the DNLS
/// and AL systems need a periodic config.
Trajectory integrate(System system, const ComplexState& ic, const LatticeConfig& cfg,
                     const IntegratorSpec& spec, std::optional<double> background = std::nullopt,
                     const SampleObserver& observer = {});

/// P_a[u] = (1/N) sum |u_n|^2
double averaged_power(const ComplexState& state);

/// Instantaneous power-balance mismatch of the DNLS at one state.
double instantaneous_balance_residual(const ComplexState& state, const LatticeConfig& cfg);

/// Power-balance mismatch per interior sample, with d/dt taken by centered
/// differences over the sampling grid. Throws NeedThreeSamples.
std::vector<double> power_balance_residual(const Trajectory& traj, const LatticeConfig& cfg);

/// Upper bound on P_a(t) given P_a(0) (Bernoulli inequality solution).
double averaged_power_bound(double P0, double gamma, double delta, double t);

struct PowerBoundResult {
    bool passed = true;
    std::vector<double> bound;
    /// bound - P_a at each sample; negative entries are violations.
    std::vector<double> margin;
};

/// Checks P_a(t) <= bound(t) at every sample, t measured from the first
/// sample. `rel_tol` absorbs integration error when the bound is saturated.
PowerBoundResult power_bound_check(const Trajectory& traj, const LatticeConfig& cfg,
                                   double rel_tol = 1e-9);

}  // namespace dnls
