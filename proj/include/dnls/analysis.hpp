#pragma once

// Plane-wave attractor theory and modulation-instability analysis of the
// periodic gain/loss DNLS, plus DFT diagnostics of lattice states.

#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/timestep.hpp"

namespace dnls {

/// Plane wave A(t) exp(i(q x_n - Omega(t))) with q = K pi / L.
struct PlaneWaveFamily {
    int K = 0;
    double q = 0.0;
    double A0 = 0.0;
    double Theta0 = 0.0;
    double omega_tilde = 0.0;

    /// Resolves q and the limit frequency from the lattice and its gain/loss pair.
    static PlaneWaveFamily make(int K, double A0, double Theta0, const LatticeConfig& cfg);
};

/// omega~ = 4k sin^2(hq/2) - A*^2 for q = K pi / L.
double dispersion_frequency(int K, const LatticeConfig& cfg, double A_star);

/// A^2(t) for the amplitude equation A' = g A + d A^3.
double amplitude_ode_solution(double A0, double gamma, double delta, double t);

/// Offset b of the slant asymptote Theta(t) - Theta(0) ~ A*^2 t + b.
double slant_asymptote_offset(double A0, double gamma, double delta);

/// Theta(t) - Theta(0) = int_0^t A^2(s) ds, by Simpson quadrature.
double phase_increment(double A0, double gamma, double delta, double t);

/// Exact plane-wave state at time t. Theta is integrated numerically.
ComplexState plane_wave_exact(const PlaneWaveFamily& family, const NodeGrid& grid, double t,
                              const LatticeConfig& cfg);

// ---------------------------------------------------------------------------
// Modulation instability

struct MIRoots {
    cplx lambda_plus;
    cplx lambda_minus;
    double Gamma = 0.0;
    /// Perturbation frequencies Omega_p = Lambda + 2k sin(hQ) sin(hq).
    cplx omega_plus;
    cplx omega_minus;

    /// max(Im Lambda+, Im Lambda-): the exponential growth rate of the sideband.
    double growth() const noexcept;
};

/// Roots of Lambda^2 - 2 i d A*^2 Lambda - Gamma (Gamma - 2 A*^2) = 0 with
/// Gamma = 4k sin^2(hQ/2) cos(hq).
MIRoots mi_roots(double q, double Q, const LatticeConfig& cfg, double A_star, double delta);

struct MIScan {
    int K = 0;
    double q = 0.0;
    std::vector<int> M;
    std::vector<double> Qs;
    std::vector<double> growth;
    std::vector<int> unstable_band;
    /// Unstable iff cos(hq) > 0 and the band is nonempty.
    bool carrier_unstable = false;
    /// Perturbation index of the largest growth (0 when the band is empty).
    int most_unstable_M = 0;
    double max_growth = 0.0;
};

/// Growth rates over all perturbation indices M = 0..N/2 for carrier K.
MIScan mi_scan(int K, const LatticeConfig& cfg, double A_star, double delta);

struct GrowthFitOptions {
    double lower_factor = 10.0;  ///< window starts at lower_factor * eps
    double upper = 1e-3;         ///< window ends at this mode amplitude
    double t_max = 400.0;
    double sample_every = 0.1;
    double rtol = 1e-10;
    double atol = 1e-14;
};

struct GrowthFit {
    double rate = 0.0;
    /// False when the sideband never traverses the linear window.
    bool window_found = false;
    double t_begin = 0.0;
    double t_end = 0.0;
    int samples = 0;
};

/// Fits the sideband growth rate from a full DNLS run seeded with
/// (A* + eps cos(Q x_n)) exp(i q x_n). The tracked amplitude is the DFT
/// coefficient of mode K+M normalised by N h.
GrowthFit mi_growth_oracle(int K, int M, const LatticeConfig& cfg, double eps,
                           const GrowthFitOptions& options = {});

// ---------------------------------------------------------------------------
// Spectra

struct SpectrumFrame {
    double t = 0.0;
    /// A_K = h sum_n u_n exp(-2 pi i K n / N)
    std::vector<cplx> coeffs;
    int dominant_mode = 0;
};

SpectrumFrame spectrum(const ComplexState& state, double h);

/// u_n = (1 / (N h)) sum_K A_K exp(2 pi i K n / N)
ComplexState inverse_spectrum(const SpectrumFrame& frame, double h);

/// Single coefficient A_K.
cplx dft_coefficient(const ComplexState& state, int K, double h);

/// Folds a DFT index onto the physical wavenumber index min(K, N - K).
int fold_mode(int K, int N) noexcept;

struct AttractorVerdict {
    bool converged = false;
    int final_mode = 0;
    bool in_stable_band = false;
    double max_power_error = 0.0;
    double max_modulus_variance = 0.0;
};

/// Inspects the last `t_window` time units of a DNLS trajectory.
AttractorVerdict attractor_verdict(const Trajectory& traj, const LatticeConfig& cfg, double A_star,
                                   double tol_amp, double t_window);

}  // namespace dnls
