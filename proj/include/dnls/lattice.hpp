#pragma once

// Domain types and right-hand sides of the three lattice systems:
//
//   gain/loss DNLS   i u' + k(u[n+1] - 2u[n] + u[n-1]) + |u|^2 u = i g u + i d |u|^2 u
//   Ablowitz-Ladik   i p' + k(p[n+1] - 2p[n] + p[n-1]) + |p|^2 (p[n-1] + p[n+1]) = 0
//   shifted DNLS     the gain/loss DNLS after u = (U + A) exp(i A^2 t)
//
// All functions are pure. The *_into variants write into caller-owned
// buffers and never allocate; they are what the integrators call.

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "dnls/errors.hpp"

namespace dnls {

using cplx = std::complex<double>;

enum class Boundary { Periodic, DirichletZero };

const char* to_string(Boundary bc) noexcept;

/// Lattice geometry, coupling and gain/loss parameters. Immutable.
///
/// N nodes on [-L, L) with spacing h = 2L/N and coupling k = 1/h^2.
class LatticeConfig {
public:
    static LatticeConfig from_nodes(double L, int N, double gamma, double delta,
                                    Boundary bc = Boundary::Periodic);

    /// Derives N = 2L/h; rejects spacings that do not tile [-L, L) exactly.
    static LatticeConfig from_spacing(double L, double h, double gamma, double delta,
                                      Boundary bc = Boundary::Periodic);

    double L() const noexcept { return L_; }
    int N() const noexcept { return N_; }
    double h() const noexcept { return h_; }
    double k() const noexcept { return k_; }
    double gamma() const noexcept { return gamma_; }
    double delta() const noexcept { return delta_; }
    Boundary bc() const noexcept { return bc_; }

    /// Same geometry and coupling with different boundary handling.
    LatticeConfig with_boundary(Boundary bc) const;
    LatticeConfig with_gain_loss(double gamma, double delta) const;

    /// Index of the node at x = 0. Requires even N.
    int central_index() const;

private:
    LatticeConfig(double L, int N, double gamma, double delta, Boundary bc);

    double L_;
    int N_;
    double h_;
    double k_;
    double gamma_;
    double delta_;
    Boundary bc_;
};

/// One time slice of a lattice field. Values are stored as contiguous
/// interleaved (re, im) pairs; every entry is finite.
class ComplexState {
public:
    ComplexState() = default;
    explicit ComplexState(std::vector<cplx> values, double t = 0.0);

    static ComplexState zeros(int n, double t = 0.0);

    std::size_t size() const noexcept { return values_.size(); }
    double t() const noexcept { return t_; }
    void set_t(double t) noexcept { t_ = t; }

    std::span<const cplx> values() const noexcept { return values_; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    /// Mutable access for in-place construction. Callers are responsible
    /// for keeping entries finite.
    std::span<cplx> mutable_values() noexcept { return values_; }

    /// Throws ValidationError if any entry is NaN or infinite.
    void check_finite() const;

private:
    std::vector<cplx> values_;
    double t_ = 0.0;
};

/// Node positions x_n = -L + n h, n = 0..N-1.
struct NodeGrid {
    double L = 0.0;
    double h = 0.0;
    std::vector<double> x;

    static NodeGrid from(const LatticeConfig& cfg);
    std::size_t size() const noexcept { return x.size(); }
};

/// Background amplitude together with the critical amplitude of the
/// gain/loss pair it is used with.
struct BackgroundSpec {
    double A = 0.0;
    double A_star = 0.0;

    static BackgroundSpec make(double A, double gamma, double delta);
    bool is_critical(double tol) const;
};

/// Step-like background zeta_n = zeta_- (n < 0), zeta_+ (n >= 0) with
/// |zeta_-| = |zeta_+| = zeta and rotation frequency G^2.
struct GeneralizedBCSpec {
    cplx zeta_minus;
    cplx zeta_plus;
    double zeta = 0.0;
    double G = 0.0;

    static GeneralizedBCSpec make(cplx zeta_minus, cplx zeta_plus, double G);
};

// ---------------------------------------------------------------------------
// Gates

/// A* = sqrt(-gamma/delta); requires gamma > 0 and delta < 0.
double critical_amplitude(double gamma, double delta);

/// True iff a localized state on a background of amplitude A can exist on
/// the infinite lattice, i.e. |A - A*| <= tol.
bool solvability_gate(double A, double gamma, double delta, double tol);

/// Infinite-lattice gate for step-like backgrounds: |G^2 - zeta^2| <= tol
/// and |zeta - A*| <= tol.
bool generalized_gate(const GeneralizedBCSpec& spec, double gamma, double delta, double tol);

// ---------------------------------------------------------------------------
// Right-hand sides

void laplacian_into(std::span<const cplx> u, std::span<cplx> out, const LatticeConfig& cfg);
void dnls_rhs_into(std::span<const cplx> u, std::span<cplx> out, const LatticeConfig& cfg);
void al_rhs_into(std::span<const cplx> phi, std::span<cplx> out, const LatticeConfig& cfg);
void shifted_rhs_into(std::span<const cplx> U, std::span<cplx> out, const LatticeConfig& cfg,
                      double A);

ComplexState discrete_laplacian(const ComplexState& state, const LatticeConfig& cfg);
ComplexState dnls_rhs(const ComplexState& state, const LatticeConfig& cfg);
ComplexState al_rhs(const ComplexState& state, const LatticeConfig& cfg);
ComplexState shifted_rhs(const ComplexState& state, const LatticeConfig& cfg, double A);

/// u = (U + A) exp(i A^2 t), using the state's own time stamp.
ComplexState shifted_to_physical(const ComplexState& U, double A);
/// U = u exp(-i A^2 t) - A.
ComplexState physical_to_shifted(const ComplexState& u, double A);

// ---------------------------------------------------------------------------
// Initial conditions

/// u_n(0) = (A_base + A_p) exp(i K pi x_n / L)
struct PlaneWaveIC {
    double A_base = 0.0;
    double A_p = 0.0;
    int K = 0;
};

/// u_n(0) = A + lambda1 / (lambda2 + lambda3 x_n^2)
struct AlgebraicBumpIC {
    double A = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 4.0;
};

/// u_n(0) = A + sigma sech(rho x_n)
struct SechBumpIC {
    double A = 0.0;
    double sigma = 0.0;
    double rho = 1.0;
};

using InitialCondition = std::variant<PlaneWaveIC, AlgebraicBumpIC, SechBumpIC>;

/// Background level the initial condition decays to (A_base + A_p for plane waves).
double background_amplitude(const InitialCondition& ic);

ComplexState make_initial_condition(const InitialCondition& ic, const NodeGrid& grid);

/// sech(x) as 2/(e^x + e^-x), returning 0 beyond |x| > 700.
double sech(double x) noexcept;

/// Throws WavenumberError unless 0 <= K <= N/2.
void check_wavenumber(int K, int N);

}  // namespace dnls
