#include "dnls/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>
#include <string>

namespace dnls {

namespace {

constexpr double kGateRelTol = 1e-12;

void require_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw LengthMismatch(std::string(what) + ": state has " + std::to_string(got) +
                             " nodes, lattice has " + std::to_string(want));
    }
}

// Neighbour lookup honouring the boundary mode. Dirichlet ghosts are zero.
struct Neighbours {
    cplx left;
    cplx right;
};

inline Neighbours neighbours(std::span<const cplx> u, std::size_t n, Boundary bc) {
    const std::size_t N = u.size();
    if (bc == Boundary::Periodic) {
        return {u[n == 0 ? N - 1 : n - 1], u[n + 1 == N ? 0 : n + 1]};
    }
    return {n == 0 ? cplx{} : u[n - 1], n + 1 == N ? cplx{} : u[n + 1]};
}

}  // namespace

const char* to_string(Boundary bc) noexcept {
    return bc == Boundary::Periodic ? "periodic" : "dirichlet";
}

// ---------------------------------------------------------------------------
// LatticeConfig

LatticeConfig::LatticeConfig(double L, int N, double gamma, double delta, Boundary bc)
    : L_(L), N_(N), h_(2.0 * L / N), k_(0.0), gamma_(gamma), delta_(delta), bc_(bc) {
    if (!std::isfinite(L) || L <= 0.0) throw ConfigError("L must be positive and finite");
    if (N < 4) throw ConfigError("N must be at least 4, got " + std::to_string(N));
    if (!std::isfinite(gamma) || !std::isfinite(delta)) {
        throw ConfigError("gamma and delta must be finite");
    }
    if (std::abs(h_ * N_ - 2.0 * L_) > 1e-12 * 2.0 * L_) {
        throw ConfigError("h * N must equal 2L");
    }
    k_ = 1.0 / (h_ * h_);
}

LatticeConfig LatticeConfig::from_nodes(double L, int N, double gamma, double delta, Boundary bc) {
    return LatticeConfig(L, N, gamma, delta, bc);
}

LatticeConfig LatticeConfig::from_spacing(double L, double h, double gamma, double delta,
                                          Boundary bc) {
    if (!std::isfinite(h) || h <= 0.0) throw ConfigError("h must be positive and finite");
    if (!std::isfinite(L) || L <= 0.0) throw ConfigError("L must be positive and finite");
    const double nodes = 2.0 * L / h;
    const double rounded = std::round(nodes);
    if (std::abs(nodes - rounded) > 1e-9 * nodes || rounded > 1e9) {
        throw ConfigError("2L/h = " + std::to_string(nodes) + " is not an integer node count");
    }
    return LatticeConfig(L, static_cast<int>(rounded), gamma, delta, bc);
}

LatticeConfig LatticeConfig::with_boundary(Boundary bc) const {
    return LatticeConfig(L_, N_, gamma_, delta_, bc);
}

LatticeConfig LatticeConfig::with_gain_loss(double gamma, double delta) const {
    return LatticeConfig(L_, N_, gamma, delta, bc_);
}

int LatticeConfig::central_index() const {
    if (N_ % 2 != 0) throw ConfigError("central node requires an even node count");
    return N_ / 2;
}

// ---------------------------------------------------------------------------
// ComplexState

ComplexState::ComplexState(std::vector<cplx> values, double t) : values_(std::move(values)), t_(t) {
    if (!std::isfinite(t)) throw ValidationError("state time stamp is not finite");
    check_finite();
}

ComplexState ComplexState::zeros(int n, double t) {
    return ComplexState(std::vector<cplx>(static_cast<std::size_t>(n)), t);
}

void ComplexState::check_finite() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
            throw ValidationError("state entry " + std::to_string(i) + " is not finite");
        }
    }
}

NodeGrid NodeGrid::from(const LatticeConfig& cfg) {
    NodeGrid g;
    g.L = cfg.L();
    g.h = cfg.h();
    g.x.resize(static_cast<std::size_t>(cfg.N()));
    for (int n = 0; n < cfg.N(); ++n) g.x[static_cast<std::size_t>(n)] = -cfg.L() + n * cfg.h();
    return g;
}

// ---------------------------------------------------------------------------
// Gates

double critical_amplitude(double gamma, double delta) {
    if (!(gamma > 0.0) || !(delta < 0.0)) {
        throw DomainError("critical amplitude needs gamma > 0 and delta < 0 (got gamma=" +
                          std::to_string(gamma) + ", delta=" + std::to_string(delta) + ")");
    }
    return std::sqrt(-gamma / delta);
}

bool solvability_gate(double A, double gamma, double delta, double tol) {
    if (!(tol > 0.0)) throw DomainError("gate tolerance must be positive");
    return std::abs(A - critical_amplitude(gamma, delta)) <= tol;
}

bool generalized_gate(const GeneralizedBCSpec& spec, double gamma, double delta, double tol) {
    if (!(tol > 0.0)) throw DomainError("gate tolerance must be positive");
    const double A_star = critical_amplitude(gamma, delta);
    return std::abs(spec.G * spec.G - spec.zeta * spec.zeta) <= tol &&
           std::abs(spec.zeta - A_star) <= tol;
}

BackgroundSpec BackgroundSpec::make(double A, double gamma, double delta) {
    if (!(A >= 0.0)) throw DomainError("background amplitude must be nonnegative");
    const double A_star = critical_amplitude(gamma, delta);
    if (std::abs(A_star * A_star * delta + gamma) > kGateRelTol * std::abs(gamma)) {
        throw DomainError("critical amplitude inconsistent with gain/loss pair");
    }
    return {A, A_star};
}

bool BackgroundSpec::is_critical(double tol) const { return std::abs(A - A_star) <= tol; }

GeneralizedBCSpec GeneralizedBCSpec::make(cplx zeta_minus, cplx zeta_plus, double G) {
    const double a = std::abs(zeta_minus);
    const double b = std::abs(zeta_plus);
    if (std::abs(a - b) > kGateRelTol * std::max({a, b, 1e-300})) {
        throw DomainError("|zeta_-| and |zeta_+| must coincide");
    }
    if (!std::isfinite(G)) throw DomainError("G must be finite");
    return {zeta_minus, zeta_plus, a, G};
}

// ---------------------------------------------------------------------------
// Right-hand sides

void laplacian_into(std::span<const cplx> u, std::span<cplx> out, const LatticeConfig& cfg) {
    const auto N = static_cast<std::size_t>(cfg.N());
    require_length(u.size(), N, "discrete_laplacian");
    require_length(out.size(), N, "discrete_laplacian");
    const double k = cfg.k();
    for (std::size_t n = 0; n < N; ++n) {
        const auto nb = neighbours(u, n, cfg.bc());
        out[n] = k * (nb.right - 2.0 * u[n] + nb.left);
    }
}

void dnls_rhs_into(std::span<const cplx> u, std::span<cplx> out, const LatticeConfig& cfg) {
    if (cfg.bc() != Boundary::Periodic) {
        throw ConfigError("the unshifted DNLS is only defined with periodic boundaries");
    }
    const auto N = static_cast<std::size_t>(cfg.N());
    require_length(u.size(), N, "dnls_rhs");
    require_length(out.size(), N, "dnls_rhs");
    const double k = cfg.k();
    const double g = cfg.gamma();
    const double d = cfg.delta();
    for (std::size_t n = 0; n < N; ++n) {
        const cplx left = u[n == 0 ? N - 1 : n - 1];
        const cplx right = u[n + 1 == N ? 0 : n + 1];
        const cplx un = u[n];
        const double dens = std::norm(un);
        const cplx conservative = k * (right - 2.0 * un + left) + dens * un;
        // i * conservative + (g + d |u|^2) u
        out[n] = cplx{-conservative.imag(), conservative.real()} + (g + d * dens) * un;
    }
}

void al_rhs_into(std::span<const cplx> phi, std::span<cplx> out, const LatticeConfig& cfg) {
    if (cfg.bc() != Boundary::Periodic) {
        throw ConfigError("the Ablowitz-Ladik lattice is simulated with periodic boundaries only");
    }
    const auto N = static_cast<std::size_t>(cfg.N());
    require_length(phi.size(), N, "al_rhs");
    require_length(out.size(), N, "al_rhs");
    const double k = cfg.k();
    for (std::size_t n = 0; n < N; ++n) {
        const cplx left = phi[n == 0 ? N - 1 : n - 1];
        const cplx right = phi[n + 1 == N ? 0 : n + 1];
        const cplx pn = phi[n];
        const cplx s = k * (right - 2.0 * pn + left) + std::norm(pn) * (left + right);
        out[n] = cplx{-s.imag(), s.real()};
    }
}

void shifted_rhs_into(std::span<const cplx> U, std::span<cplx> out, const LatticeConfig& cfg,
                      double A) {
    if (cfg.bc() != Boundary::DirichletZero) {
        throw ConfigError("the shifted system is closed with zero Dirichlet boundaries");
    }
    const auto N = static_cast<std::size_t>(cfg.N());
    require_length(U.size(), N, "shifted_rhs");
    require_length(out.size(), N, "shifted_rhs");
    const double k = cfg.k();
    const double g = cfg.gamma();
    const double d = cfg.delta();
    const double A2 = A * A;
    for (std::size_t n = 0; n < N; ++n) {
        const auto nb = neighbours(U, n, Boundary::DirichletZero);
        const cplx w = U[n] + A;
        const double dens = std::norm(w);
        // i U' = -lap U + A^2 w - |w|^2 w + i g w + i d |w|^2 w
        const cplx conservative = k * (nb.right - 2.0 * U[n] + nb.left) - A2 * w + dens * w;
        out[n] = cplx{-conservative.imag(), conservative.real()} + (g + d * dens) * w;
    }
}

namespace {

template <typename Fn>
ComplexState apply(const ComplexState& s, const LatticeConfig& cfg, Fn&& fn) {
    require_length(s.size(), static_cast<std::size_t>(cfg.N()), "rhs");
    std::vector<cplx> out(s.size());
    fn(s.values(), std::span<cplx>(out));
    return ComplexState(std::move(out), s.t());
}

}  // namespace

ComplexState discrete_laplacian(const ComplexState& state, const LatticeConfig& cfg) {
    return apply(state, cfg, [&](auto in, auto out) { laplacian_into(in, out, cfg); });
}

ComplexState dnls_rhs(const ComplexState& state, const LatticeConfig& cfg) {
    return apply(state, cfg, [&](auto in, auto out) { dnls_rhs_into(in, out, cfg); });
}

ComplexState al_rhs(const ComplexState& state, const LatticeConfig& cfg) {
    return apply(state, cfg, [&](auto in, auto out) { al_rhs_into(in, out, cfg); });
}

ComplexState shifted_rhs(const ComplexState& state, const LatticeConfig& cfg, double A) {
    return apply(state, cfg, [&](auto in, auto out) { shifted_rhs_into(in, out, cfg, A); });
}

ComplexState shifted_to_physical(const ComplexState& U, double A) {
    const cplx phase = std::polar(1.0, A * A * U.t());
    std::vector<cplx> u(U.size());
    for (std::size_t n = 0; n < u.size(); ++n) u[n] = (U[n] + A) * phase;
    return ComplexState(std::move(u), U.t());
}

ComplexState physical_to_shifted(const ComplexState& u, double A) {
    const cplx phase = std::polar(1.0, -A * A * u.t());
    std::vector<cplx> U(u.size());
    for (std::size_t n = 0; n < U.size(); ++n) U[n] = u[n] * phase - A;
    return ComplexState(std::move(U), u.t());
}

// ---------------------------------------------------------------------------
// Initial conditions

double sech(double x) noexcept {
    if (std::abs(x) > 700.0) return 0.0;
    return 2.0 / (std::exp(x) + std::exp(-x));
}

void check_wavenumber(int K, int N) {
    if (K < 0 || 2 * K > N) {
        throw WavenumberError("wavenumber index K=" + std::to_string(K) + " outside [0, " +
                              std::to_string(N / 2) + "]");
    }
}

double background_amplitude(const InitialCondition& ic) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PlaneWaveIC>) {
                return v.A_base + v.A_p;
            } else {
                return v.A;
            }
        },
        ic);
}

ComplexState make_initial_condition(const InitialCondition& ic, const NodeGrid& grid) {
    const std::size_t N = grid.size();
    if (N < 4) throw ConfigError("grid has fewer than 4 nodes");
    std::vector<cplx> u(N);

    if (const auto* pw = std::get_if<PlaneWaveIC>(&ic)) {
        check_wavenumber(pw->K, static_cast<int>(N));
        const double amp = pw->A_base + pw->A_p;
        // exp(i K pi x_n / L) = (-1)^K exp(2 pi i K n / N); the index form keeps
        // the phase exact modulo 2 pi.
        const double sign = (pw->K % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t n = 0; n < N; ++n) {
            const auto m = static_cast<long long>(pw->K) * static_cast<long long>(n) %
                           static_cast<long long>(N);
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(N);
            u[n] = sign * amp * cplx{std::cos(angle), std::sin(angle)};
        }
    } else if (const auto* alg = std::get_if<AlgebraicBumpIC>(&ic)) {
        if (!(alg->lambda2 > 0.0) || !(alg->lambda3 >= 0.0)) {
            throw DomainError("algebraic bump needs lambda2 > 0 and lambda3 >= 0");
        }
        for (std::size_t n = 0; n < N; ++n) {
            const double x = grid.x[n];
            u[n] = alg->A + alg->lambda1 / (alg->lambda2 + alg->lambda3 * x * x);
        }
    } else {
        const auto& sb = std::get<SechBumpIC>(ic);
        if (!(sb.rho > 0.0)) throw DomainError("sech bump needs rho > 0");
        for (std::size_t n = 0; n < N; ++n) u[n] = sb.A + sb.sigma * sech(sb.rho * grid.x[n]);
    }
    return ComplexState(std::move(u), 0.0);
}

}  // namespace dnls
