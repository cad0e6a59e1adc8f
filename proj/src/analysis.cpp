#include "dnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dnls/quadrature.hpp"

namespace dnls {

namespace {

constexpr double pi = std::numbers::pi;

void require_gain_loss(double gamma, double delta) {
    if (!(gamma > 0.0) || !(delta < 0.0)) {
        throw DomainError("needs gamma > 0 and delta < 0 (got gamma=" + std::to_string(gamma) +
                          ", delta=" + std::to_string(delta) + ")");
    }
}

// Trigonometric data of a carrier q = K pi / L, i.e. hq = 2 pi K / N.
// cos(hq) is evaluated as sin(pi (N - 4K) / (2N)) so the marginal carrier
// 4K = N gives exactly zero.
struct CarrierTrig {
    double cos_hq;
    double sin_hq;
};

CarrierTrig carrier_trig(int K, int N) {
    const double n = static_cast<double>(N);
    return {std::sin(pi * static_cast<double>(N - 4 * K) / (2.0 * n)),
            std::sin(2.0 * pi * static_cast<double>(K) / n)};
}

MIRoots roots_from(double Gamma, double sin_hQ, double sin_hq, double k, double A_star,
                   double delta) {
    const double A2 = A_star * A_star;
    const double da2 = delta * A2;
    const double disc = Gamma * (Gamma - 2.0 * A2) - da2 * da2;
    MIRoots r;
    r.Gamma = Gamma;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        r.lambda_plus = {s, da2};
        r.lambda_minus = {-s, da2};
    } else {
        const double s = std::sqrt(-disc);
        // Im Lambda+ = d A*^2 + s. For d < 0 rewrite without cancellation so
        // its sign is exactly that of -Gamma (Gamma - 2 A*^2).
        double im_plus = da2 + s;
        if (da2 < 0.0) im_plus = -Gamma * (Gamma - 2.0 * A2) / (s - da2);
        if (im_plus == 0.0) im_plus = 0.0;  // drop the sign of -0
        r.lambda_plus = {0.0, im_plus};
        r.lambda_minus = {0.0, da2 - s};
    }
    const double shift = 2.0 * k * sin_hQ * sin_hq;
    r.omega_plus = r.lambda_plus + shift;
    r.omega_minus = r.lambda_minus + shift;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Plane-wave family

double dispersion_frequency(int K, const LatticeConfig& cfg, double A_star) {
    check_wavenumber(K, cfg.N());
    const double s = std::sin(pi * static_cast<double>(K) / cfg.N());  // sin(hq/2)
    return 4.0 * cfg.k() * s * s - A_star * A_star;
}

PlaneWaveFamily PlaneWaveFamily::make(int K, double A0, double Theta0, const LatticeConfig& cfg) {
    check_wavenumber(K, cfg.N());
    if (!(A0 > 0.0)) throw DomainError("plane-wave amplitude must be positive");
    const double A_star = critical_amplitude(cfg.gamma(), cfg.delta());
    PlaneWaveFamily f;
    f.K = K;
    f.q = K * pi / cfg.L();
    f.A0 = A0;
    f.Theta0 = Theta0;
    f.omega_tilde = dispersion_frequency(K, cfg, A_star);
    return f;
}

double amplitude_ode_solution(double A0, double gamma, double delta, double t) {
    require_gain_loss(gamma, delta);
    if (!(A0 > 0.0)) throw DomainError("A0 must be positive");
    if (!(t >= 0.0)) throw DomainError("t must be nonnegative");
    const double a2 = A0 * A0;
    return gamma * a2 / ((gamma + delta * a2) * std::exp(-2.0 * gamma * t) - delta * a2);
}

double slant_asymptote_offset(double A0, double gamma, double delta) {
    require_gain_loss(gamma, delta);
    if (!(A0 > 0.0)) throw DomainError("A0 must be positive");
    const double A_star2 = -gamma / delta;
    return -std::log(A0 * A0 / A_star2) / (2.0 * delta);
}

double phase_increment(double A0, double gamma, double delta, double t) {
    require_gain_loss(gamma, delta);
    if (!(t >= 0.0)) throw DomainError("t must be nonnegative");
    if (t == 0.0) return 0.0;
    const double step = std::min(0.05, 1e-3 / gamma);
    const int panels = 2 * static_cast<int>(std::ceil(t / (2.0 * step)));
    return quad::simpson([&](double s) { return amplitude_ode_solution(A0, gamma, delta, s); },
                         0.0, t, panels);
}

ComplexState plane_wave_exact(const PlaneWaveFamily& family, const NodeGrid& grid, double t,
                              const LatticeConfig& cfg) {
    if (grid.size() != static_cast<std::size_t>(cfg.N())) {
        throw LengthMismatch("grid does not match lattice");
    }
    const double A = std::sqrt(amplitude_ode_solution(family.A0, cfg.gamma(), cfg.delta(), t));
    const double theta = family.Theta0 + phase_increment(family.A0, cfg.gamma(), cfg.delta(), t);
    const double s = std::sin(family.q * cfg.h() / 2.0);
    const double Omega = 4.0 * cfg.k() * s * s * t - theta;
    std::vector<cplx> u(grid.size());
    for (std::size_t n = 0; n < u.size(); ++n) u[n] = std::polar(A, family.q * grid.x[n] - Omega);
    return ComplexState(std::move(u), t);
}

// ---------------------------------------------------------------------------
// Modulation instability

double MIRoots::growth() const noexcept {
    return std::max(lambda_plus.imag(), lambda_minus.imag());
}

MIRoots mi_roots(double q, double Q, const LatticeConfig& cfg, double A_star, double delta) {
    const double h = cfg.h();
    const double k = cfg.k();
    const double sq = std::sin(h * Q / 2.0);
    const double Gamma = 4.0 * k * sq * sq * std::cos(h * q);
    return roots_from(Gamma, std::sin(h * Q), std::sin(h * q), k, A_star, delta);
}

MIScan mi_scan(int K, const LatticeConfig& cfg, double A_star, double delta) {
    const int N = cfg.N();
    check_wavenumber(K, N);
    const auto carrier = carrier_trig(K, N);
    const double k = cfg.k();

    MIScan scan;
    scan.K = K;
    scan.q = K * pi / cfg.L();
    for (int M = 0; 2 * M <= N; ++M) {
        const double half = pi * static_cast<double>(M) / N;  // hQ/2
        const double s = std::sin(half);
        const double Gamma = 4.0 * k * s * s * carrier.cos_hq;
        const auto r = roots_from(Gamma, std::sin(2.0 * half), carrier.sin_hq, k, A_star, delta);
        const double g = r.growth();
        scan.M.push_back(M);
        scan.Qs.push_back(M * pi / cfg.L());
        scan.growth.push_back(g);
        if (g > 0.0) {
            scan.unstable_band.push_back(M);
            if (g > scan.max_growth) {
                scan.max_growth = g;
                scan.most_unstable_M = M;
            }
        }
    }
    scan.carrier_unstable = carrier.cos_hq > 0.0 && !scan.unstable_band.empty();
    return scan;
}

GrowthFit mi_growth_oracle(int K, int M, const LatticeConfig& cfg, double eps,
                           const GrowthFitOptions& options) {
    const int N = cfg.N();
    check_wavenumber(K, N);
    check_wavenumber(M, N);
    if (!(eps >= 0.0) || eps > 1e-6) throw DomainError("perturbation amplitude must be in [0, 1e-6]");
    const double A_star = critical_amplitude(cfg.gamma(), cfg.delta());

    GrowthFit fit;
    if (eps == 0.0) return fit;

    const auto grid = NodeGrid::from(cfg);
    const double Q = M * pi / cfg.L();
    auto carrier = make_initial_condition(PlaneWaveIC{A_star, 0.0, K}, grid);
    std::vector<cplx> u0(carrier.values().begin(), carrier.values().end());
    for (std::size_t n = 0; n < u0.size(); ++n) {
        u0[n] *= (A_star + eps * std::cos(Q * grid.x[n])) / A_star;
    }

    const int mode = (K + M) % N;
    const double norm = 1.0 / (N * cfg.h());
    const double lower = options.lower_factor * eps;

    std::vector<double> ts, logs;
    bool entered = false;
    bool left = false;
    auto observer = [&](const ComplexState& s) {
        const double a = std::abs(dft_coefficient(s, mode, cfg.h())) * norm;
        if (a >= options.upper) {
            left = entered;
            return false;
        }
        if (a >= lower) {
            entered = true;
            ts.push_back(s.t());
            logs.push_back(std::log(a));
        } else if (entered) {
            // dropped back below the window: the linear regime was not clean
            ts.clear();
            logs.clear();
            entered = false;
        }
        return true;
    };

    IntegratorSpec spec;
    spec.method = Method::DP54Adaptive;
    spec.dt = 1e-3;
    spec.rtol = options.rtol;
    spec.atol = options.atol;
    spec.t_end = options.t_max;
    spec.sample_every = options.sample_every;
    integrate(System::DNLS, ComplexState(std::move(u0), 0.0), cfg, spec, std::nullopt, observer);

    if (!left || ts.size() < 3) return fit;

    // least-squares slope of log amplitude against time
    const double n = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += logs[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * logs[i];
    }
    fit.rate = (n * stl - st * sl) / (n * stt - st * st);
    fit.window_found = true;
    fit.t_begin = ts.front();
    fit.t_end = ts.back();
    fit.samples = static_cast<int>(ts.size());
    return fit;
}

// ---------------------------------------------------------------------------
// Spectra

namespace {

std::vector<cplx> twiddles(std::size_t N, double sign) {
    std::vector<cplx> w(N);
    for (std::size_t m = 0; m < N; ++m) {
        const double a = sign * 2.0 * pi * static_cast<double>(m) / static_cast<double>(N);
        w[m] = {std::cos(a), std::sin(a)};
    }
    return w;
}

int dominant(const std::vector<cplx>& c) {
    int best = 0;
    double best_mag = -1.0;
    for (std::size_t K = 0; K < c.size(); ++K) {
        const double m = std::abs(c[K]);
        if (m > best_mag) {
            best_mag = m;
            best = static_cast<int>(K);
        }
    }
    return best;
}

}  // namespace

SpectrumFrame spectrum(const ComplexState& state, double h) {
    const std::size_t N = state.size();
    SpectrumFrame f;
    f.t = state.t();
    f.coeffs.assign(N, cplx{});
    if (N == 0) return f;
    const auto w = twiddles(N, -1.0);
    for (std::size_t K = 0; K < N; ++K) {
        cplx s{};
        for (std::size_t n = 0; n < N; ++n) s += state[n] * w[(K * n) % N];
        f.coeffs[K] = h * s;
    }
    f.dominant_mode = dominant(f.coeffs);
    return f;
}

ComplexState inverse_spectrum(const SpectrumFrame& frame, double h) {
    const std::size_t N = frame.coeffs.size();
    std::vector<cplx> u(N);
    const auto w = twiddles(N, 1.0);
    for (std::size_t n = 0; n < N; ++n) {
        cplx s{};
        for (std::size_t K = 0; K < N; ++K) s += frame.coeffs[K] * w[(K * n) % N];
        u[n] = s / (static_cast<double>(N) * h);
    }
    return ComplexState(std::move(u), frame.t);
}

cplx dft_coefficient(const ComplexState& state, int K, double h) {
    const std::size_t N = state.size();
    cplx s{};
    for (std::size_t n = 0; n < N; ++n) {
        const auto m = (static_cast<std::size_t>(K) * n) % N;
        const double a = -2.0 * pi * static_cast<double>(m) / static_cast<double>(N);
        s += state[n] * cplx{std::cos(a), std::sin(a)};
    }
    return h * s;
}

int fold_mode(int K, int N) noexcept { return std::min(K, N - K); }

AttractorVerdict attractor_verdict(const Trajectory& traj, const LatticeConfig& cfg, double A_star,
                                   double tol_amp, double t_window) {
    if (traj.empty()) throw WindowTooShort("empty trajectory");
    const double t_last = traj.times.back();
    const double t_first = traj.times.front();
    const double slack = 1e-9 * std::max(1.0, std::abs(t_last));
    if (!(t_window > 0.0) || t_last - t_first < t_window - slack) {
        throw WindowTooShort("trajectory spans " + std::to_string(t_last - t_first) +
                             " time units, window needs " + std::to_string(t_window));
    }

    AttractorVerdict v;
    const double target = A_star * A_star;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < t_last - t_window - slack) continue;
        v.max_power_error =
            std::max(v.max_power_error, std::abs(traj.diagnostics[i].averaged_power - target));
        const auto vals = traj.states[i].values();
        double mean = 0.0;
        for (const auto& u : vals) mean += std::abs(u);
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (const auto& u : vals) var += (std::abs(u) - mean) * (std::abs(u) - mean);
        var /= static_cast<double>(vals.size());
        v.max_modulus_variance = std::max(v.max_modulus_variance, var);
    }
    v.converged = v.max_power_error < tol_amp && v.max_modulus_variance < tol_amp;

    const auto frame = spectrum(traj.states.back(), cfg.h());
    v.final_mode = fold_mode(frame.dominant_mode, cfg.N());
    v.in_stable_band = mi_scan(v.final_mode, cfg, A_star, cfg.delta()).unstable_band.empty();
    return v;
}

}  // namespace dnls
