#include "dnls/proximity.hpp"

#include <cmath>
#include <string>

#include "dnls/quadrature.hpp"

namespace dnls {

ComplexState dps_eval(const NodeGrid& grid, double t, const DpsParams& params) {
    if (std::abs(grid.h - 1.0) > 1e-12) {
        throw ConfigError("the discrete Peregrine soliton is defined for unit spacing (k = 1)");
    }
    if (!(params.q > 0.0)) throw DomainError("dPS background q must be positive");
    const double q = params.q;
    const double q2 = q * q;
    const double tau = t - params.t0;
    const cplx numer = 4.0 * (1.0 + q2) * cplx{1.0, 4.0 * q2 * tau};
    const double tail = 16.0 * q2 * q2 * (1.0 + q2) * tau * tau;
    const cplx phase = std::polar(1.0, 2.0 * q2 * tau);
    std::vector<cplx> phi(grid.size());
    for (std::size_t n = 0; n < phi.size(); ++n) {
        const double x = grid.x[n];
        phi[n] = q * (1.0 - numer / (1.0 + 4.0 * x * x * q2 + tail)) * phase;
    }
    return ComplexState(std::move(phi), t);
}

double dps_peak_density(double q) noexcept {
    const double s = 3.0 + 4.0 * q * q;
    return q * q * s * s;
}

double al_invariant(const ComplexState& state, const LatticeConfig& cfg) {
    double s = 0.0;
    for (const auto& p : state.values()) s += std::log1p(std::norm(p));
    return cfg.h() * s;
}

double al_norm_bound(double N0, const LatticeConfig& cfg) {
    if (!(N0 >= 0.0)) throw DomainError("AL invariant must be nonnegative");
    const double h = cfg.h();
    return h * std::expm1(N0 / h);
}

double l2_norm_squared(const ComplexState& state, double h) {
    double s = 0.0;
    for (const auto& v : state.values()) s += std::norm(v);
    return h * s;
}

double l2_distance(const ComplexState& u, const ComplexState& v, double h) {
    if (u.size() != v.size()) throw GridMismatch("states have different node counts");
    double s = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) s += std::norm(u[n] - v[n]);
    return std::sqrt(h * s);
}

// ---------------------------------------------------------------------------
// Estimates

EstimateIIRate estimate_II_terms(const LatticeConfig& cfg, double gamma, double delta,
                                 double A_star, double N0) {
    const double N = cfg.N();
    const double h = cfg.h();
    EstimateIIRate r;
    r.gain_term = gamma * A_star * std::sqrt(N * h);
    r.nonlinear_term = std::sqrt(delta * delta + 1.0) * std::sqrt(h) * std::pow(A_star, 3) *
                       std::pow(N, 1.5);
    r.al_term = 2.0 * std::sqrt(h) * std::pow(std::expm1(N0 / h), 1.5);
    return r;
}

double estimate_II_rate(const LatticeConfig& cfg, double gamma, double delta, double A_star,
                        double N0) {
    return estimate_II_terms(cfg, gamma, delta, A_star, N0).alpha();
}

namespace {

struct BParams {
    double nu;
    double beta;
};

BParams b_params(double gamma, double delta, double u0_norm_sq, const LatticeConfig& cfg) {
    if (!(gamma > 0.0) || !(delta < 0.0)) {
        throw DomainError("estimate I needs gamma > 0 and delta < 0");
    }
    if (!(u0_norm_sq > 0.0)) throw DomainError("initial norm must be positive");
    return {1.0 / u0_norm_sq, -delta / (cfg.N() * cfg.h())};
}

}  // namespace

double norm_bound_B(double s, double gamma, double delta, double u0_norm_sq,
                    const LatticeConfig& cfg) {
    const auto p = b_params(gamma, delta, u0_norm_sq, cfg);
    const double e = std::exp(-2.0 * gamma * s);
    return gamma / (gamma * e * p.nu + p.beta * (1.0 - e));
}

std::pair<std::vector<double>, std::vector<double>> estimate_I_integrals(
    const LatticeConfig& cfg, double gamma, double delta, double u0_norm_sq,
    const std::vector<double>& times, double max_step) {
    const auto p = b_params(gamma, delta, u0_norm_sq, cfg);
    if (!(p.nu * gamma > p.beta)) {
        throw HypothesisViolated("estimate I requires P_a[u(0)] < A*^2");
    }
    std::vector<double> shifted(times.size());
    const double t0 = times.empty() ? 0.0 : times.front();
    for (std::size_t i = 0; i < times.size(); ++i) shifted[i] = times[i] - t0;
    // Include s = 0 so that F1(0) = F2(0) = 0 even when the first time is not 0.
    if (!shifted.empty()) shifted.front() = 0.0;
    auto B = [&](double s) { return norm_bound_B(s, gamma, delta, u0_norm_sq, cfg); };
    auto F1 = quad::cumulative_simpson([&](double s) { return std::sqrt(B(s)); }, shifted, max_step);
    auto F2 = quad::cumulative_simpson([&](double s) { return std::pow(B(s), 1.5); }, shifted,
                                       max_step);
    return {std::move(F1), std::move(F2)};
}

std::vector<double> estimate_I_curve(const LatticeConfig& cfg, double gamma, double delta,
                                     double u0_norm_sq, double N0, double d0,
                                     const std::vector<double>& times,
                                     const EstimateIOptions& options) {
    const auto [F1, F2] =
        estimate_I_integrals(cfg, gamma, delta, u0_norm_sq, times, options.max_step);
    const double exponent =
        options.exponent == EstimateIExponent::AsPrinted ? N0 : N0 / cfg.h();
    const double al_rate = 2.0 * std::pow(std::expm1(exponent), 1.5);
    const double c2 = std::sqrt(delta * delta + 1.0);
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i] - times.front();
        out[i] = d0 + gamma * F1[i] + c2 * F2[i] + al_rate * t;
    }
    return out;
}

double F1_printed(double t, double gamma, double delta, double u0_norm_sq,
                  const LatticeConfig& cfg) {
    const auto p = b_params(gamma, delta, u0_norm_sq, cfg);
    const double sb = std::sqrt(p.beta);
    const double num = std::sqrt(gamma * p.nu) - sb;
    const double den = sb * std::exp(-gamma * t) +
                       std::sqrt(std::expm1(2.0 * gamma * t) * p.beta + gamma * p.nu);
    return std::log(num / den) / std::sqrt(p.beta * gamma);
}

double F2_printed(double t, double gamma, double delta, double u0_norm_sq,
                  const LatticeConfig& cfg) {
    const auto p = b_params(gamma, delta, u0_norm_sq, cfg);
    const double sb = std::sqrt(p.beta);
    const double sg = std::sqrt(gamma);
    const double c = std::sqrt(p.nu * gamma - p.beta);
    const double eg = std::exp(gamma * t);
    return (sg * std::asinh(sb * eg / c) -
            std::sqrt(p.beta * gamma) * eg / std::sqrt(p.beta * std::expm1(2.0 * gamma * t) +
                                                        gamma * p.nu) -
            sg * std::asinh(sb / c) + sb / std::sqrt(p.nu)) /
           std::pow(p.beta, 1.5);
}

SmallnessCondition smallness_terms(const LatticeConfig& cfg, double gamma, double delta) {
    if (!(gamma > 0.0) || !(delta < 0.0)) {
        throw DomainError("smallness condition needs gamma > 0 and delta < 0");
    }
    const double N = cfg.N();
    const double h = cfg.h();
    SmallnessCondition s;
    s.lhs = gamma * gamma * gamma;
    s.power_term = -delta / (N * h);
    s.cubic_term = -delta * delta * delta / ((delta * delta + 1.0) * h * N * N * N);
    s.satisfied = s.lhs < std::min(s.power_term, s.cubic_term);
    return s;
}

bool smallness_condition(const LatticeConfig& cfg, double gamma, double delta) {
    return smallness_terms(cfg, gamma, delta).satisfied;
}

// ---------------------------------------------------------------------------
// Distances

ProximityReport distance_curves(const Trajectory& traj_u, const Trajectory& traj_phi,
                                const LatticeConfig& cfg, Window window) {
    if (traj_u.size() != traj_phi.size()) {
        throw GridMismatch("trajectories have " + std::to_string(traj_u.size()) + " and " +
                           std::to_string(traj_phi.size()) + " samples");
    }
    for (std::size_t i = 0; i < traj_u.size(); ++i) {
        if (std::abs(traj_u.times[i] - traj_phi.times[i]) > 1e-12 * std::max(1.0, traj_u.times[i])) {
            throw GridMismatch("sampling grids differ at sample " + std::to_string(i));
        }
        if (traj_u.states[i].size() != static_cast<std::size_t>(cfg.N()) ||
            traj_phi.states[i].size() != static_cast<std::size_t>(cfg.N())) {
            throw GridMismatch("state size does not match lattice");
        }
    }
    const auto grid = NodeGrid::from(cfg);
    std::vector<std::size_t> inside;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (grid.x[n] >= window.lo && grid.x[n] <= window.hi) inside.push_back(n);
    }
    const double h = cfg.h();
    const double Nh = cfg.N() * h;

    ProximityReport r;
    r.window_nodes = static_cast<int>(inside.size());
    r.times = traj_u.times;
    r.D_a.reserve(traj_u.size());
    r.D_a_r.reserve(traj_u.size());
    for (std::size_t i = 0; i < traj_u.size(); ++i) {
        const auto& u = traj_u.states[i];
        const auto& p = traj_phi.states[i];
        r.D_a.push_back(l2_distance(u, p, h) / std::sqrt(Nh));
        double s = 0.0;
        for (auto n : inside) s += std::norm(u[n] - p[n]);
        r.D_a_r.push_back(inside.empty() ? 0.0
                                         : std::sqrt(h * s) / std::sqrt(h * inside.size()));
    }
    if (!r.D_a.empty()) r.initial_distance = r.D_a.front() * std::sqrt(Nh);
    return r;
}

ProximityReport proximity_report(const Trajectory& traj_u, const Trajectory& traj_phi,
                                 const LatticeConfig& cfg, Window window) {
    auto r = distance_curves(traj_u, traj_phi, cfg, window);
    if (r.times.empty()) return r;
    const double gamma = cfg.gamma();
    const double delta = cfg.delta();
    const double A_star = critical_amplitude(gamma, delta);
    const double h = cfg.h();
    const double sqrtNh = std::sqrt(cfg.N() * h);

    r.N0 = al_invariant(traj_phi.states.front(), cfg);
    r.alpha = estimate_II_rate(cfg, gamma, delta, A_star, r.N0);
    const double t0 = r.times.front();
    r.bound_II.reserve(r.times.size());
    for (double t : r.times) r.bound_II.push_back((r.initial_distance + r.alpha * (t - t0)) / sqrtNh);

    r.smallness = smallness_terms(cfg, gamma, delta);
    r.smallness_ok = r.smallness.satisfied;

    const double u0_norm_sq = l2_norm_squared(traj_u.states.front(), h);
    r.estimate_I_hypothesis =
        u0_norm_sq > 0.0 && gamma / u0_norm_sq > -delta / (cfg.N() * h);
    if (r.estimate_I_hypothesis) {
        EstimateIOptions opts;
        opts.max_step = std::min(1e-2, 0.1 / gamma);
        auto printed = estimate_I_curve(cfg, gamma, delta, u0_norm_sq, r.N0, r.initial_distance,
                                        r.times, opts);
        opts.exponent = EstimateIExponent::ScaledBySpacing;
        auto scaled = estimate_I_curve(cfg, gamma, delta, u0_norm_sq, r.N0, r.initial_distance,
                                       r.times, opts);
        for (auto& v : printed) v /= sqrtNh;
        for (auto& v : scaled) v /= sqrtNh;
        r.bound_I = std::move(printed);
        r.bound_I_scaled = std::move(scaled);
    }
    return r;
}

}  // namespace dnls
