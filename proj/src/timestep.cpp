#include "dnls/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dnls {

const char* to_string(System s) noexcept {
    switch (s) {
        case System::DNLS: return "dnls";
        case System::AL: return "al";
        case System::Shifted: return "shifted";
    }
    return "?";
}

const char* to_string(Method m) noexcept {
    return m == Method::RK4Fixed ? "rk4" : "dp54";
}

void IntegratorSpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw ValidationError("rtol and atol must be positive");
    if (!(sample_every >= dt)) throw ValidationError("sample_every must be >= dt");
    if (!std::isfinite(t_end)) throw ValidationError("t_end must be finite");
}

namespace {

using Buffer = std::vector<cplx>;

// Dormand-Prince 5(4) tableau (autonomous systems, so the c_i nodes are unused).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (difference between the 5th and embedded 4th order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Rhs {
public:
    Rhs(System system, const LatticeConfig& cfg, std::optional<double> background)
        : system_(system), cfg_(cfg), A_(background.value_or(0.0)) {}

    void operator()(std::span<const cplx> y, std::span<cplx> out) {
        ++evaluations;
        switch (system_) {
            case System::DNLS: dnls_rhs_into(y, out, cfg_); break;
            case System::AL: al_rhs_into(y, out, cfg_); break;
            case System::Shifted: shifted_rhs_into(y, out, cfg_, A_); break;
        }
    }

    long long evaluations = 0;

private:
    System system_;
    const LatticeConfig& cfg_;
    double A_;
};

double al_invariant_of(std::span<const cplx> phi, double h) {
    double s = 0.0;
    for (const auto& p : phi) s += std::log1p(std::norm(p));
    return h * s;
}

SampleDiagnostics diagnose(System system, const ComplexState& s, const LatticeConfig& cfg,
                           double A) {
    SampleDiagnostics d;
    if (system == System::Shifted) {
        double sum = 0.0;
        for (const auto& U : s.values()) sum += std::norm(U + A);
        d.averaged_power = sum / static_cast<double>(s.size());
        return d;
    }
    d.averaged_power = averaged_power(s);
    if (system == System::DNLS) d.balance_residual = instantaneous_balance_residual(s, cfg);
    if (system == System::AL) d.al_invariant = al_invariant_of(s.values(), cfg.h());
    return d;
}

void check_blow_up(std::span<const cplx> y, double t) {
    for (const auto& v : y) {
        const double m = std::abs(v);
        if (!(m <= kBlowUpModulus)) {
            throw BlowUpDetected("node modulus exceeded " + std::to_string(kBlowUpModulus) +
                                 " at t=" + std::to_string(t));
        }
    }
}

class Stepper {
public:
    Stepper(std::size_t n, Rhs& rhs) : rhs_(rhs), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n),
                                       tmp(n), ynew(n) {}

    void rk4(Buffer& y, double h) {
        const std::size_t n = y.size();
        rhs_(y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        rhs_(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rhs_(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        rhs_(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// One Dormand-Prince attempt from y with step h. Leaves the candidate in
    /// `ynew` and its derivative in k7; returns the scaled max-norm error.
    double dp54(const Buffer& y, double h, double rtol, double atol) {
        const std::size_t n = y.size();
        if (!fsal_valid) rhs_(y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        rhs_(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs_(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        }
        rhs_(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        }
        rhs_(tmp, k5);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
        }
        rhs_(tmp, k6);
        for (std::size_t i = 0; i < n; ++i) {
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        }
        rhs_(ynew, k7);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * k7[i]);
            const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        if (!std::isfinite(err)) err = 1e300;
        return err;
    }

    void accept_dp54(Buffer& y) {
        std::swap(y, ynew);
        std::swap(k1, k7);
        fsal_valid = true;
    }

    void reject_dp54() { fsal_valid = true; }  // k1 still belongs to y

private:
    Rhs& rhs_;

public:
    Buffer k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    bool fsal_valid = false;
};

}  // namespace

Trajectory integrate(System system, const ComplexState& ic, const LatticeConfig& cfg,
                     const IntegratorSpec& spec, std::optional<double> background,
                     const SampleObserver& observer) {
    spec.validate();
    if (ic.size() != static_cast<std::size_t>(cfg.N())) {
        throw LengthMismatch("initial condition has " + std::to_string(ic.size()) +
                             " nodes, lattice has " + std::to_string(cfg.N()));
    }
    ic.check_finite();
    if (system == System::Shifted) {
        if (!background) throw ConfigError("shifted system needs a background amplitude");
        if (cfg.bc() != Boundary::DirichletZero) {
            throw ConfigError("shifted system needs Dirichlet boundaries");
        }
    } else if (cfg.bc() != Boundary::Periodic) {
        throw ConfigError(std::string(to_string(system)) + " needs periodic boundaries");
    }

    const double A = background.value_or(0.0);
    Trajectory traj;
    traj.system = system;
    traj.background = system == System::Shifted ? background : std::nullopt;

    const double t0 = ic.t();
    Buffer y(ic.values().begin(), ic.values().end());
    double t = t0;

    auto record = [&](double when) -> bool {
        ComplexState s(y, when);
        traj.times.push_back(when);
        traj.diagnostics.push_back(diagnose(system, s, cfg, A));
        traj.states.push_back(std::move(s));
        return observer ? observer(traj.states.back()) : true;
    };

    Rhs rhs(system, cfg, background);
    Stepper stepper(y.size(), rhs);
    IntegratorStats& st = traj.stats;
    st.min_step = std::numeric_limits<double>::infinity();
    auto note_step = [&](double h) {
        ++st.accepted_steps;
        st.min_step = std::min(st.min_step, h);
        st.max_step = std::max(st.max_step, h);
    };

    bool keep_going = record(t);
    const double snap = 1e-9 * spec.sample_every;
    double h_prop = spec.dt;

    for (long long j = 1; keep_going && t < spec.t_end - snap; ++j) {
        double target = t0 + static_cast<double>(j) * spec.sample_every;
        if (target > spec.t_end - snap) target = spec.t_end;

        if (spec.method == Method::RK4Fixed) {
            const double span = target - t;
            const auto steps = std::max<long long>(1, static_cast<long long>(
                                                          std::ceil(span / spec.dt - 1e-9)));
            const double h = span / static_cast<double>(steps);
            for (long long s = 0; s < steps; ++s) {
                stepper.rk4(y, h);
                note_step(h);
                check_blow_up(y, t + (s + 1) * h);
            }
        } else {
            while (t < target) {
                const double remaining = target - t;
                if (remaining <= 1e-13 * std::max(1.0, std::abs(target))) break;
                const bool clipped = h_prop >= remaining;
                const double h = clipped ? remaining : h_prop;
                if (h < kMinAdaptiveStep) {
                    throw StepFailure("adaptive step underflow (h=" + std::to_string(h) +
                                      ") at t=" + std::to_string(t));
                }
                const double err = stepper.dp54(y, h, spec.rtol, spec.atol);
                double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                if (err <= 1.0) {
                    stepper.accept_dp54(y);
                    t = clipped ? target : t + h;
                    note_step(h);
                    check_blow_up(y, t);
                    fac = std::clamp(fac, 0.2, 5.0);
                    if (!(clipped && fac >= 1.0)) h_prop = h * fac;
                } else {
                    ++st.rejected_steps;
                    stepper.reject_dp54();
                    h_prop = h * std::clamp(fac, 0.2, 1.0);
                }
            }
        }
        t = target;
        keep_going = record(t);
    }

    st.rhs_evaluations = rhs.evaluations;
    if (st.accepted_steps == 0) st.min_step = 0.0;
    return traj;
}

// ---------------------------------------------------------------------------
// Diagnostics

double averaged_power(const ComplexState& state) {
    if (state.size() == 0) return 0.0;
    double s = 0.0;
    for (const auto& v : state.values()) s += std::norm(v);
    return s / static_cast<double>(state.size());
}

double instantaneous_balance_residual(const ComplexState& state, const LatticeConfig& cfg) {
    const auto rhs = dnls_rhs(state, cfg);
    double dpower = 0.0, p2 = 0.0, p4 = 0.0;
    for (std::size_t n = 0; n < state.size(); ++n) {
        const cplx u = state[n];
        dpower += 2.0 * (std::conj(u) * rhs[n]).real();
        const double d = std::norm(u);
        p2 += d;
        p4 += d * d;
    }
    const double h = cfg.h();
    return std::abs(h * dpower - 2.0 * cfg.gamma() * h * p2 - 2.0 * cfg.delta() * h * p4);
}

std::vector<double> power_balance_residual(const Trajectory& traj, const LatticeConfig& cfg) {
    if (traj.size() < 3) throw NeedThreeSamples("power balance needs at least three samples");
    const double h = cfg.h();
    std::vector<double> power(traj.size()), quartic(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double p2 = 0.0, p4 = 0.0;
        for (const auto& u : traj.states[i].values()) {
            const double d = std::norm(u);
            p2 += d;
            p4 += d * d;
        }
        power[i] = h * p2;
        quartic[i] = h * p4;
    }
    std::vector<double> out;
    out.reserve(traj.size() - 2);
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double dt = traj.times[i + 1] - traj.times[i - 1];
        const double dpdt = (power[i + 1] - power[i - 1]) / dt;
        out.push_back(
            std::abs(dpdt - 2.0 * cfg.gamma() * power[i] - 2.0 * cfg.delta() * quartic[i]));
    }
    return out;
}

double averaged_power_bound(double P0, double gamma, double delta, double t) {
    if (!(gamma > 0.0) || !(delta < 0.0)) {
        throw DomainError("averaged power bound needs gamma > 0 and delta < 0");
    }
    if (P0 <= 0.0) return 0.0;
    const double decay = std::exp(-2.0 * gamma * t);
    return 1.0 / (decay / P0 + (-delta / gamma) * (1.0 - decay));
}

PowerBoundResult power_bound_check(const Trajectory& traj, const LatticeConfig& cfg,
                                   double rel_tol) {
    PowerBoundResult r;
    if (traj.empty()) return r;
    const double P0 = traj.diagnostics.front().averaged_power;
    const double t0 = traj.times.front();
    r.bound.reserve(traj.size());
    r.margin.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double b = averaged_power_bound(P0, cfg.gamma(), cfg.delta(), traj.times[i] - t0);
        const double m = b - traj.diagnostics[i].averaged_power;
        r.bound.push_back(b);
        r.margin.push_back(m);
        if (m < -rel_tol * b) r.passed = false;
    }
    return r;
}

}  // namespace dnls
