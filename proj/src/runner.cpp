#include "dnls/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "dnls/products.hpp"

#ifndef DNLS_VERSION
#define DNLS_VERSION "0.0.0"
#endif

namespace dnls::runner {

using nlohmann::json;
namespace fs = std::filesystem;

const char* software_version() noexcept { return DNLS_VERSION; }

fs::path resolve_out_root(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("DNLS_OUT"); env != nullptr && *env != '\0') return env;
    return "dnls_out";
}

json gate_record(double A, double gamma, double delta, double tol) {
    const bool verdict = solvability_gate(A, gamma, delta, tol);
    return {{"A", A},
            {"A_star", critical_amplitude(gamma, delta)},
            {"tol", tol},
            {"verdict", verdict},
            {"label", verdict ? "infinite-lattice relevant" : "finite-lattice only"}};
}

bool manifest_gate_consistent(const json& m) {
    const auto& p = m.at("parameters");
    const double gamma = p.at("gamma").get<double>();
    const double delta = p.at("delta").get<double>();
    const auto& gate = m.at("gate");
    const double tol = gate.at("tol").get<double>();
    if (gate.at("A_star").get<double>() != critical_amplitude(gamma, delta)) return false;
    bool all = true;
    for (const auto& rec : gate.at("members")) {
        const bool v = solvability_gate(rec.at("A").get<double>(), gamma, delta, tol);
        if (v != rec.at("verdict").get<bool>()) return false;
        all = all && v;
    }
    return all == gate.at("verdict").get<bool>();
}

double locate_first_peak(const Trajectory& traj, int central, double background) {
    const auto c = static_cast<std::size_t>(central);
    const double floor = 2.0 * background * background;
    auto density = [&](std::size_t i) { return std::norm(traj.states[i][c]); };
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double d = density(i);
        if (d > floor && d > density(i - 1) && d >= density(i + 1)) return traj.times[i];
    }
    throw ValidationError("no central-density maximum above twice the background density");
}

namespace {

json stats_json(const IntegratorStats& s) {
    return {{"accepted_steps", s.accepted_steps}, {"rejected_steps", s.rejected_steps},
            {"rhs_evaluations", s.rhs_evaluations}, {"min_step", s.min_step},
            {"max_step", s.max_step}};
}

json attractor_json(const AttractorVerdict& v, double window) {
    return {{"converged", v.converged},           {"final_mode", v.final_mode},
            {"in_stable_band", v.in_stable_band}, {"max_power_error", v.max_power_error},
            {"max_modulus_variance", v.max_modulus_variance}, {"window", window}};
}

json parameters_json(const ScenarioSpec& s, const LatticeConfig& cfg) {
    json ic = {{"kind", to_string(s.ic)}};
    switch (s.ic) {
        case ICKind::PlaneWave:
            ic["A"] = s.A;
            ic["A_p"] = s.A_p;
            ic["K"] = s.K;
            break;
        case ICKind::Algebraic:
            ic["A"] = s.A;
            ic["lambda1"] = s.lambda1;
            ic["lambda2"] = s.lambda2;
            ic["lambda3"] = s.lambda3;
            break;
        case ICKind::Sech:
            ic["A"] = s.A;
            ic["sigma"] = s.sigma;
            ic["rho"] = s.rho;
            break;
        case ICKind::Dps:
            break;
    }
    json p = {{"system", to_string(s.kind)},
              {"L", cfg.L()},
              {"N", cfg.N()},
              {"h", cfg.h()},
              {"k", cfg.k()},
              {"gamma", cfg.gamma()},
              {"delta", cfg.delta()},
              {"bc", to_string(cfg.bc())},
              {"ic", ic},
              {"noise", {{"amplitude", s.noise_amplitude}, {"seed", s.noise_seed}}},
              {"window", {{"lo", s.window.lo}, {"hi", s.window.hi}}}};
    json outputs = json::array();
    for (auto prod : s.outputs) outputs.push_back(to_string(prod));
    p["outputs"] = outputs;
    return p;
}

json integrator_json(const IntegratorSpec& in, double emit_every) {
    return {{"method", to_string(in.method)}, {"dt", in.dt},
            {"rtol", in.rtol},                {"atol", in.atol},
            {"t_end", in.t_end},              {"sample_every", in.sample_every},
            {"emit_every", emit_every}};
}

std::string member_suffix(const ScenarioSpec& spec, std::size_t m) {
    if (spec.members() < 2) return "";
    // Short form for file names; the manifest keeps the exact value.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", spec.A_p[m]);
    return std::string("_ap") + buf;
}

class Emitter {
public:
    Emitter(fs::path dir, std::string title) : dir_(std::move(dir)), title_(std::move(title)) {}

    template <typename Fn>
    void csv(const std::string& stem, const std::string& product, Fn&& write) {
        const std::string name = stem + ".csv";
        const std::size_t rows = write(dir_ / name);
        write_text(dir_ / ("plot_" + stem + ".txt"), plot_script(stem, name, title_ + " " + stem));
        files_.push_back({{"name", name}, {"product", product}, {"rows", rows},
                          {"plot", "plot_" + stem + ".txt"}});
    }

    const json& files() const { return files_; }

private:
    fs::path dir_;
    std::string title_;
    json files_ = json::array();
};

Trajectory run_system(RunKind kind, const ComplexState& u0, const LatticeConfig& cfg,
                      const IntegratorSpec& integ, double background) {
    switch (kind) {
        case RunKind::AL: return integrate(System::AL, u0, cfg, integ);
        case RunKind::Shifted:
            return integrate(System::Shifted, physical_to_shifted(u0, background), cfg, integ, background);
        case RunKind::DNLS:
        case RunKind::Pair: return integrate(System::DNLS, u0, cfg, integ);
    }
    throw ValidationError("unknown system");
}

}  // namespace

RunResult run_scenario(ScenarioSpec spec, const RunOptions& options) {
    const auto wall_start = std::chrono::steady_clock::now();
    if (options.smoke) apply_smoke(spec);
    spec.validate();

    const auto cfg = spec.lattice();
    const auto grid = NodeGrid::from(cfg);
    const double A_star = spec.A_star();

    RunResult result;
    result.dir = options.out_root / spec.name;
    std::error_code ec;
    fs::create_directories(result.dir, ec);
    if (ec) throw IOError("cannot create '" + result.dir.string() + "': " + ec.message());

    Emitter emit(result.dir, spec.name);
    json runs = json::array();
    json gate_members = json::array();
    bool gate_all = true;

    for (std::size_t m = 0; m < spec.members(); ++m) {
        MemberRun member;
        if (spec.ic == ICKind::PlaneWave) member.A_p = spec.A_p[m];
        const double bg = spec.background(m);
        auto rec = gate_record(bg, spec.gamma, spec.delta, spec.gate_tol);
        gate_all = gate_all && rec["verdict"].get<bool>();
        gate_members.push_back(rec);

        member.traj = run_system(spec.kind, spec.initial_state(m), cfg, spec.integrator, bg);
        const auto& traj = member.traj;
        const auto states = physical_states(traj);
        const auto rows = emit_indices(traj.times, spec.emit_every);
        const std::string sfx = member_suffix(spec, m);
        const std::string sys = spec.kind == RunKind::Pair ? "_dnls" : "";

        json run = {{"member", m}, {"system", to_string(traj.system)}, {"samples", traj.size()},
                    {"background", bg}, {"stats", stats_json(traj.stats)}};
        if (member.A_p) run["A_p"] = *member.A_p;
        if (!traj.empty()) run["final_averaged_power"] = traj.diagnostics.back().averaged_power;

        if (spec.wants(Product::Densities)) {
            emit.csv("densities" + sys + sfx, "densities", [&](const fs::path& p) {
                return write_densities(p, traj.times, states, grid, rows);
            });
        }
        if (spec.wants(Product::Spectrum)) {
            emit.csv("spectrum" + sys + sfx, "spectrum", [&](const fs::path& p) {
                return write_spectrum(p, traj.times, states, cfg.h(), rows);
            });
        }
        if (spec.wants(Product::PhasePlane)) {
            emit.csv("phase_plane" + sys + sfx, "phase_plane", [&](const fs::path& p) {
                return write_phase_plane(p, traj.times, states, cfg.central_index());
            });
        }
        if (spec.wants(Product::Wedge)) {
            emit.csv("wedge" + sfx, "wedge",
                     [&](const fs::path& p) { return write_wedge(p, traj.times, bg, rows); });
        }
        if (spec.wants(Product::Power) && traj.system == System::DNLS) {
            member.power = power_bound_check(traj, cfg);
            run["power_bound"] = {{"passed", member.power->passed}};
            emit.csv("power" + sfx, "power",
                     [&](const fs::path& p) { return write_power(p, traj, *member.power); });
        }
        if (spec.wants(Product::Attractor) && traj.system == System::DNLS && !traj.empty()) {
            const double span = traj.times.back() - traj.times.front();
            const double window = std::min(spec.attractor_window, span);
            if (window > 0.0) {
                member.attractor = attractor_verdict(traj, cfg, A_star, spec.attractor_tol, window);
                run["attractor"] = attractor_json(*member.attractor, window);
            }
        }
        if (spec.wants(Product::Central) || spec.kind == RunKind::Pair) {
            double t0 = spec.dps_t0.value_or(0.0);
            if (options.auto_t0) t0 = locate_first_peak(traj, cfg.central_index(), spec.dps_background());
            result.dps_t0 = t0;
        }
        if (spec.wants(Product::Central)) {
            const DpsParams dps{spec.dps_background(), *result.dps_t0};
            emit.csv("central" + sfx, "central", [&](const fs::path& p) {
                return write_central(p, traj.times, states, cfg.central_index(), grid, dps);
            });
            emit.csv("dps_profile" + sfx, "dps_profile", [&](const fs::path& p) {
                return write_dps_profile(p, traj.times, states, grid, dps);
            });
        }
        runs.push_back(run);
        result.members.push_back(std::move(member));
    }

    json manifest;
    if (spec.kind == RunKind::Pair) {
        const DpsParams dps{spec.dps_background(), *result.dps_t0};
        const auto phi0 = dps_eval(grid, 0.0, dps);
        result.partner = integrate(System::AL, phi0, cfg, spec.integrator);
        const auto& al = *result.partner;
        const auto rows = emit_indices(al.times, spec.emit_every);
        if (spec.wants(Product::Densities)) {
            emit.csv("densities_al", "densities", [&](const fs::path& p) {
                return write_densities(p, al.times, al.states, grid, rows);
            });
        }
        if (spec.wants(Product::Spectrum)) {
            emit.csv("spectrum_al", "spectrum", [&](const fs::path& p) {
                return write_spectrum(p, al.times, al.states, cfg.h(), rows);
            });
        }
        result.proximity = proximity_report(result.members.front().traj, al, cfg, spec.window);
        const auto& r = *result.proximity;
        if (spec.wants(Product::Proximity)) {
            emit.csv("proximity", "proximity",
                     [&](const fs::path& p) { return write_proximity(p, r); });
        }
        double d_max = 0.0;
        for (double d : r.D_a) d_max = std::max(d_max, d);
        manifest["proximity"] = {
            {"N0", r.N0},
            {"alpha", r.alpha},
            {"initial_distance", r.initial_distance},
            {"window_nodes", r.window_nodes},
            {"max_D_a", d_max},
            {"estimate_I_hypothesis", r.estimate_I_hypothesis},
            {"smallness",
             {{"satisfied", r.smallness.satisfied}, {"gamma_cubed", r.smallness.lhs},
              {"power_term", r.smallness.power_term}, {"cubic_term", r.smallness.cubic_term}}},
            {"partner", {{"system", "al"}, {"ic", "dps"}, {"stats", stats_json(al.stats)}}}};
    }
    if (spec.wants(Product::MIScan)) {
        std::vector<MIScan> scans;
        for (int K = 0; 2 * K <= cfg.N(); ++K) scans.push_back(mi_scan(K, cfg, A_star, spec.delta));
        emit.csv("mi_scan", "mi_scan", [&](const fs::path& p) { return write_mi_scan(p, scans); });
    }

    manifest["manifest_version"] = 1;
    manifest["scenario"] = spec.name;
    manifest["description"] = spec.description;
    manifest["command"] = options.command;
    manifest["software"] = {{"name", kSoftwareName}, {"version", software_version()}};
    manifest["smoke"] = options.smoke;
    manifest["parameters"] = parameters_json(spec, cfg);
    if (result.dps_t0) {
        manifest["parameters"]["dps"] = {{"q", spec.dps_background()},
                                         {"t0", *result.dps_t0},
                                         {"t0_source", options.auto_t0 ? "auto" : "config"},
                                         {"peak_density", dps_peak_density(spec.dps_background())}};
    }
    manifest["integrator"] = integrator_json(spec.integrator, spec.emit_every);
    manifest["gate"] = {{"A_star", A_star}, {"tol", spec.gate_tol}, {"verdict", gate_all},
                        {"members", gate_members}};
    manifest["runs"] = runs;
    manifest["files"] = emit.files();
    manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    write_json(result.dir / "manifest.json", manifest);
    result.manifest = std::move(manifest);
    return result;
}

MIScanResult run_mi_scan(const LatticeConfig& cfg, const std::vector<int>& carriers,
                         const std::string& name, const fs::path& out_root) {
    const auto wall_start = std::chrono::steady_clock::now();
    const double A_star = critical_amplitude(cfg.gamma(), cfg.delta());
    MIScanResult result;
    for (int K : carriers) result.scans.push_back(mi_scan(K, cfg, A_star, cfg.delta()));

    result.dir = out_root / name;
    std::error_code ec;
    fs::create_directories(result.dir, ec);
    if (ec) throw IOError("cannot create '" + result.dir.string() + "': " + ec.message());
    Emitter emit(result.dir, name);
    emit.csv("mi_scan", "mi_scan", [&](const fs::path& p) { return write_mi_scan(p, result.scans); });

    json unstable = json::array();
    for (const auto& s : result.scans) {
        if (s.carrier_unstable) unstable.push_back(s.K);
    }
    json& m = result.manifest;
    m["manifest_version"] = 1;
    m["scenario"] = name;
    m["command"] = "mi-scan";
    m["software"] = {{"name", kSoftwareName}, {"version", software_version()}};
    m["parameters"] = {{"L", cfg.L()},         {"N", cfg.N()},         {"h", cfg.h()},
                       {"k", cfg.k()},         {"gamma", cfg.gamma()}, {"delta", cfg.delta()},
                       {"bc", to_string(cfg.bc())}};
    // The scan linearises about the critical background itself.
    constexpr double tol = 1e-12;
    m["gate"] = {{"A_star", A_star},
                 {"tol", tol},
                 {"verdict", true},
                 {"members", json::array({gate_record(A_star, cfg.gamma(), cfg.delta(), tol)})}};
    m["unstable_carriers"] = unstable;
    m["files"] = emit.files();
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    write_json(result.dir / "manifest.json", m);
    return result;
}

}  // namespace dnls::runner
