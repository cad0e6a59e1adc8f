// dnls: scenario runner for the gain/loss DNLS and Ablowitz-Ladik lattices.
//
// Exit codes: 0 success, 2 validation or usage error, 3 runtime failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dnls/runner.hpp"

namespace {

using namespace dnls;
using namespace dnls::runner;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

struct ScenarioFlags {
    std::string scenario;
    std::string config;
    std::optional<std::string> out;
    bool smoke = false;
    bool auto_t0 = false;
    std::optional<double> ap;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f, const std::string& default_scenario) {
    auto* sc = cmd->add_option("--scenario,-s", f.scenario, "Catalog scenario name");
    if (!default_scenario.empty()) sc->default_str(default_scenario);
    auto* cf = cmd->add_option("--config,-c", f.config, "Path to a key = value config file");
    sc->excludes(cf);
    cmd->add_option("--out,-o", f.out, "Output root (default: $DNLS_OUT or ./dnls_out)");
    cmd->add_flag("--smoke", f.smoke, "Cap t_end at 10");
    cmd->add_flag("--auto-t0", f.auto_t0, "Locate the dPS t0 from the first central-density maximum");
    cmd->add_option("--ap", f.ap, "Single amplitude perturbation A_p for plane-wave scenarios");
}

ScenarioSpec resolve_spec(const ScenarioFlags& f, const std::string& fallback) {
    std::string source = !f.config.empty() ? f.config : f.scenario;
    if (source.empty()) source = fallback;
    if (source.empty()) throw ValidationError("one of --scenario or --config is required");
    auto spec = load_scenario(source);
    if (f.ap) override_ap(spec, *f.ap);
    return spec;
}

RunOptions options_for(const ScenarioFlags& f, const std::string& command) {
    RunOptions o;
    o.out_root = resolve_out_root(f.out);
    o.smoke = f.smoke;
    o.auto_t0 = f.auto_t0;
    o.command = command;
    return o;
}

void print_attractor(const RunResult& r) {
    for (const auto& m : r.members) {
        if (!m.attractor) continue;
        const auto& v = *m.attractor;
        if (m.A_p) std::printf("A_p = %g: ", *m.A_p);
        std::printf("converged=%s final_mode=%d in_stable_band=%s max|P_a-A*^2|=%.3e\n",
                    v.converged ? "yes" : "no", v.final_mode, v.in_stable_band ? "yes" : "no",
                    v.max_power_error);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Gain/loss DNLS lattice simulator and scenario runner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(software_version()));

    ScenarioFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run a catalog scenario or config file");
    add_scenario_flags(simulate, sim_flags, "");

    ScenarioFlags cmp_flags;
    auto* compare = app.add_subcommand("compare-al", "Paired DNLS / AL run with distance report");
    add_scenario_flags(compare, cmp_flags, "fig12");

    ScenarioFlags att_flags;
    std::optional<double> att_window;
    auto* attractor = app.add_subcommand("attractor-check", "Long-run attractor verdict");
    add_scenario_flags(attractor, att_flags, "fig5");
    attractor->add_option("--window", att_window, "Time window inspected at the end of the run")
        ->check(CLI::PositiveNumber);

    double gate_gamma = 0.0, gate_delta = 0.0, gate_tol = 1e-12;
    std::optional<double> gate_A;
    auto* gate = app.add_subcommand("gate", "Critical amplitude and solvability verdict");
    gate->add_option("--gamma", gate_gamma, "Linear gain")->required();
    gate->add_option("--delta", gate_delta, "Nonlinear loss")->required();
    gate->add_option("--A", gate_A, "Background amplitude to test");
    gate->add_option("--tol", gate_tol, "Gate tolerance")->check(CLI::PositiveNumber);

    std::string mi_scenario;
    std::optional<double> mi_L, mi_gamma, mi_delta;
    std::optional<int> mi_N, mi_K;
    std::optional<std::string> mi_out;
    auto* mi = app.add_subcommand("mi-scan", "Modulation-instability map over carriers and sidebands");
    auto* mi_sc = mi->add_option("--scenario,-s", mi_scenario, "Take the lattice from a scenario");
    auto* mi_L_opt = mi->add_option("--L", mi_L, "Half-length of the lattice");
    mi->add_option("--N", mi_N, "Number of nodes")->needs(mi_L_opt);
    mi->add_option("--gamma", mi_gamma, "Linear gain");
    mi->add_option("--delta", mi_delta, "Nonlinear loss");
    mi->add_option("--K", mi_K, "Single carrier index (default: all 0..N/2)");
    mi->add_option("--out,-o", mi_out, "Output root (default: $DNLS_OUT or ./dnls_out)");
    mi_sc->excludes(mi_L_opt);

    auto* list = app.add_subcommand("list-scenarios", "List catalog scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    if (list->parsed()) {
        for (const auto& name : catalog_names()) {
            const auto spec = load_scenario(name);
            std::printf("%-7s %s\n", name.c_str(), spec.description.c_str());
        }
        return kExitOk;
    }

    if (gate->parsed()) {
        const double A_star = critical_amplitude(gate_gamma, gate_delta);
        std::printf("A* = %.17g\n", A_star);
        if (gate_A) {
            const bool ok = solvability_gate(*gate_A, gate_gamma, gate_delta, gate_tol);
            std::printf("A = %.17g: %s (|A - A*| = %.3e, tol = %.3e)\n", *gate_A,
                        ok ? "infinite-lattice relevant" : "finite-lattice only",
                        std::abs(*gate_A - A_star), gate_tol);
        }
        return kExitOk;
    }

    if (mi->parsed()) {
        std::optional<LatticeConfig> cfg;
        std::string name = "mi-scan";
        if (!mi_scenario.empty()) {
            const auto spec = load_scenario(mi_scenario);
            cfg = spec.lattice();
            name = spec.name + "_mi";
        } else {
            if (!mi_L || !mi_N || !mi_gamma || !mi_delta) {
                throw ValidationError("mi-scan needs --scenario or all of --L --N --gamma --delta");
            }
            cfg = LatticeConfig::from_nodes(*mi_L, *mi_N, *mi_gamma, *mi_delta);
        }
        std::vector<int> carriers;
        if (mi_K) {
            check_wavenumber(*mi_K, cfg->N());
            carriers.push_back(*mi_K);
        } else {
            for (int K = 0; 2 * K <= cfg->N(); ++K) carriers.push_back(K);
        }
        const auto res = run_mi_scan(*cfg, carriers, name, resolve_out_root(mi_out));
        std::printf("A* = %.17g\n", critical_amplitude(cfg->gamma(), cfg->delta()));
        for (const auto& s : res.scans) {
            std::printf("K = %3d  %s  max growth %.6e at M = %d\n", s.K,
                        s.carrier_unstable ? "unstable" : "stable  ", s.max_growth, s.most_unstable_M);
        }
        std::printf("wrote %s\n", (res.dir / "mi_scan.csv").string().c_str());
        return kExitOk;
    }

    if (simulate->parsed()) {
        auto spec = resolve_spec(sim_flags, "");
        const auto r = run_scenario(spec, options_for(sim_flags, "simulate"));
        print_attractor(r);
        std::printf("wrote %s\n", r.dir.string().c_str());
        return kExitOk;
    }

    if (compare->parsed()) {
        auto spec = resolve_spec(cmp_flags, "fig12");
        spec.kind = RunKind::Pair;
        spec.outputs.insert(Product::Proximity);
        const auto r = run_scenario(spec, options_for(cmp_flags, "compare-al"));
        const auto& p = *r.proximity;
        double d_max = 0.0;
        for (double d : p.D_a) d_max = std::max(d_max, d);
        bool bound_ok = true;
        for (std::size_t i = 0; i < p.times.size(); ++i) bound_ok = bound_ok && p.D_a[i] <= p.bound_II[i];
        std::printf("dPS t0 = %.6g  N0 = %.6g  alpha = %.6e\n", *r.dps_t0, p.N0, p.alpha);
        std::printf("max D_a = %.6e  estimate II %s  estimate I %s  smallness condition %s\n", d_max,
                    bound_ok ? "holds" : "VIOLATED",
                    p.estimate_I_hypothesis ? "evaluated" : "not applicable (P_a[u(0)] >= A*^2)",
                    p.smallness.satisfied ? "holds" : "fails");
        std::printf("wrote %s\n", r.dir.string().c_str());
        return kExitOk;
    }

    if (attractor->parsed()) {
        auto spec = resolve_spec(att_flags, "fig5");
        if (spec.kind != RunKind::DNLS && spec.kind != RunKind::Pair) {
            throw ValidationError("attractor-check needs a periodic DNLS scenario");
        }
        spec.outputs.insert(Product::Attractor);
        if (att_window) spec.attractor_window = *att_window;
        const auto r = run_scenario(spec, options_for(att_flags, "attractor-check"));
        print_attractor(r);
        std::printf("wrote %s\n", r.dir.string().c_str());
        return kExitOk;
    }
    return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dnls::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const dnls::RuntimeFailure& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return kExitRuntime;
    }
}
