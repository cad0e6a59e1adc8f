#pragma once

// Scenario descriptions for the runner: a flat `key = value` config format,
// the built-in catalog, and the resolved ScenarioSpec every run starts from.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/proximity.hpp"
#include "dnls/timestep.hpp"

namespace dnls::runner {

/// Which lattices a scenario integrates. `Pair` runs the DNLS from the
/// scenario IC next to the AL lattice started from the dPS at t = 0.
enum class RunKind { DNLS, AL, Shifted, Pair };

enum class ICKind { PlaneWave, Algebraic, Sech, Dps };

enum class Product {
    Densities,   ///< densities.csv: t, x, |u|^2
    Spectrum,    ///< spectrum.csv: t, K, |A_K|
    PhasePlane,  ///< phase_plane.csv: t, Re u_c, Im u_c
    MIScan,      ///< mi_scan.csv: K, M, growth
    Proximity,   ///< proximity.csv: t, D_a, D_a_r, bound_I, bound_II
    Attractor,   ///< verdict in the manifest
    Wedge,       ///< wedge.csv: t, x_minus, x_plus
    Central,     ///< central.csv and dps_profile.csv against the dPS
    Power,       ///< power.csv: t, P_a, bound
};

const char* to_string(RunKind k) noexcept;
const char* to_string(ICKind k) noexcept;
const char* to_string(Product p) noexcept;

struct ScenarioSpec {
    std::string name;
    std::string description;
    RunKind kind = RunKind::DNLS;

    double L = 0.0;
    int N = 0;
    double gamma = 0.0;
    double delta = 0.0;
    Boundary bc = Boundary::Periodic;

    ICKind ic = ICKind::PlaneWave;
    double A = 0.0;
    /// One run per entry for plane-wave ICs.
    std::vector<double> A_p;
    int K = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double sigma = 0.0;
    double rho = 0.0;

    /// dPS reference: peak time and background (defaults to A).
    std::optional<double> dps_t0;
    std::optional<double> dps_q;

    IntegratorSpec integrator;
    /// Time spacing of density and spectrum frames; 0 means every sample.
    double emit_every = 0.0;
    std::set<Product> outputs;

    double noise_amplitude = 0.0;
    std::uint64_t noise_seed = 0;

    Window window;
    double gate_tol = 1e-12;
    double attractor_window = 1.0;
    double attractor_tol = 1e-3;

    LatticeConfig lattice() const;
    std::size_t members() const noexcept;
    /// Initial state of member `m`, including the seeded noise floor. For the
    /// shifted system this is the physical field u(0).
    ComplexState initial_state(std::size_t m) const;
    double background(std::size_t m) const;
    double A_star() const;
    double dps_background() const;
    bool wants(Product p) const { return outputs.count(p) != 0; }

    /// Throws ValidationError naming the violated precondition.
    void validate() const;
};

/// Parses config text. `origin` is used in messages only.
ScenarioSpec parse_config(std::string_view text, std::string_view origin = "<config>");

const std::vector<std::string>& catalog_names();
/// Config text of a catalog entry; throws ConfigError for unknown names.
const std::string& catalog_text(const std::string& name);

/// Catalog name or path to a config file.
ScenarioSpec load_scenario(const std::string& name_or_path);

/// Caps t_end at 10 time units past the start.
void apply_smoke(ScenarioSpec& spec);

/// Replaces the A_p list; only valid for plane-wave ICs.
void override_ap(ScenarioSpec& spec, double A_p);

}  // namespace dnls::runner
