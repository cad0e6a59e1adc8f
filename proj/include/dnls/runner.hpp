#pragma once

// Executes scenarios end to end: integration, analyses, CSV products and the
// JSON manifest. The CLI is a thin shell over these functions.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnls/analysis.hpp"
#include "dnls/proximity.hpp"
#include "dnls/scenario.hpp"
#include "dnls/timestep.hpp"

namespace dnls::runner {

inline constexpr const char* kSoftwareName = "dnls_lattice";
const char* software_version() noexcept;

struct RunOptions {
    std::filesystem::path out_root = "dnls_out";
    bool smoke = false;
    /// Take the dPS t0 from the first central-density maximum of the DNLS run.
    bool auto_t0 = false;
    /// Subcommand recorded in the manifest.
    std::string command = "simulate";
};

struct MemberRun {
    std::optional<double> A_p;
    Trajectory traj;
    std::optional<AttractorVerdict> attractor;
    std::optional<PowerBoundResult> power;
};

struct RunResult {
    std::filesystem::path dir;
    nlohmann::json manifest;
    std::vector<MemberRun> members;
    /// AL partner of a pair run.
    std::optional<Trajectory> partner;
    std::optional<ProximityReport> proximity;
    std::optional<double> dps_t0;
};

/// Output root: explicit flag, else $DNLS_OUT, else ./dnls_out.
std::filesystem::path resolve_out_root(const std::optional<std::string>& flag);

/// Runs a validated spec and writes <out_root>/<name>/. Smoke mode and
/// --auto-t0 are applied here.
RunResult run_scenario(ScenarioSpec spec, const RunOptions& options);

/// Time of the first local maximum of the central density that exceeds
/// twice the background density. Throws ValidationError if none exists.
double locate_first_peak(const Trajectory& traj, int central, double background);

/// Stability map over carriers K = 0..N/2 written to <out_root>/<name>/.
struct MIScanResult {
    std::filesystem::path dir;
    std::vector<MIScan> scans;
    nlohmann::json manifest;
};
MIScanResult run_mi_scan(const LatticeConfig& cfg, const std::vector<int>& carriers,
                         const std::string& name, const std::filesystem::path& out_root);

/// {A_star, tol, verdict, label} for one background amplitude.
nlohmann::json gate_record(double A, double gamma, double delta, double tol);

/// Recomputes every gate record of a manifest from its own parameters.
bool manifest_gate_consistent(const nlohmann::json& manifest);

}  // namespace dnls::runner
