#include "dnls/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace dnls::runner {

const char* to_string(RunKind k) noexcept {
    switch (k) {
        case RunKind::DNLS: return "dnls";
        case RunKind::AL: return "al";
        case RunKind::Shifted: return "shifted";
        case RunKind::Pair: return "pair";
    }
    return "?";
}

const char* to_string(ICKind k) noexcept {
    switch (k) {
        case ICKind::PlaneWave: return "plane_wave";
        case ICKind::Algebraic: return "algebraic";
        case ICKind::Sech: return "sech";
        case ICKind::Dps: return "dps";
    }
    return "?";
}

const char* to_string(Product p) noexcept {
    switch (p) {
        case Product::Densities: return "densities";
        case Product::Spectrum: return "spectrum";
        case Product::PhasePlane: return "phase_plane";
        case Product::MIScan: return "mi_scan";
        case Product::Proximity: return "proximity";
        case Product::Attractor: return "attractor";
        case Product::Wedge: return "wedge";
        case Product::Central: return "central";
        case Product::Power: return "power";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// ScenarioSpec

LatticeConfig ScenarioSpec::lattice() const {
    return LatticeConfig::from_nodes(L, N, gamma, delta, bc);
}

std::size_t ScenarioSpec::members() const noexcept {
    return ic == ICKind::PlaneWave ? A_p.size() : 1;
}

double ScenarioSpec::A_star() const { return critical_amplitude(gamma, delta); }

double ScenarioSpec::background(std::size_t m) const {
    if (ic == ICKind::PlaneWave) return A + A_p.at(m);
    if (ic == ICKind::Dps) return dps_background();
    return A;
}

double ScenarioSpec::dps_background() const {
    if (dps_q) return *dps_q;
    return ic == ICKind::Dps ? A_star() : A;
}

ComplexState ScenarioSpec::initial_state(std::size_t m) const {
    const auto grid = NodeGrid::from(lattice());
    ComplexState u;
    switch (ic) {
        case ICKind::PlaneWave:
            u = make_initial_condition(PlaneWaveIC{A, A_p.at(m), K}, grid);
            break;
        case ICKind::Algebraic:
            u = make_initial_condition(AlgebraicBumpIC{A, lambda1, lambda2, lambda3}, grid);
            break;
        case ICKind::Sech:
            u = make_initial_condition(SechBumpIC{A, sigma, rho}, grid);
            break;
        case ICKind::Dps:
            u = dps_eval(grid, 0.0, DpsParams{dps_background(), dps_t0.value_or(0.0)});
            break;
    }
    if (noise_amplitude > 0.0) {
        std::mt19937_64 rng(noise_seed + m);
        std::normal_distribution<double> normal;
        for (auto& v : u.mutable_values()) {
            const double re = normal(rng);
            const double im = normal(rng);
            v += noise_amplitude * cplx{re, im};
        }
    }
    return u;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

bool is_unit_spacing(const LatticeConfig& cfg) { return std::abs(cfg.h() - 1.0) <= 1e-12; }

}  // namespace

void ScenarioSpec::validate() const {
    require(!name.empty(), "scenario name must not be empty");
    std::optional<LatticeConfig> cfg;
    try {
        cfg = lattice();
    } catch (const InputError& e) {
        throw ValidationError(std::string("lattice: ") + e.what());
    }
    require(gamma > 0.0, "gamma must be positive (linear gain)");
    require(delta < 0.0, "delta must be negative (nonlinear loss)");

    if (kind == RunKind::Shifted) {
        require(bc == Boundary::DirichletZero, "system = shifted needs bc = dirichlet");
    } else {
        require(bc == Boundary::Periodic,
                std::string("system = ") + to_string(kind) + " needs bc = periodic");
    }

    switch (ic) {
        case ICKind::PlaneWave:
            require(!A_p.empty(), "plane_wave IC needs at least one A_p");
            require(K >= 0 && 2 * K <= N, "K must lie in [0, N/2]");
            break;
        case ICKind::Algebraic:
            require(lambda2 > 0.0 && lambda3 >= 0.0, "algebraic IC needs lambda2 > 0, lambda3 >= 0");
            break;
        case ICKind::Sech:
            require(rho > 0.0, "sech IC needs rho > 0");
            break;
        case ICKind::Dps:
            require(dps_t0.has_value(), "ic = dps needs dps_t0");
            require(is_unit_spacing(*cfg), "ic = dps needs h = 1");
            break;
    }
    if (ic != ICKind::Dps) require(A >= 0.0, "background A must be nonnegative");
    if (dps_q) require(*dps_q > 0.0, "dps_q must be positive");

    const bool needs_dps = kind == RunKind::Pair || wants(Product::Central);
    if (needs_dps) {
        require(dps_t0.has_value(), "dPS comparison needs dps_t0");
        require(is_unit_spacing(*cfg), "dPS comparison needs h = 1");
    }
    if (wants(Product::PhasePlane) || wants(Product::Central)) {
        require(N % 2 == 0, "central-node products need even N");
    }
    if (wants(Product::Central)) {
        require(kind != RunKind::AL, "central product compares a DNLS run with the dPS");
    }
    require(!wants(Product::Proximity) || kind == RunKind::Pair,
            "proximity output needs system = pair");
    require(!wants(Product::Power) || kind == RunKind::DNLS || kind == RunKind::Pair,
            "power output needs a periodic DNLS run");
    require(!wants(Product::Attractor) || kind == RunKind::DNLS || kind == RunKind::Pair,
            "attractor output needs a periodic DNLS run");
    require(!wants(Product::MIScan) || bc == Boundary::Periodic, "mi_scan needs bc = periodic");

    try {
        integrator.validate();
    } catch (const InputError& e) {
        throw ValidationError(std::string("integrator: ") + e.what());
    }
    require(integrator.t_end > 0.0, "t_end must be positive");
    require(emit_every >= 0.0, "emit_every must be nonnegative");
    require(emit_every == 0.0 || emit_every >= integrator.sample_every,
            "emit_every must be 0 or at least sample_every");
    require(window.lo < window.hi, "window_lo must be below window_hi");
    require(noise_amplitude >= 0.0, "noise_amplitude must be nonnegative");
    require(gate_tol > 0.0, "gate_tol must be positive");
    require(attractor_window > 0.0, "attractor_window must be positive");
    require(attractor_tol > 0.0, "attractor_tol must be positive");
}

// ---------------------------------------------------------------------------
// Parser

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

double parse_double(std::string_view v, int line, std::string_view key) {
    double x = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
        throw ParseError(line, "key '" + std::string(key) + "': expected a real number, got '" +
                                   std::string(v) + "'");
    }
    return x;
}

long long parse_integer(std::string_view v, int line, std::string_view key) {
    long long x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(line, "key '" + std::string(key) + "': expected an integer, got '" +
                                   std::string(v) + "'");
    }
    return x;
}

template <typename E>
E parse_enum(std::string_view v, int line, std::string_view key,
             const std::vector<std::pair<std::string_view, E>>& table) {
    for (const auto& [word, value] : table) {
        if (v == word) return value;
    }
    std::string allowed;
    for (const auto& [word, value] : table) {
        if (!allowed.empty()) allowed += ", ";
        allowed += word;
    }
    throw ParseError(line, "key '" + std::string(key) + "': '" + std::string(v) +
                               "' is not one of " + allowed);
}

const std::vector<std::pair<std::string_view, Product>> kProducts = {
    {"densities", Product::Densities}, {"spectrum", Product::Spectrum},
    {"phase_plane", Product::PhasePlane}, {"mi_scan", Product::MIScan},
    {"proximity", Product::Proximity}, {"attractor", Product::Attractor},
    {"wedge", Product::Wedge}, {"central", Product::Central}, {"power", Product::Power}};

struct Entry {
    std::string value;
    int line = 0;
};

using Setter = std::function<void(ScenarioSpec&, std::string_view, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto real = [](double ScenarioSpec::*field) {
            return [field](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
                s.*field = parse_double(v, line, key);
            };
        };
        t["name"] = [](ScenarioSpec& s, std::string_view, std::string_view v, int) { s.name = v; };
        t["description"] = [](ScenarioSpec& s, std::string_view, std::string_view v, int) { s.description = v; };
        t["system"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.kind = parse_enum<RunKind>(v, line, key,
                                         {{"dnls", RunKind::DNLS}, {"al", RunKind::AL},
                                          {"shifted", RunKind::Shifted}, {"pair", RunKind::Pair}});
        };
        t["L"] = real(&ScenarioSpec::L);
        t["N"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            const auto n = parse_integer(v, line, key);
            if (n < 4 || n > 1'000'000) throw ParseError(line, "key 'N': out of range");
            s.N = static_cast<int>(n);
        };
        // h is resolved against L after all keys are read.
        t["h"] = [](ScenarioSpec&, std::string_view key, std::string_view v, int line) { parse_double(v, line, key); };
        t["gamma"] = real(&ScenarioSpec::gamma);
        t["delta"] = real(&ScenarioSpec::delta);
        t["bc"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.bc = parse_enum<Boundary>(
                v, line, key, {{"periodic", Boundary::Periodic}, {"dirichlet", Boundary::DirichletZero}});
        };
        t["ic"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.ic = parse_enum<ICKind>(v, line, key,
                                      {{"plane_wave", ICKind::PlaneWave}, {"algebraic", ICKind::Algebraic},
                                       {"sech", ICKind::Sech}, {"dps", ICKind::Dps}});
        };
        t["A"] = real(&ScenarioSpec::A);
        t["A_p"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.A_p.clear();
            for (auto item : split_list(v)) s.A_p.push_back(parse_double(item, line, key));
        };
        t["K"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            const auto k = parse_integer(v, line, key);
            if (k < 0 || k > 1'000'000) throw ParseError(line, "key 'K': out of range");
            s.K = static_cast<int>(k);
        };
        t["lambda1"] = real(&ScenarioSpec::lambda1);
        t["lambda2"] = real(&ScenarioSpec::lambda2);
        t["lambda3"] = real(&ScenarioSpec::lambda3);
        t["sigma"] = real(&ScenarioSpec::sigma);
        t["rho"] = real(&ScenarioSpec::rho);
        t["dps_t0"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.dps_t0 = parse_double(v, line, key);
        };
        t["dps_q"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.dps_q = parse_double(v, line, key);
        };
        t["method"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.integrator.method = parse_enum<Method>(
                v, line, key, {{"rk4", Method::RK4Fixed}, {"dp54", Method::DP54Adaptive}});
        };
        auto integ = [](double IntegratorSpec::*field) {
            return [field](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
                s.integrator.*field = parse_double(v, line, key);
            };
        };
        t["dt"] = integ(&IntegratorSpec::dt);
        t["rtol"] = integ(&IntegratorSpec::rtol);
        t["atol"] = integ(&IntegratorSpec::atol);
        t["t_end"] = integ(&IntegratorSpec::t_end);
        t["sample_every"] = integ(&IntegratorSpec::sample_every);
        t["emit_every"] = real(&ScenarioSpec::emit_every);
        t["outputs"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.outputs.clear();
            if (trim(v) == "none") return;
            for (auto item : split_list(v)) s.outputs.insert(parse_enum<Product>(item, line, key, kProducts));
        };
        t["noise_amplitude"] = real(&ScenarioSpec::noise_amplitude);
        t["noise_seed"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            const auto seed = parse_integer(v, line, key);
            if (seed < 0) throw ParseError(line, "key 'noise_seed': must be nonnegative");
            s.noise_seed = static_cast<std::uint64_t>(seed);
        };
        t["window_lo"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.window.lo = parse_double(v, line, key);
        };
        t["window_hi"] = [](ScenarioSpec& s, std::string_view key, std::string_view v, int line) {
            s.window.hi = parse_double(v, line, key);
        };
        t["gate_tol"] = real(&ScenarioSpec::gate_tol);
        t["attractor_window"] = real(&ScenarioSpec::attractor_window);
        t["attractor_tol"] = real(&ScenarioSpec::attractor_tol);
        return t;
    }();
    return table;
}

const std::map<ICKind, std::vector<std::string>>& ic_keys() {
    static const std::map<ICKind, std::vector<std::string>> table = {
        {ICKind::PlaneWave, {"A", "A_p", "K"}},
        {ICKind::Algebraic, {"A", "lambda1", "lambda2", "lambda3"}},
        {ICKind::Sech, {"A", "sigma", "rho"}},
        {ICKind::Dps, {"dps_t0"}},
    };
    return table;
}

}  // namespace

ScenarioSpec parse_config(std::string_view text, std::string_view origin) {
    std::map<std::string, Entry, std::less<>> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key before '='");
        if (value.empty()) throw ParseError(line_no, "key '" + std::string(key) + "' has no value");
        if (!setters().contains(key)) throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
        if (entries.contains(key)) throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
        entries.emplace(std::string(key), Entry{std::string(value), line_no});
    }
    const int end_line = line_no;

    auto missing = [&](const std::string& key, const std::string& why) {
        throw ParseError(end_line, std::string(origin) + ": missing required key '" + key + "'" + why);
    };
    for (const char* key : {"system", "L", "gamma", "delta", "ic", "t_end"}) {
        if (!entries.contains(key)) missing(key, "");
    }
    if (entries.contains("N") == entries.contains("h")) {
        throw ParseError(entries.contains("N") ? entries.at("h").line : end_line,
                         "exactly one of 'N' and 'h' must be given");
    }

    ScenarioSpec spec;
    spec.outputs = {Product::Densities};
    for (const auto& [key, entry] : entries) setters().at(key)(spec, key, entry.value, entry.line);

    if (auto it = entries.find("h"); it != entries.end()) {
        const double h = parse_double(it->second.value, it->second.line, "h");
        try {
            spec.N = LatticeConfig::from_spacing(spec.L, h, 1.0, -1.0).N();
        } catch (const InputError& e) {
            throw ParseError(it->second.line, e.what());
        }
    }

    for (const auto& key : ic_keys().at(spec.ic)) {
        if (!entries.contains(key)) missing(key, std::string(" for ic = ") + to_string(spec.ic));
    }
    for (const auto& [ic, keys] : ic_keys()) {
        if (ic == spec.ic) continue;
        for (const auto& key : keys) {
            const auto& own = ic_keys().at(spec.ic);
            if (key == "dps_t0" || std::find(own.begin(), own.end(), key) != own.end()) continue;
            if (auto it = entries.find(key); it != entries.end()) {
                throw ParseError(it->second.line,
                                 "key '" + key + "' does not apply to ic = " + to_string(spec.ic));
            }
        }
    }

    if (spec.name.empty()) spec.name = std::string(origin);
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

const std::map<std::string, std::string>& catalog() {
    static const std::map<std::string, std::string> table = {
        {"fig5", R"(name = fig5
description = Stable carrier K=45 relaxing onto the plane-wave attractor from outside (A_p=2) and inside (A_p=-0.999)
system = dnls
L = 50
N = 100
gamma = 1.5
delta = -1.5
ic = plane_wave
A = 1
A_p = 2, -0.999
K = 45
t_end = 10
sample_every = 0.01
emit_every = 0.5
outputs = densities, spectrum, phase_plane, attractor, power
attractor_window = 1
)"},
        {"fig6", R"(name = fig6
description = Unstable carrier K=8: fast amplitude locking, broadband MI transient, stable-band selection
system = dnls
L = 50
N = 100
gamma = 1.5
delta = -1.5
ic = plane_wave
A = 1
A_p = 2
K = 8
t_end = 3700
sample_every = 0.5
emit_every = 10
noise_amplitude = 1e-12
noise_seed = 12345
outputs = densities, spectrum, phase_plane, mi_scan, attractor, power
attractor_window = 100
)"},
        {"fig8", R"(name = fig8
description = Algebraic bump on A=0.5 with A*=1: spectral broadening then single-mode attractor
system = dnls
L = 50
N = 100
gamma = 0.1
delta = -0.1
ic = algebraic
A = 0.5
lambda1 = 1
lambda2 = 1
lambda3 = 4
t_end = 1000
sample_every = 0.5
emit_every = 10
outputs = densities, spectrum, phase_plane, attractor, power
attractor_window = 50
)"},
        {"fig9a", R"(name = fig9a
description = DNLS, algebraic bump on the critical background A=A*=0.5; wedge and first rogue event
system = dnls
L = 200
N = 400
gamma = 0.0025
delta = -0.01
ic = algebraic
A = 0.5
lambda1 = 1
lambda2 = 1
lambda3 = 4
dps_t0 = 2.40
t_end = 40
sample_every = 0.05
emit_every = 0.5
outputs = densities, wedge, central, phase_plane
)"},
        {"fig9b", R"(name = fig9b
description = DNLS, sech bump on the critical background A=A*=0.5; wedge and first rogue event
system = dnls
L = 200
N = 400
gamma = 0.0025
delta = -0.01
ic = sech
A = 0.5
sigma = 0.6
rho = 1
dps_t0 = 3.30
t_end = 40
sample_every = 0.05
emit_every = 0.5
outputs = densities, wedge, central, phase_plane
)"},
        {"fig9c", R"(name = fig9c
description = Ablowitz-Ladik lattice from the fig9a algebraic bump
system = al
L = 200
N = 400
gamma = 0.0025
delta = -0.01
ic = algebraic
A = 0.5
lambda1 = 1
lambda2 = 1
lambda3 = 4
t_end = 40
sample_every = 0.05
emit_every = 0.5
outputs = densities, wedge
)"},
        {"fig9d", R"(name = fig9d
description = Ablowitz-Ladik lattice from the fig9b sech bump
system = al
L = 200
N = 400
gamma = 0.0025
delta = -0.01
ic = sech
A = 0.5
sigma = 0.6
rho = 1
t_end = 40
sample_every = 0.05
emit_every = 0.5
outputs = densities, wedge
)"},
        {"fig10a", R"(name = fig10a
description = DNLS, algebraic bump on A=0.5 below A*=1; wedge on a rising background
system = dnls
L = 200
N = 400
gamma = 0.01
delta = -0.01
ic = algebraic
A = 0.5
lambda1 = 1
lambda2 = 1
lambda3 = 4
t_end = 40
sample_every = 0.05
emit_every = 0.5
outputs = densities, wedge, power
)"},
        {"fig10b", R"(name = fig10b
description = DNLS, sech bump on A=0.5 below A*=1; wedge on a rising background
system = dnls
L = 200
N = 400
gamma = 0.01
delta = -0.01
ic = sech
A = 0.5
sigma = 0.6
rho = 1
t_end = 40
sample_every = 0.05
emit_every = 0.5
outputs = densities, wedge, power
)"},
        {"fig11", R"(name = fig11
description = First rogue event of fig10a against the dPS on the initial background q=A=0.5
system = dnls
L = 200
N = 400
gamma = 0.01
delta = -0.01
ic = algebraic
A = 0.5
lambda1 = 1
lambda2 = 1
lambda3 = 4
dps_t0 = 2.40
t_end = 10
sample_every = 0.05
emit_every = 0.5
outputs = central, phase_plane
)"},
        {"fig12", R"(name = fig12
description = Distance between the fig9a DNLS run and the AL lattice started from the dPS (t0=2.40)
system = pair
L = 200
N = 400
gamma = 0.0025
delta = -0.01
ic = algebraic
A = 0.5
lambda1 = 1
lambda2 = 1
lambda3 = 4
dps_t0 = 2.40
t_end = 10
sample_every = 0.05
emit_every = 0.5
outputs = proximity, central
)"},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {"fig5",  "fig6",   "fig8",   "fig9a",
                                                   "fig9b", "fig9c",  "fig9d",  "fig10a",
                                                   "fig10b", "fig11", "fig12"};
    return names;
}

const std::string& catalog_text(const std::string& name) {
    const auto it = catalog().find(name);
    if (it == catalog().end()) throw ConfigError("unknown catalog scenario '" + name + "'");
    return it->second;
}

ScenarioSpec load_scenario(const std::string& name_or_path) {
    if (catalog().contains(name_or_path)) return parse_config(catalog_text(name_or_path), name_or_path);
    const std::filesystem::path path(name_or_path);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw ConfigError("'" + name_or_path + "' is neither a catalog scenario nor a config file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot read config file '" + name_or_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.stem().string());
}

void apply_smoke(ScenarioSpec& spec) {
    spec.integrator.t_end = std::min(spec.integrator.t_end, 10.0);
    if (spec.emit_every > spec.integrator.t_end) spec.emit_every = 0.0;
}

void override_ap(ScenarioSpec& spec, double A_p) {
    if (spec.ic != ICKind::PlaneWave) {
        throw ValidationError("--ap applies to plane_wave scenarios only");
    }
    spec.A_p = {A_p};
    spec.validate();
}

}  // namespace dnls::runner
