#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dnls/analysis.hpp"
#include "dnls/lattice.hpp"
#include "dnls/proximity.hpp"
#include "dnls/runner.hpp"
#include "dnls/timestep.hpp"

namespace py = pybind11;
using namespace dnls;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

ComplexState to_state(const CArray& a, double t = 0.0) {
    if (a.ndim() != 1) throw LengthMismatch("expected a one-dimensional complex array");
    const auto* p = a.data();
    return ComplexState(std::vector<cplx>(p, p + a.size()), t);
}

CArray to_array(const ComplexState& s) {
    CArray out(static_cast<py::ssize_t>(s.size()));
    std::copy(s.values().begin(), s.values().end(), out.mutable_data());
    return out;
}

System parse_system(const std::string& name) {
    if (name == "dnls") return System::DNLS;
    if (name == "al") return System::AL;
    if (name == "shifted") return System::Shifted;
    throw ConfigError("system must be 'dnls', 'al' or 'shifted'");
}

Method parse_method(const std::string& name) {
    if (name == "dp54") return Method::DP54Adaptive;
    if (name == "rk4") return Method::RK4Fixed;
    throw ConfigError("method must be 'dp54' or 'rk4'");
}

py::object json_to_python(const nlohmann::json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

}  // namespace

PYBIND11_MODULE(dnls_lattice, m) {
    m.doc() = "Gain/loss DNLS and Ablowitz-Ladik lattices: simulation and analysis";
    m.attr("__version__") = runner::software_version();

    static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
    static py::exception<RuntimeFailure> runtime_failure(m, "RuntimeFailure", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InputError& e) {
            py::set_error(input_error, e.what());
        } catch (const RuntimeFailure& e) {
            py::set_error(runtime_failure, e.what());
        }
    });

    py::enum_<Boundary>(m, "Boundary")
        .value("Periodic", Boundary::Periodic)
        .value("DirichletZero", Boundary::DirichletZero);

    py::class_<LatticeConfig>(m, "LatticeConfig")
        .def_static("from_nodes", &LatticeConfig::from_nodes, py::arg("L"), py::arg("N"),
                    py::arg("gamma"), py::arg("delta"), py::arg("bc") = Boundary::Periodic)
        .def_static("from_spacing", &LatticeConfig::from_spacing, py::arg("L"), py::arg("h"),
                    py::arg("gamma"), py::arg("delta"), py::arg("bc") = Boundary::Periodic)
        .def_property_readonly("L", &LatticeConfig::L)
        .def_property_readonly("N", &LatticeConfig::N)
        .def_property_readonly("h", &LatticeConfig::h)
        .def_property_readonly("k", &LatticeConfig::k)
        .def_property_readonly("gamma", &LatticeConfig::gamma)
        .def_property_readonly("delta", &LatticeConfig::delta)
        .def_property_readonly("bc", &LatticeConfig::bc)
        .def_property_readonly("central_index", &LatticeConfig::central_index)
        .def("nodes", [](const LatticeConfig& cfg) { return NodeGrid::from(cfg).x; })
        .def("__repr__", [](const LatticeConfig& c) {
            return "LatticeConfig(L=" + std::to_string(c.L()) + ", N=" + std::to_string(c.N()) +
                   ", gamma=" + std::to_string(c.gamma()) + ", delta=" + std::to_string(c.delta()) + ")";
        });

    m.def("critical_amplitude", &critical_amplitude, py::arg("gamma"), py::arg("delta"));
    m.def("solvability_gate", &solvability_gate, py::arg("A"), py::arg("gamma"), py::arg("delta"),
          py::arg("tol") = 1e-12);

    m.def("discrete_laplacian", [](const CArray& u, const LatticeConfig& cfg) {
        return to_array(discrete_laplacian(to_state(u), cfg));
    });
    m.def("dnls_rhs", [](const CArray& u, const LatticeConfig& cfg) {
        return to_array(dnls_rhs(to_state(u), cfg));
    });
    m.def("al_rhs", [](const CArray& u, const LatticeConfig& cfg) {
        return to_array(al_rhs(to_state(u), cfg));
    });
    m.def("shifted_rhs", [](const CArray& U, const LatticeConfig& cfg, double A) {
        return to_array(shifted_rhs(to_state(U), cfg, A));
    }, py::arg("U"), py::arg("cfg"), py::arg("A"));

    m.def("plane_wave_ic", [](const LatticeConfig& cfg, double A_base, double A_p, int K) {
        return to_array(make_initial_condition(PlaneWaveIC{A_base, A_p, K}, NodeGrid::from(cfg)));
    }, py::arg("cfg"), py::arg("A_base"), py::arg("A_p"), py::arg("K"));
    m.def("algebraic_ic", [](const LatticeConfig& cfg, double A, double l1, double l2, double l3) {
        return to_array(make_initial_condition(AlgebraicBumpIC{A, l1, l2, l3}, NodeGrid::from(cfg)));
    }, py::arg("cfg"), py::arg("A"), py::arg("lambda1") = 1.0, py::arg("lambda2") = 1.0,
       py::arg("lambda3") = 4.0);
    m.def("sech_ic", [](const LatticeConfig& cfg, double A, double sigma, double rho) {
        return to_array(make_initial_condition(SechBumpIC{A, sigma, rho}, NodeGrid::from(cfg)));
    }, py::arg("cfg"), py::arg("A"), py::arg("sigma"), py::arg("rho"));

    m.def(
        "integrate",
        [](const std::string& system, const CArray& u0, const LatticeConfig& cfg, double t_end,
           const std::string& method, double dt, double rtol, double atol, double sample_every,
           std::optional<double> background) {
            IntegratorSpec spec;
            spec.method = parse_method(method);
            spec.dt = dt;
            spec.rtol = rtol;
            spec.atol = atol;
            spec.t_end = t_end;
            spec.sample_every = sample_every;
            Trajectory traj;
            {
                const auto ic = to_state(u0);
                py::gil_scoped_release release;
                traj = integrate(parse_system(system), ic, cfg, spec, background);
            }
            const auto n = static_cast<py::ssize_t>(cfg.N());
            py::array_t<cplx> states({static_cast<py::ssize_t>(traj.size()), n});
            auto* out = states.mutable_data();
            std::vector<double> power;
            for (std::size_t i = 0; i < traj.size(); ++i) {
                std::copy(traj.states[i].values().begin(), traj.states[i].values().end(), out + i * n);
                power.push_back(traj.diagnostics[i].averaged_power);
            }
            py::dict d;
            d["times"] = py::array(py::cast(traj.times));
            d["states"] = states;
            d["averaged_power"] = py::array(py::cast(power));
            d["accepted_steps"] = traj.stats.accepted_steps;
            d["rejected_steps"] = traj.stats.rejected_steps;
            return d;
        },
        py::arg("system"), py::arg("u0"), py::arg("cfg"), py::arg("t_end"),
        py::arg("method") = "dp54", py::arg("dt") = 5e-3, py::arg("rtol") = 1e-9,
        py::arg("atol") = 1e-11, py::arg("sample_every") = 0.1, py::arg("background") = py::none());

    m.def("averaged_power", [](const CArray& u) { return averaged_power(to_state(u)); });
    m.def("amplitude_ode_solution", &amplitude_ode_solution, py::arg("A0"), py::arg("gamma"),
          py::arg("delta"), py::arg("t"));
    m.def("dispersion_frequency", &dispersion_frequency, py::arg("K"), py::arg("cfg"), py::arg("A_star"));

    m.def("mi_roots", [](double q, double Q, const LatticeConfig& cfg, double A_star, double delta) {
        const auto r = mi_roots(q, Q, cfg, A_star, delta);
        return py::make_tuple(r.lambda_plus, r.lambda_minus);
    }, py::arg("q"), py::arg("Q"), py::arg("cfg"), py::arg("A_star"), py::arg("delta"));
    m.def("mi_scan", [](int K, const LatticeConfig& cfg) {
        const double A_star = critical_amplitude(cfg.gamma(), cfg.delta());
        const auto s = mi_scan(K, cfg, A_star, cfg.delta());
        py::dict d;
        d["K"] = s.K;
        d["M"] = s.M;
        d["growth"] = s.growth;
        d["unstable_band"] = s.unstable_band;
        d["carrier_unstable"] = s.carrier_unstable;
        d["most_unstable_M"] = s.most_unstable_M;
        d["max_growth"] = s.max_growth;
        return d;
    }, py::arg("K"), py::arg("cfg"));

    m.def("spectrum", [](const CArray& u, double h) {
        const auto f = spectrum(to_state(u), h);
        return to_array(ComplexState(f.coeffs));
    }, py::arg("u"), py::arg("h"));

    m.def("dps_eval", [](const LatticeConfig& cfg, double t, double q, double t0) {
        return to_array(dps_eval(NodeGrid::from(cfg), t, DpsParams{q, t0}));
    }, py::arg("cfg"), py::arg("t"), py::arg("q"), py::arg("t0"));
    m.def("dps_peak_density", &dps_peak_density, py::arg("q"));
    m.def("al_invariant", [](const CArray& phi, const LatticeConfig& cfg) {
        return al_invariant(to_state(phi), cfg);
    });
    m.def("al_norm_bound", &al_norm_bound, py::arg("N0"), py::arg("cfg"));
    m.def("estimate_II_rate", [](const LatticeConfig& cfg, double N0) {
        return estimate_II_rate(cfg, cfg.gamma(), cfg.delta(),
                                critical_amplitude(cfg.gamma(), cfg.delta()), N0);
    }, py::arg("cfg"), py::arg("N0"));

    m.def("list_scenarios", [] { return runner::catalog_names(); });
    m.def("scenario_text", &runner::catalog_text, py::arg("name"));
    m.def(
        "run_scenario",
        [](const std::string& name, const std::string& out_root, bool smoke, bool auto_t0) {
            runner::RunOptions opts;
            opts.out_root = out_root;
            opts.smoke = smoke;
            opts.auto_t0 = auto_t0;
            nlohmann::json manifest;
            {
                auto spec = runner::load_scenario(name);
                py::gil_scoped_release release;
                manifest = runner::run_scenario(std::move(spec), opts).manifest;
            }
            return json_to_python(manifest);
        },
        py::arg("name"), py::arg("out_root"), py::arg("smoke") = false, py::arg("auto_t0") = false);
    m.def("manifest_gate_consistent", [](const py::object& manifest) {
        const std::string text = py::str(py::module_::import("json").attr("dumps")(manifest));
        return runner::manifest_gate_consistent(nlohmann::json::parse(text));
    });
}
