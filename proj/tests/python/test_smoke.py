import json
import math

import numpy as np
import pytest

import dnls_lattice as dl


def test_gate_values():
    assert dl.critical_amplitude(1.5, -1.5) == 1.0
    assert dl.critical_amplitude(0.0025, -0.01) == 0.5
    assert dl.solvability_gate(0.5, 0.0025, -0.01)
    assert not dl.solvability_gate(0.6, 0.0025, -0.01)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        dl.critical_amplitude(-1.0, -1.0)
    with pytest.raises(dl.InputError):
        dl.LatticeConfig.from_nodes(10, 3, 1.0, -1.0)


def test_plane_wave_tracks_amplitude_ode():
    cfg = dl.LatticeConfig.from_nodes(50, 100, 1.5, -1.5)
    u0 = dl.plane_wave_ic(cfg, 3.0, 0.0, 45)
    out = dl.integrate("dnls", u0, cfg, t_end=2.0, sample_every=0.5)
    assert out["states"].shape == (5, 100)
    for t, p in zip(out["times"], out["averaged_power"]):
        assert p == pytest.approx(dl.amplitude_ode_solution(3.0, 1.5, -1.5, t), rel=1e-8)


def test_spectrum_of_single_mode():
    n = np.arange(32)
    u = np.exp(2j * np.pi * 5 * n / 32)
    a = dl.spectrum(u, 1.0)
    assert np.argmax(np.abs(a)) == 5
    assert abs(a[5]) == pytest.approx(32.0)


def test_mi_band():
    cfg = dl.LatticeConfig.from_nodes(50, 100, 1.5, -1.5)
    assert dl.mi_scan(8, cfg)["carrier_unstable"]
    assert not dl.mi_scan(45, cfg)["carrier_unstable"]


def test_dps_peak():
    cfg = dl.LatticeConfig.from_nodes(200, 400, 0.0025, -0.01)
    phi = dl.dps_eval(cfg, 2.4, 0.5, 2.4)
    assert abs(phi[cfg.central_index]) ** 2 == pytest.approx(dl.dps_peak_density(0.5))
    assert dl.dps_peak_density(0.5) == 4.0


def test_run_scenario_smoke(tmp_path):
    assert "fig9a" in dl.list_scenarios()
    manifest = dl.run_scenario("fig9a", str(tmp_path), smoke=True)
    assert manifest["scenario"] == "fig9a"
    assert dl.manifest_gate_consistent(manifest)
    on_disk = json.loads((tmp_path / "fig9a" / "manifest.json").read_text())
    assert on_disk["gate"]["verdict"] is True
    assert (tmp_path / "fig9a" / "densities.csv").exists()
