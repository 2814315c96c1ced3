import math

import numpy as np
import pytest

import bnls


def gaussian(points=128, half_width=16.0, amplitude=1.0):
    x = -half_width + 2.0 * half_width / points * np.arange(points)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    return amplitude * np.exp(-(xx**2 + yy**2) / 2.0).astype(complex)


def test_gaussian_moments():
    r = bnls.functionals(gaussian(amplitude=2.0), 16.0, bnls.Params())
    assert r["mass"] == pytest.approx(4.0 * math.pi, rel=1e-10)
    assert r["lap_norm_sq"] == pytest.approx(8.0 * math.pi, rel=1e-10)


def test_ground_state_identities():
    u, info = bnls.ground_state(bnls.Params(sigma=3.0), points=128, half_width=16.0)
    assert info["converged"]
    assert max(abs(v) for v in info["identity_defects"].values()) < 1e-7
    assert u.shape == (128, 128)
    assert np.abs(u.imag).max() == 0.0


def test_evolution_conserves_mass():
    p = bnls.Params(sigma=1.0)
    u, _ = bnls.ground_state(p, points=128, half_width=16.0)
    out = bnls.evolve(u, 16.0, p, dt=1e-3, t_end=0.5, adapt=False)
    assert out["verdict"] == "completed"
    assert out["mass_defect"] < 1e-10
    assert out["final"].shape == u.shape


def test_snapshot_round_trip(tmp_path):
    u = gaussian(points=32, half_width=8.0) * (1 + 0.5j)
    p = bnls.Params(mu=0.5, sigma=1.5)
    path = tmp_path / "u.bin"
    bnls.write_snapshot(path, u, 8.0, p)
    v, L, q = bnls.read_snapshot(path)
    assert L == 8.0
    assert q.mu == 0.5 and q.sigma == 1.5
    assert np.array_equal(u, v)


def test_errors_map_to_exceptions(tmp_path):
    with pytest.raises(bnls.ValidationError):
        bnls.Params(gamma=0.0)
    with pytest.raises(bnls.IoError):
        bnls.read_snapshot(tmp_path / "missing.bin")
    assert issubclass(bnls.FormatError, bnls.Error)


def test_presets_and_short_instability_run():
    assert "thm1-critical" in bnls.presets()
    rep = bnls.instability("thm1-supercritical", t_end=0.05)
    assert rep["status"] != "FALSIFYING"
    assert rep["initial_signs"]["virial_negative"]
