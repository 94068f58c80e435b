import json

import numpy as np
import pytest

from sqgci.scheme.advance import advance
from sqgci.scheme.params import SchemeParams
from sqgci.scheme.state import IterateState, base_state
from sqgci.spectral.fields import SpectralField, SymTensorField, VectorField
from sqgci.spectral.grid import GridSpec
from sqgci.verification import (Entry, VerificationReport, check_items, load_trace, paraproduct_norm, run_trace,
                                save_trace, start_trace, theta_u, weak_residual)
from sqgci.verification.item7 import item7_sums, step_diagonal, step_off_diagonal
from sqgci.verification.items import unique_shell
from sqgci.verification.weak import pairing, random_test

from conftest import random_real

G8 = GridSpec(8)


def _sin(n=8, k=(1, 0), amp=1.0):
    return SpectralField.from_modes(GridSpec(n), {k: -0.5j * amp, (-k[0], -k[1]): 0.5j * amp})


def _cos(n=8, k=(1, 0), amp=1.0):
    return SpectralField.from_modes(GridSpec(n), {k: 0.5 * amp, (-k[0], -k[1]): 0.5 * amp})


def _state(v=None, u=None, R=None):
    z = SpectralField.zeros(G8)
    zv = VectorField(z, z)
    return IterateState(0, 0, u or zv, v or zv, z, R or SymTensorField(z, z, z))


# report --------------------------------------------------------------------

def test_report_round_trip():
    rep = VerificationReport()
    rep.add("a", 1.5, 2.0, True, 2.0, "x")
    rep.add("b", float("nan"), 1.0, False, 1.0, "y")
    rep.note("c", [1.0, float("inf")], "z")
    rep.environment = {"C": 3.0}
    d = json.loads(rep.dumps(timestamp=False))
    assert d["items"]["b"]["measured"] == "nan" and d["diagnostics"]["c"]["measured"] == [1.0, "inf"]
    assert d["summary"] == {"pass": False, "failures": ["b"]}
    back = VerificationReport.from_json(d)
    assert back.dumps(timestamp=False) == rep.dumps(timestamp=False)
    assert np.isnan(back.items["b"].measured)


def test_report_rejects_unknown_fields():
    d = VerificationReport().to_json()
    with pytest.raises(ValueError):
        VerificationReport.from_json({**d, "extra": 1})
    with pytest.raises(ValueError):
        Entry.from_json({"measured": 1, "threshold": 1, "pass": True, "tolerance": 1})
    with pytest.raises(ValueError):
        VerificationReport.from_json({**d, "schema": "other"})


# weak form -----------------------------------------------------------------

def test_weak_stress_side_hand_example():
    z = SpectralField.zeros(G8)
    st = _state(R=SymTensorField(z, _sin(), z))
    w = weak_residual(st, _sin(), 1.0)
    assert w.velocity_side == 0.0
    assert abs(w.stress_side - (-2 * np.pi ** 2)) <= 1e-12


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_weak_velocity_side_hand_example(gamma):
    z = SpectralField.zeros(G8)
    v = VectorField(z, _cos())
    u = VectorField(z, _cos(amp=2 * np.pi))
    w = weak_residual(_state(v=v, u=u), _sin(), gamma)
    assert abs(w.velocity_side + (2 * np.pi) ** (gamma + 1) / 2) <= 1e-12 * (2 * np.pi) ** (gamma + 1)
    assert w.stress_side == 0.0


def test_weak_orthogonal_test_and_mean():
    st = base_state(SchemeParams())
    w = weak_residual(st, _sin(16, (5, 7)), 1.0)
    assert w.velocity_side == 0.0 and w.stress_side == 0.0
    bad = SpectralField.from_modes(G8, {(0, 0): 1.0, (1, 0): 0.5, (-1, 0): 0.5})
    with pytest.raises(ValueError):
        weak_residual(st, bad, 1.0)


def test_weak_base_state_random(rng):
    p = SchemeParams(gamma=1.5)
    st = base_state(p)
    for _ in range(10):
        phi = random_test(rng, 16, 4)
        w = weak_residual(st, phi, p.gamma)
        assert w.relative <= 1e-10 and w.difference <= 1e-10 * w.bound


def test_weak_synthetic_step(synthetic, rng):
    params, s0, inc = synthetic
    st = advance(s0, inc, params).state
    worst = 0.0
    for _ in range(5):
        w = weak_residual(st, random_test(rng, 128, 40), params.gamma)
        worst = max(worst, w.relative)
        assert w.difference <= w.bound
    assert worst <= 1e-10


def test_pairing_oracle(rng):
    f, g = random_real(rng, 16, 5), random_real(rng, 16, 5)
    # direct grid quadrature is exact for these band-limited products
    fx = np.fft.ifft2(f.coeffs * 16 * 16).real
    gx = np.fft.ifft2(g.coeffs * 16 * 16).real
    assert abs(pairing(f, g) - np.mean(fx * gx)) <= 1e-12 * np.mean(np.abs(fx * gx))


# temperature and paraproducts ----------------------------------------------

def test_theta_u_base_state():
    A = 1e-6
    t = theta_u(base_state(SchemeParams(amplitude_A=A)))
    assert abs(t.theta.coeff(1, 0) - (-np.pi * A)) <= 1e-20
    assert t.u_error <= 1e-12 * 2 * np.pi * A


def test_paraproduct_hand_example():
    s = _sin()
    total, table = paraproduct_norm(s, s, -5.0)
    assert abs(total - 2 ** -6.5) <= 1e-15
    assert len(table) == 1
    zero, t0 = paraproduct_norm(SpectralField.zeros(G8), s, -5.0)
    assert zero == 0.0 and t0 == {}


def test_unique_shell():
    z = SpectralField.zeros(G8)
    assert unique_shell(VectorField(_sin(k=(1, 0)), z)) == [0]
    assert unique_shell(VectorField(_sin(k=(1, 0)), _sin(k=(3, 0)))) == []
    assert unique_shell(VectorField(z, z)) == []


# item 7 --------------------------------------------------------------------

def test_item7_single_state():
    s = item7_sums([base_state(SchemeParams())])
    assert s.off_diagonal == 0.0 and len(s.diag_steps) == 1


def test_item7_patch_matches_dense(synthetic):
    params, s0, inc = synthetic
    s1 = advance(s0, inc, params).state
    dense = item7_sums([s0, s1])
    off = step_off_diagonal([s0], inc)
    diag = step_diagonal(inc)
    assert abs(off - dense.off_steps[1]) <= 1e-12 * dense.off_steps[1]
    assert abs(diag - dense.diag_steps[1]) <= 1e-12 * dense.diag_steps[1]


# traces and items ----------------------------------------------------------

def test_items_at_base_state():
    rep = check_items(start_trace(SchemeParams()), n_tests=10)
    assert rep.passed, rep.failures
    assert "item2.q0.residual" in rep.items


def test_trace_round_trip(tmp_path):
    p = SchemeParams()
    tr = run_trace(p, 1)
    npz, js = save_trace(tr, tmp_path / "t")
    back = load_trace(tmp_path / "t")
    assert back.hashes == tr.hashes and back.verify_chain()
    assert back.q == 1 and back.lambdas == [256]
    a = check_items(tr, n_tests=5).dumps(timestamp=False)
    b = check_items(back, n_tests=5).dumps(timestamp=False)
    assert a == b
    npz2, _ = save_trace(back, tmp_path / "u")
    assert npz.read_bytes() == npz2.read_bytes()
