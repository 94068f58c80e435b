import numpy as np
import pytest

from sqgci.geometry import DirectionSet
from sqgci.mikado import (check_items, default_profile, is_even_power_of_two, lp_norms, mikado_field,
                          predicted_lp, rho_coefficients)


def test_profile_contract():
    pr = default_profile()
    x = np.linspace(-0.6, 0.6, 2401)
    np.testing.assert_allclose(pr.phi(-x), -pr.phi(x), atol=0)
    assert np.all(pr.phi(x[np.abs(x) >= 0.5]) == 0)
    assert abs(pr.phi_hat_imag(np.array([0.0]))[0]) < 1e-16
    # int phi^2 by an independent fine trapezoid rule
    xs = np.linspace(-0.5, 0.5, 200001)
    assert abs(np.trapezoid(pr.phi(xs) ** 2, xs) - 1.0) < 1e-10


def test_phi_hat_against_direct_quadrature():
    pr = default_profile()
    xs = np.linspace(-0.5, 0.5, 40001)
    for xi in (0.3, 1.7, 5.0):
        direct = np.trapezoid(pr.phi(xs) * np.exp(-2j * np.pi * xs * xi), xs)
        assert abs(pr.phi_hat(np.array([xi]))[0] - direct) < 1e-12


def test_phi_hat_decay():
    pr = default_profile()
    xi = np.linspace(0.05, 60.0, 600)
    v = np.abs(pr.phi_hat_imag(xi))
    env = xi / (1 + xi) ** 10
    cN = np.max(v / env)
    assert np.isfinite(cN) and np.all(v <= cN * env * (1 + 1e-12))


@pytest.mark.parametrize("lam", [64, 256, 1024])
def test_mikado_items(lam):
    ds = DirectionSet()
    for k in ds.dirs:
        mf = mikado_field(None, lam, k)
        r = check_items(mf)
        for key in ("div", "div_tensor", "parallel", "mean", "periodic", "antipodal_W"):
            assert r[key] <= 1e-11, (k, key, r[key])
        assert r["second_moment"] <= 1e-8
        # rho(-k) = -rho(k) after reorienting
        assert r["antipodal_rho"] <= 1e-11


def test_line_samples_match_direct_sum():
    mf = mikado_field(None, 64, (0.6, 0.8))
    g = mf.rho.samples_1d()
    s = np.arange(g.size) / g.size
    n = mf.rho.harmonics()
    direct = np.exp(2j * np.pi * np.outer(s, n)) @ mf.rho.coeffs
    assert np.max(np.abs(g - direct)) < 1e-12
    assert np.max(np.abs(g.imag)) < 1e-13
    assert abs(np.mean(np.abs(g) ** 2) - 1.0) < 1e-8


def test_frequency_support():
    mf = mikado_field(None, 256, (1.0, 0.0))
    f = mf.rho.frequencies()
    assert np.all(f[:, 1] == 0) and np.all(f[:, 0] % (5 * 16) == 0)
    c = rho_coefficients(256)
    assert c[(c.size - 1) // 2] == 0


def test_lp_slopes():
    lams = [64, 256, 1024]
    for p in (1.0, 4.0 / 3.0, 2.0, 4.0, np.inf):
        vals = [lp_norms(L, [p])[p] for L in lams]
        slope = np.polyfit(np.log(lams), np.log(vals), 1)[0]
        target = 0.5 * (0.5 - (0 if np.isinf(p) else 1 / p))
        assert abs(slope - target) <= 0.05
        for L, v in zip(lams, vals):
            assert abs(v - predicted_lp(L, p)) <= 1e-3 * predicted_lp(L, p)
    for L in lams:
        assert abs(lp_norms(L, [2.0])[2.0] - 1.0) < 0.1


def test_bad_arguments():
    assert is_even_power_of_two(256) and not is_even_power_of_two(512)
    with pytest.raises(ValueError):
        mikado_field(None, 512, (1.0, 0.0))
    with pytest.raises(ValueError):
        mikado_field(None, 64, (0.0, 1.0))
