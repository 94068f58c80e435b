import os
import subprocess
import sys

import numpy as np
import pytest

from sqgci._kernels import _pykernels as py

try:
    from sqgci._kernels import _ckernels as cy
except ImportError:
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def _cases(rng, n=64):
    c = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    t = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(3)]
    a, b = rng.normal(size=n * n), rng.normal(size=n * n)
    x = np.linspace(0.0, 0.5, 513)
    phi = np.sin(np.pi * x) ** 4
    xi = np.linspace(0.0, 40.0, 97)
    return [
        ("sobolev", lambda m: m.sobolev_sq_sum(c, -4.0)),
        ("sobolev_pos", lambda m: m.sobolev_sq_sum(c, 2.5)),
        ("tensor", lambda m: m.tensor_sobolev_sq_sum(*t, -4.0)),
        ("abs_pow", lambda m: m.abs_pow_sum(a, 1.5)),
        ("abs_pow1", lambda m: m.abs_pow_sum(a, 1.0)),
        ("hypot_pow", lambda m: m.hypot_pow_sum(a, b, 1.875)),
        ("hypot_max", lambda m: m.hypot_max(a, b)),
        ("phi_hat", lambda m: m.phi_hat_sine(x, phi, xi, x[1] - x[0])),
    ]


@needs_ext
def test_backends_agree(rng):
    for name, f in _cases(rng):
        a, b = np.asarray(f(py)), np.asarray(f(cy))
        np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-300, err_msg=name)


def test_fallback_oracles(rng):
    a, b = rng.normal(size=100), rng.normal(size=100)
    assert abs(py.abs_pow_sum(a, 1.5) - np.sum(np.abs(a) ** 1.5)) <= 1e-13 * np.sum(np.abs(a) ** 1.5)
    assert py.hypot_max(a, b) == np.max(np.hypot(a, b))


def _backend(env_value):
    env = dict(os.environ)
    env.pop("SQG_PURE_PYTHON", None)
    if env_value is not None:
        env["SQG_PURE_PYTHON"] = env_value
    out = subprocess.run([sys.executable, "-c", "import sqgci._kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_backend_selection():
    assert _backend("1") == "python"
    if cy is not None:
        assert _backend(None) == "cython"
        assert _backend("0") == "cython"
