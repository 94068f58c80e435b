import numpy as np
import pytest

from sqgci.geometry import DirectionSet
from sqgci.scheme.constants import constant_C
from sqgci.scheme.increment import DirectionalIncrement, IncrementRecord, _carrier
from sqgci.scheme.params import SchemeParams
from sqgci.scheme.state import base_state
from sqgci.spectral.fields import SpectralField
from sqgci.spectral.grid import GridSpec
from sqgci.spectral.patch import Patch


def random_real(rng, n, radius, scale=1.0, mean=False):
    """Real trigonometric polynomial with ``|j|_inf <= radius`` on an ``n``-grid."""
    k = np.fft.fftfreq(n, 1.0 / n)
    mask = (np.abs(k)[:, None] <= radius) & (np.abs(k)[None, :] <= radius)
    c = np.zeros((n, n), np.complex128)
    c[mask] = scale * (rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum()))
    if not mean:
        c[0, 0] = 0.0
    return SpectralField(GridSpec(n), c, True, enforce=True)


def random_divfree(rng, n, radius, scale=1.0):
    """``grad_perp psi`` for a random mean-zero stream function."""
    from sqgci.spectral.operators import perp_grad
    return perp_grad(random_real(rng, n, radius, scale))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def C():
    return constant_C()


@pytest.fixture(scope="session")
def synthetic(C):
    """A nonzero six-direction increment at lambda = 16 on the base state.

    Random 5x5 potential blocks sit at the carriers of k1, k2, k3 and their
    conjugates at -k; the amplitudes are irrelevant for the stress algebra.
    """
    params = SchemeParams(gamma=1.5)
    s0 = base_state(params)
    rng = np.random.default_rng(1)
    lam = 16
    ds = DirectionSet()
    a = SpectralField.zeros(GridSpec(8))
    pots = []
    for k in ds.dirs[:3]:
        c = _carrier(lam, k)
        pots.append(Patch((c[0] - 2, c[1] - 2), (rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))) * 1e-3))
    pots += [p.conj() for p in pots]
    dirs = tuple(DirectionalIncrement(k, a, p) for k, p in zip(ds.dirs, pots))
    pt = SpectralField.from_modes(GridSpec(8), {(1, 1): 1e-4, (-1, -1): 1e-4})
    inc = IncrementRecord(lam, C, dirs, (a, a, a), pt, 0.0)
    return params, s0, inc
