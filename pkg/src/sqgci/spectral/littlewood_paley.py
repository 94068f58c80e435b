"""Dyadic shell projectors and the smooth low-pass used by the increment.

Both multipliers are radial and built from the C-infinity step
``S(t) = b(t) / (b(t) + b(1 - t))`` with ``b(t) = exp(-1/t)`` for ``t > 0``.

* shell bump ``phi(r) = psi(r) - psi(r/2)``, where ``psi`` rises from 0 at
  ``r = 6/7`` to 1 at ``r = 1``; hence ``phi`` vanishes outside
  ``[6/7, 2]``, equals 1 on ``[1, 12/7]`` and the dyadic family telescopes;
* low-pass ``K(r)`` equals 1 for ``r <= 1/16``, vanishes for ``r >= 1/8``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SpectralField, VectorField


def _b(t):
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """0 for ``t <= 0``, 1 for ``t >= 1``, C-infinity in between."""
    t = np.asarray(t, dtype=np.float64)
    a = _b(t)
    b = _b(1.0 - t)
    return a / (a + b)


def _psi(r):
    return smooth_step((np.asarray(r, dtype=np.float64) - 6.0 / 7.0) * 7.0)


def shell_bump(r):
    """Radial profile of the ``j = 0`` shell projector."""
    r = np.asarray(r, dtype=np.float64)
    return _psi(r) - _psi(0.5 * r)


def lowpass_symbol(r):
    """Radial profile of the unit low-pass kernel."""
    r = np.asarray(r, dtype=np.float64)
    return 1.0 - smooth_step((r - 1.0 / 16.0) * 16.0)


def shell_symbol(radius, j: int):
    """Normalised multiplier of shell ``j`` at frequency radius ``radius``.

    For ``radius >= 1`` the neighbouring shells are divided out so the family
    sums to one; below radius 1 only shell 0 is nonzero and it is not
    normalised.
    """
    r = np.asarray(radius, dtype=np.float64)
    mine = shell_bump(r / 2.0 ** j)
    total = mine + shell_bump(r / 2.0 ** (j + 1))
    if j > 0:
        total = total + shell_bump(r / 2.0 ** (j - 1))
    out = np.array(mine, copy=True)
    norm = (r >= 1.0) & (total > 0)
    out[norm] = mine[norm] / total[norm]
    return out


@dataclass(frozen=True)
class Shell:
    j: int

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("shell index must be >= 0")


@dataclass(frozen=True)
class LowPass:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("low-pass scale must be positive")


@dataclass(frozen=True)
class RemoveMean:
    pass


@dataclass(frozen=True)
class MeanOnly:
    pass


def _radius(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, 1.0 / n)
    return np.sqrt(k[:, None] ** 2 + k[None, :] ** 2)


def multiplier(n: int, which) -> np.ndarray:
    """Dense multiplier array of a projector on an ``n``-grid."""
    if isinstance(which, Shell):
        return shell_symbol(_radius(n), which.j)
    if isinstance(which, LowPass):
        return lowpass_symbol(_radius(n) / which.lam)
    m = np.zeros((n, n))
    if isinstance(which, RemoveMean):
        m[...] = 1.0
        m[0, 0] = 0.0
        return m
    if isinstance(which, MeanOnly):
        m[0, 0] = 1.0
        return m
    raise TypeError(f"unknown projector {which!r}")


def project(f, which):
    """Apply a projector to a scalar or vector field."""
    if isinstance(f, VectorField):
        return VectorField(project(f.x, which), project(f.y, which))
    if isinstance(which, RemoveMean):
        c = f.coeffs.copy()
        c[0, 0] = 0.0
        return SpectralField(f.grid, c, f.real_flag, enforce=False)
    if isinstance(which, MeanOnly):
        c = np.zeros_like(f.coeffs)
        c[0, 0] = f.coeffs[0, 0]
        return SpectralField(f.grid, c, f.real_flag, enforce=False)
    return SpectralField(f.grid, f.coeffs * multiplier(f.n, which), f.real_flag, enforce=False)


def occupied_radii(f, tol: float = 0.0) -> np.ndarray:
    """Distinct nonzero frequency radii carrying a coefficient above ``tol``."""
    comps = f.components if isinstance(f, VectorField) else (f,)
    r2 = set()
    for c in comps:
        k = np.fft.fftfreq(c.n, 1.0 / c.n).astype(np.int64)
        i1, i2 = np.nonzero(np.abs(c.coeffs) > tol)
        vals = k[i1] ** 2 + k[i2] ** 2
        r2.update(np.unique(vals[vals > 0]).tolist())
    return np.sqrt(np.array(sorted(r2), dtype=np.float64))


def populated_shells(f, tol: float = 0.0):
    """Shell indices ``j`` on which ``f`` has a coefficient above ``tol``."""
    radii = occupied_radii(f, tol)
    if radii.size == 0:
        return []
    jmax = int(np.ceil(np.log2(radii.max() * 7.0 / 6.0))) + 1
    return [j for j in range(jmax + 1) if np.any(shell_symbol(radii, j) > 0)]
