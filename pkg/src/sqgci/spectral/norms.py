"""Homogeneous Sobolev and Lebesgue norms of scalar, vector and tensor fields.

``SobolevHomog(s)`` uses the weight ``|j|^{2s}`` (no ``2 pi``) and omits
``j = 0``; a tensor field uses the operator norm of its coefficient matrix
at each frequency.  ``Lp`` and ``LInf`` are grid quadratures; vector fields
use the pointwise Euclidean norm and tensors the pointwise operator norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels as K
from .fields import SpectralField, SymTensorField, VectorField, inverse


@dataclass(frozen=True)
class SobolevHomog:
    s: float


@dataclass(frozen=True)
class Lp:
    p: float

    def __post_init__(self):
        if not (1.0 <= self.p <= np.inf):
            raise ValueError(f"L^p norm needs 1 <= p <= inf, got p={self.p}")


@dataclass(frozen=True)
class LInf:
    pass


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def sobolev_sq(f, s: float) -> float:
    """Squared homogeneous ``H^s`` norm."""
    if isinstance(f, SpectralField):
        return K.sobolev_sq_sum(_c(f.coeffs), float(s))
    if isinstance(f, VectorField):
        return K.sobolev_sq_sum(_c(f.x.coeffs), float(s)) + K.sobolev_sq_sum(_c(f.y.coeffs), float(s))
    if isinstance(f, SymTensorField):
        return K.tensor_sobolev_sq_sum(_c(f.c11.coeffs), _c(f.c12.coeffs), _c(f.c22.coeffs), float(s))
    raise TypeError(f"unsupported field type {type(f).__name__}")


def _pointwise_magnitude(f, n):
    """Samples of |f| (scalar), |f|_2 (vector) or operator norm (tensor), flattened."""
    if isinstance(f, SpectralField):
        a = inverse(f, n)
        if np.iscomplexobj(a):
            return np.ascontiguousarray(np.abs(a).ravel())
        return np.ascontiguousarray(a.ravel())
    if isinstance(f, VectorField):
        ax, ay = inverse(f.x, n), inverse(f.y, n)
        if np.iscomplexobj(ax) or np.iscomplexobj(ay):
            return np.ascontiguousarray(np.sqrt(np.abs(ax) ** 2 + np.abs(ay) ** 2).ravel())
        return ax.ravel(), ay.ravel()
    if isinstance(f, SymTensorField):
        a, b, c = (inverse(x, n) for x in f.components)
        half_tr = 0.5 * (a + c)
        rad = np.sqrt((0.5 * (a - c)) ** 2 + b * b)
        return np.ascontiguousarray((np.abs(half_tr) + rad).ravel())
    raise TypeError(f"unsupported field type {type(f).__name__}")


# Smallest quadrature grid used for L^p norms.  The rectangle rule is
# spectrally accurate for smooth |f|^p but only second order across zeros of
# f when p is not an even integer, so small grids are refined.
MIN_QUADRATURE = 2048


def lp_norm(f, p: float, n: int | None = None) -> float:
    """L^p norm over the unit torus by quadrature on an ``n``-grid.

    The default grid is the field grid, refined to at least ``MIN_QUADRATURE``.
    """
    if not (1.0 <= p <= np.inf):
        raise ValueError(f"L^p norm needs 1 <= p <= inf, got p={p}")
    n = max(f.n, MIN_QUADRATURE) if n is None else n
    m = _pointwise_magnitude(f, n)
    if isinstance(m, tuple):
        ax, ay = (np.ascontiguousarray(t, dtype=np.float64) for t in m)
        if np.isinf(p):
            return K.hypot_max(ax, ay)
        return (K.hypot_pow_sum(ax, ay, float(p)) / ax.size) ** (1.0 / p)
    m = np.ascontiguousarray(m, dtype=np.float64)
    if np.isinf(p):
        return float(np.max(np.abs(m))) if m.size else 0.0
    return (K.abs_pow_sum(m, float(p)) / m.size) ** (1.0 / p)


def norm(f, kind, n: int | None = None) -> float:
    """Norm of a field; ``kind`` is ``SobolevHomog(s)``, ``Lp(p)`` or ``LInf()``."""
    if isinstance(kind, SobolevHomog):
        return float(np.sqrt(sobolev_sq(f, kind.s)))
    if isinstance(kind, Lp):
        return lp_norm(f, kind.p, n)
    if isinstance(kind, LInf):
        return lp_norm(f, np.inf, n)
    raise TypeError(f"unknown norm kind {kind!r}")


def l2_coeff_norm(f) -> float:
    """Coefficient l^2 norm (Parseval counterpart of the L^2 norm)."""
    comps = f.components if isinstance(f, (VectorField, SymTensorField)) else (f,)
    w = (1.0, 2.0, 1.0) if isinstance(f, SymTensorField) else (1.0,) * len(comps)
    return float(np.sqrt(sum(wi * K.abs_pow_sum(np.ascontiguousarray(np.abs(c.coeffs).ravel()), 2.0)
                             for wi, c in zip(w, comps))))
