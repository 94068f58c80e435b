"""Fourier multipliers on the torus.

Conventions: ``Lambda^s`` has symbol ``|2 pi j|^s``, ``d_i`` has symbol
``2 pi i j_i``, ``grad_perp f = (-d_2 f, d_1 f)`` and
``grad_perp . F = d_1 F_2 - d_2 F_1``.  Negative-order symbols and
fractional powers act on the mean-free part only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SpectralField, SymTensorField, VectorField

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FractionalLaplacian:
    s: float


@dataclass(frozen=True)
class Partial:
    i: int

    def __post_init__(self):
        if self.i not in (1, 2):
            raise ValueError("Partial index must be 1 or 2")


@dataclass(frozen=True)
class Grad:
    pass


@dataclass(frozen=True)
class PerpGrad:
    pass


@dataclass(frozen=True)
class Div:
    pass


@dataclass(frozen=True)
class PerpDiv:
    pass


@dataclass(frozen=True)
class PerpRiesz:
    """``Lambda^{-1} grad_perp``."""


@dataclass(frozen=True)
class InverseLaplacian:
    pass


SymbolKind = (FractionalLaplacian, Partial, Grad, PerpGrad, Div, PerpDiv, PerpRiesz, InverseLaplacian)


def _abs_symbol(n: int, s: float) -> np.ndarray:
    """``|2 pi j|^s`` on an n-grid with the zero mode set to 0."""
    k = np.fft.fftfreq(n, 1.0 / n)
    r2 = k[:, None] ** 2 + k[None, :] ** 2
    r2[0, 0] = 1.0
    if s == 2.0:
        m = (TWO_PI * TWO_PI) * r2
    elif s == -2.0:
        m = 1.0 / ((TWO_PI * TWO_PI) * r2)
    elif s == 1.0:
        m = TWO_PI * np.sqrt(r2)
    elif s == -1.0:
        m = 1.0 / (TWO_PI * np.sqrt(r2))
    else:
        m = (TWO_PI * TWO_PI * r2) ** (0.5 * s)
    m[0, 0] = 0.0
    return m


def _ik(n: int, axis: int) -> np.ndarray:
    """Broadcastable ``2 pi i j_axis`` with the Nyquist entry zeroed."""
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0.0
    v = 1j * TWO_PI * k
    return v[:, None] if axis == 1 else v[None, :]


def _wrap(f: SpectralField, c: np.ndarray) -> SpectralField:
    return SpectralField(f.grid, c, f.real_flag, enforce=False)


def lam(f: SpectralField, s: float = 1.0) -> SpectralField:
    """``Lambda^s f``."""
    return _wrap(f, f.coeffs * _abs_symbol(f.n, s))


def partial(f: SpectralField, i: int) -> SpectralField:
    return _wrap(f, f.coeffs * _ik(f.n, i))


def inv_laplacian(f: SpectralField) -> SpectralField:
    return _wrap(f, -f.coeffs * _abs_symbol(f.n, -2.0))


def grad(f: SpectralField) -> VectorField:
    return VectorField(partial(f, 1), partial(f, 2))


def perp_grad(f: SpectralField) -> VectorField:
    return VectorField(-partial(f, 2), partial(f, 1))


def div(v: VectorField) -> SpectralField:
    return partial(v.x, 1) + partial(v.y, 2)


def perp_div(v: VectorField) -> SpectralField:
    return partial(v.y, 1) - partial(v.x, 2)


def perp_riesz(f: SpectralField) -> VectorField:
    return perp_grad(lam(f, -1.0))


def lam_vec(v: VectorField, s: float = 1.0) -> VectorField:
    return VectorField(lam(v.x, s), lam(v.y, s))


def tensor_div(R: SymTensorField) -> VectorField:
    """Row divergence ``(div R)_i = d_j R_ij``."""
    return VectorField(partial(R.c11, 1) + partial(R.c12, 2), partial(R.c12, 1) + partial(R.c22, 2))


def apply_symbol(f, kind):
    """Apply one of the ``SymbolKind`` multipliers.

    Scalar-valued kinds applied to a :class:`VectorField` act componentwise.
    """
    if isinstance(f, VectorField) and isinstance(kind, (FractionalLaplacian, Partial, InverseLaplacian)):
        return VectorField(apply_symbol(f.x, kind), apply_symbol(f.y, kind))
    if isinstance(kind, FractionalLaplacian):
        return lam(f, kind.s)
    if isinstance(kind, Partial):
        return partial(f, kind.i)
    if isinstance(kind, InverseLaplacian):
        return inv_laplacian(f)
    if isinstance(kind, Grad):
        return grad(f)
    if isinstance(kind, PerpGrad):
        return perp_grad(f)
    if isinstance(kind, PerpRiesz):
        return perp_riesz(f)
    if isinstance(kind, Div):
        return div(f)
    if isinstance(kind, PerpDiv):
        return perp_div(f)
    raise TypeError(f"unknown symbol kind {kind!r}")


class MeanError(ValueError):
    pass


def lam_symbol(j1, j2, s: float) -> np.ndarray:
    """``|2 pi j|^s`` for broadcastable integer frequency arrays, 0 at ``j = 0``."""
    r2 = np.asarray(j1 * j1 + j2 * j2, dtype=np.float64)
    zero = r2 == 0
    m = (TWO_PI * TWO_PI * np.where(zero, 1.0, r2)) ** (0.5 * s)
    return np.where(zero, 0.0, m)


def inverse_divergence_coeffs(j1, j2, u1, u2):
    """Coefficients ``(r11, r12, r22)`` of the inverse divergence at frequencies ``(j1, j2)``."""
    r2 = np.asarray(j1 * j1 + j2 * j2, dtype=np.float64)
    zero = r2 == 0
    r2 = np.where(zero, 1.0, r2)
    inv = np.where(zero, 0.0, -1.0 / (TWO_PI * TWO_PI * r2))
    U1 = u1 * inv
    U2 = u2 * inv
    d = 1j * TWO_PI * (j1 * U1 + j2 * U2)
    r11 = 2j * TWO_PI * j1 * U1 - (1.0 + j1 * j1 / r2) * d
    r22 = 2j * TWO_PI * j2 * U2 - (1.0 + j2 * j2 / r2) * d
    r12 = 1j * TWO_PI * (j1 * U2 + j2 * U1) - (j1 * j2 / r2) * d
    return r11, r12, r22


def inverse_divergence(u: VectorField, mean_tol: float = 1e-12) -> SymTensorField:
    """Symmetric tensor ``R u`` with ``div R u = u - grad Delta^{-1} div u``.

    ``(R u)_ij = d_i D^{-1} u_j + d_j D^{-1} u_i - (delta_ij + d_i d_j D^{-1}) div D^{-1} u``
    where ``D`` is the Laplacian.  The mean of ``u`` must vanish (relative to
    its largest coefficient, within ``mean_tol``) and is discarded.
    """
    scale = max(np.max(np.abs(u.x.coeffs)), np.max(np.abs(u.y.coeffs)), 1e-300)
    m = max(abs(u.x.mean), abs(u.y.mean))
    if m > mean_tol * scale:
        raise MeanError(f"inverse divergence needs a mean-zero input, got |mean| = {m:.3e}")
    n = u.n
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0.0
    r11, r12, r22 = inverse_divergence_coeffs(k[:, None], k[None, :], u.x.coeffs, u.y.coeffs)
    real = u.real_flag
    g = u.grid
    return SymTensorField(
        SpectralField(g, r11, real, enforce=False),
        SpectralField(g, r12, real, enforce=False),
        SpectralField(g, r22, real, enforce=False),
    )


def leray(u: VectorField) -> VectorField:
    """Divergence-free part ``u - grad Delta^{-1} div u`` (mean removed)."""
    g = grad(inv_laplacian(div(u)))
    out = u - g
    out.x.coeffs[0, 0] = 0.0
    out.y.coeffs[0, 0] = 0.0
    return out
