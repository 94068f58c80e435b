"""Fourier-side field containers.

Coefficients follow ``f_hat(j) = fft2(samples) / n**2`` and are stored in FFT
index order, axis 0 carrying the ``x1`` frequency.  Fields on different grid
sizes may be combined; the smaller one is zero-padded to the larger grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .. import runtime
from .grid import GridSpec, grid_for_box


def _neg_index(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


def hermitian_part(c: np.ndarray) -> np.ndarray:
    """Return ``(c + conj(c(-j))) / 2``, which is exactly Hermitian."""
    n = c.shape[0]
    idx = _neg_index(n)
    flipped = np.conj(c[idx][:, idx])
    out = c + flipped
    out *= 0.5
    return out


def _resize(c: np.ndarray, n_new: int) -> np.ndarray:
    """Zero-pad or truncate FFT-ordered coefficients to an ``n_new`` grid.

    Truncation is only allowed when every dropped coefficient is zero.
    """
    n = c.shape[0]
    if n_new == n:
        return c
    k_old = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    if n_new > n:
        out = np.zeros((n_new, n_new), dtype=c.dtype)
        idx = k_old % n_new
        out[np.ix_(idx, idx)] = c
        return out
    h = n_new // 2
    keep = (k_old >= -h) & (k_old < h)
    if np.any(c[~keep, :]) or np.any(c[:, ~keep]):
        raise ValueError(f"cannot truncate to n={n_new}: nonzero coefficients would be lost")
    out = np.zeros((n_new, n_new), dtype=c.dtype)
    sel = np.nonzero(keep)[0]
    idx = k_old[sel] % n_new
    out[np.ix_(idx, idx)] = c[np.ix_(sel, sel)]
    return out


class SpectralField:
    """Fourier coefficients of a scalar field on the torus.

    Parameters
    ----------
    grid : GridSpec
    coeffs : complex ndarray, shape (n, n), FFT order
    real_flag : bool
        When true the coefficients are symmetrised so that
        ``f_hat(-j) = conj(f_hat(j))`` holds exactly.
    """

    __slots__ = ("grid", "coeffs", "real_flag")

    def __init__(self, grid: GridSpec, coeffs, real_flag: bool = True, enforce: bool = True):
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.shape != (grid.n, grid.n):
            raise ValueError(f"coefficient shape {c.shape} does not match grid n={grid.n}")
        if real_flag and enforce:
            c = hermitian_part(c)
        self.grid = grid
        self.coeffs = c
        self.real_flag = bool(real_flag)

    # construction helpers
    @classmethod
    def zeros(cls, grid: GridSpec, real_flag: bool = True) -> "SpectralField":
        return cls(grid, np.zeros((grid.n, grid.n), np.complex128), real_flag, enforce=False)

    @classmethod
    def from_modes(cls, grid: GridSpec, modes: dict, real_flag: bool = True) -> "SpectralField":
        """Build from ``{(j1, j2): coefficient}``; missing conjugates are not added."""
        c = np.zeros((grid.n, grid.n), np.complex128)
        for (j1, j2), val in modes.items():
            if not grid.contains(j1, j2):
                raise ValueError(f"frequency ({j1}, {j2}) outside grid n={grid.n}")
            c[j1 % grid.n, j2 % grid.n] += val
        return cls(grid, c, real_flag, enforce=False)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def mean(self) -> complex:
        return complex(self.coeffs[0, 0])

    def coeff(self, j1: int, j2: int) -> complex:
        if not self.grid.contains(j1, j2):
            return 0j
        return complex(self.coeffs[j1 % self.n, j2 % self.n])

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy(), self.real_flag, enforce=False)

    def on_grid(self, n: int) -> "SpectralField":
        """Same field represented on an ``n``-grid (pad or exact truncation)."""
        if n == self.n:
            return self
        lam = min(self.grid.lambda_max, n / 4) if n < self.n else self.grid.lambda_max
        return SpectralField(GridSpec(n, lam), _resize(self.coeffs, n), self.real_flag, enforce=False)

    def support_box(self):
        """Frequency bounding box ``((lo1, hi1), (lo2, hi2))`` or ``None`` if zero."""
        nz = self.coeffs != 0
        rows = np.nonzero(np.any(nz, axis=1))[0]
        if rows.size == 0:
            return None
        cols = np.nonzero(np.any(nz, axis=0))[0]
        k = self.grid.freqs
        return (int(k[rows].min()), int(k[rows].max())), (int(k[cols].min()), int(k[cols].max()))

    def compact(self) -> "SpectralField":
        """Move to the smallest power-of-two grid holding the support."""
        box = self.support_box()
        if box is None:
            return self.on_grid(8)
        (a, b), (c, d) = box
        n = grid_for_box(min(a, c), max(b, d))
        return self.on_grid(min(n, self.n)) if n < self.n else self

    def conj(self) -> "SpectralField":
        """Coefficients of the pointwise complex conjugate, ``conj(f_hat(-j))``."""
        idx = _neg_index(self.n)
        return SpectralField(self.grid, np.conj(self.coeffs[idx][:, idx]), self.real_flag, enforce=False)

    def real_part(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs, True, enforce=True)

    # arithmetic
    def _binary(self, other, op):
        if isinstance(other, SpectralField):
            a, b = self, other
            if a.n != b.n:
                n = max(a.n, b.n)
                a, b = a.on_grid(n), b.on_grid(n)
            return SpectralField(a.grid, op(a.coeffs, b.coeffs), a.real_flag and b.real_flag, enforce=False)
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs, self.real_flag, enforce=False)

    def scale(self, a) -> "SpectralField":
        real = self.real_flag and np.imag(a) == 0
        return SpectralField(self.grid, self.coeffs * a, real, enforce=False)

    def __mul__(self, a):
        if isinstance(a, SpectralField):
            return NotImplemented
        return self.scale(a)

    __rmul__ = __mul__

    def __repr__(self):
        return f"SpectralField(n={self.n}, real={self.real_flag}, mean={self.mean:.3g})"


@dataclass(frozen=True)
class VectorField:
    x: SpectralField
    y: SpectralField

    def __post_init__(self):
        if self.x.n != self.y.n:
            n = max(self.x.n, self.y.n)
            object.__setattr__(self, "x", self.x.on_grid(n))
            object.__setattr__(self, "y", self.y.on_grid(n))

    @classmethod
    def zeros(cls, grid: GridSpec, real_flag: bool = True) -> "VectorField":
        return cls(SpectralField.zeros(grid, real_flag), SpectralField.zeros(grid, real_flag))

    @property
    def grid(self) -> GridSpec:
        return self.x.grid

    @property
    def n(self) -> int:
        return self.x.n

    @property
    def components(self):
        return (self.x, self.y)

    @property
    def real_flag(self) -> bool:
        return self.x.real_flag and self.y.real_flag

    def on_grid(self, n: int) -> "VectorField":
        return VectorField(self.x.on_grid(n), self.y.on_grid(n))

    def __add__(self, o):
        return VectorField(self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return VectorField(self.x - o.x, self.y - o.y)

    def __neg__(self):
        return VectorField(-self.x, -self.y)

    def __mul__(self, a):
        return VectorField(self.x * a, self.y * a)

    __rmul__ = __mul__

    def conj(self) -> "VectorField":
        return VectorField(self.x.conj(), self.y.conj())

    def real_part(self) -> "VectorField":
        return VectorField(self.x.real_part(), self.y.real_part())


@dataclass(frozen=True)
class SymTensorField:
    """Symmetric 2x2 tensor field stored as its (11, 12, 22) entries."""

    c11: SpectralField
    c12: SpectralField
    c22: SpectralField

    def __post_init__(self):
        n = max(self.c11.n, self.c12.n, self.c22.n)
        for name in ("c11", "c12", "c22"):
            f = getattr(self, name)
            if f.n != n:
                object.__setattr__(self, name, f.on_grid(n))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SymTensorField":
        return cls(*(SpectralField.zeros(grid) for _ in range(3)))

    @property
    def grid(self) -> GridSpec:
        return self.c11.grid

    @property
    def n(self) -> int:
        return self.c11.n

    @property
    def components(self):
        return (self.c11, self.c12, self.c22)

    def entry(self, i: int, j: int) -> SpectralField:
        """Entry ``(i, j)`` with indices in ``{1, 2}``."""
        if i not in (1, 2) or j not in (1, 2):
            raise IndexError(f"tensor indices must be 1 or 2, got ({i}, {j})")
        if i == j:
            return self.c11 if i == 1 else self.c22
        return self.c12

    def on_grid(self, n: int) -> "SymTensorField":
        return SymTensorField(self.c11.on_grid(n), self.c12.on_grid(n), self.c22.on_grid(n))

    def __add__(self, o):
        return SymTensorField(self.c11 + o.c11, self.c12 + o.c12, self.c22 + o.c22)

    def __sub__(self, o):
        return SymTensorField(self.c11 - o.c11, self.c12 - o.c12, self.c22 - o.c22)

    def __neg__(self):
        return SymTensorField(-self.c11, -self.c12, -self.c22)

    def __mul__(self, a):
        return SymTensorField(self.c11 * a, self.c12 * a, self.c22 * a)

    __rmul__ = __mul__

    def plus_identity_times(self, p: SpectralField) -> "SymTensorField":
        """``self + p I`` for a scalar field ``p``."""
        return SymTensorField(self.c11 + p, self.c12, self.c22 + p)


PRUNE_REL = 1e-14


def transform(samples, grid: GridSpec | None = None, prune: bool = True) -> SpectralField:
    """Forward transform of grid samples; real input yields a real field.

    With ``prune`` set, coefficients below ``PRUNE_REL`` times the largest one
    are set to exactly zero so that the field has a sharp declared support.
    """
    a = np.asarray(samples)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square 2-D samples, got shape {a.shape}")
    if grid is None:
        grid = GridSpec(a.shape[0])
    elif a.shape != (grid.n, grid.n):
        raise ValueError(f"samples of shape {a.shape} do not match grid n={grid.n}")
    real = np.isrealobj(a)
    c = sfft.fft2(a, workers=runtime.workers())
    c /= grid.n * grid.n
    if prune:
        top = np.max(np.abs(c)) if c.size else 0.0
        c[np.abs(c) <= PRUNE_REL * top] = 0.0
    return SpectralField(grid, c, real_flag=real, enforce=real)


def inverse(f: SpectralField, n: int | None = None) -> np.ndarray:
    """Grid samples of ``f`` (on an ``n``-grid if given); real array for real fields."""
    if n is not None and n != f.n:
        f = f.on_grid(n)
    m = f.n
    if f.real_flag:
        # Hermitian input: evaluate with the real inverse transform on half the spectrum
        half = f.coeffs[:, : m // 2 + 1].copy()
        out = sfft.irfft2(half, s=(m, m), workers=runtime.workers())
    else:
        out = sfft.ifft2(f.coeffs, workers=runtime.workers())
    out *= m * m
    return out


def transform_vector(sx, sy, grid: GridSpec | None = None) -> VectorField:
    return VectorField(transform(sx, grid), transform(sy, grid))


def inverse_vector(v: VectorField, n: int | None = None):
    return inverse(v.x, n), inverse(v.y, n)
