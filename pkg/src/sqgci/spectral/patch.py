"""Dense coefficient blocks on a sub-box of the frequency lattice.

A :class:`Patch` stores the coefficients of a (generally complex-valued)
trigonometric polynomial whose support lies in a small box far from the
origin, such as one directional piece of the increment.  Storing the box
alone keeps memory proportional to the support rather than to the grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .. import runtime
from .fields import SpectralField
from .grid import GridSpec
from .._kernels._pykernels import sigma_max_sq
from .products import MAX_PADDED, AliasError, _pow2_at_least, convolve_blocks


@dataclass(frozen=True)
class Patch:
    lo: tuple
    data: np.ndarray

    @property
    def shape(self):
        return self.data.shape

    @property
    def hi(self):
        return (self.lo[0] + self.data.shape[0] - 1, self.lo[1] + self.data.shape[1] - 1)

    def freqs(self):
        """Broadcastable integer frequency arrays ``(j1[:, None], j2[None, :])``."""
        j1 = np.arange(self.lo[0], self.lo[0] + self.data.shape[0])
        j2 = np.arange(self.lo[1], self.lo[1] + self.data.shape[1])
        return j1[:, None], j2[None, :]

    def map(self, symbol) -> "Patch":
        """Multiply by ``symbol(j1, j2)``."""
        j1, j2 = self.freqs()
        return Patch(self.lo, self.data * symbol(j1, j2))

    def scale(self, a) -> "Patch":
        return Patch(self.lo, self.data * a)

    def conj(self) -> "Patch":
        """Patch of the pointwise complex conjugate (support reflected through 0)."""
        hi = self.hi
        return Patch((-hi[0], -hi[1]), np.conj(self.data[::-1, ::-1]))

    def __add__(self, other: "Patch") -> "Patch":
        if other.lo == self.lo and other.shape == self.shape:
            return Patch(self.lo, self.data + other.data)
        lo = (min(self.lo[0], other.lo[0]), min(self.lo[1], other.lo[1]))
        hi = (max(self.hi[0], other.hi[0]), max(self.hi[1], other.hi[1]))
        out = np.zeros((hi[0] - lo[0] + 1, hi[1] - lo[1] + 1), np.complex128)
        for p in (self, other):
            a, b = p.lo[0] - lo[0], p.lo[1] - lo[1]
            out[a:a + p.shape[0], b:b + p.shape[1]] += p.data
        return Patch(lo, out)

    def __neg__(self):
        return Patch(self.lo, -self.data)

    def __sub__(self, other):
        return self + (-other)

    def multiply(self, other: "Patch") -> "Patch":
        c, clo = convolve_blocks(self.data, self.lo, other.data, other.lo)
        return Patch(clo, c)

    def fits(self, n: int) -> bool:
        h = n // 2
        return self.lo[0] >= -h and self.lo[1] >= -h and self.hi[0] < h and self.hi[1] < h

    def to_field(self, n: int, real_flag: bool = False) -> SpectralField:
        """Embed in an ``n``-grid field (the caller asserts realness if set)."""
        if not self.fits(n):
            raise AliasError(f"patch frequencies {self.lo}..{self.hi} do not fit a grid of n={n}")
        c = np.zeros((n, n), np.complex128)
        j1, j2 = self.freqs()
        c[np.ix_(j1.ravel() % n, j2.ravel() % n)] = self.data
        return SpectralField(GridSpec(n), c, real_flag, enforce=real_flag)

    @classmethod
    def from_field(cls, f: SpectralField) -> "Patch":
        box = f.support_box()
        if box is None:
            return cls((0, 0), np.zeros((1, 1), np.complex128))
        (lo1, hi1), (lo2, hi2) = box
        n = f.n
        data = f.coeffs[np.ix_(np.arange(lo1, hi1 + 1) % n, np.arange(lo2, hi2 + 1) % n)]
        return cls((lo1, lo2), data.copy())

    def trimmed(self) -> "Patch":
        """Shrink to the bounding box of the nonzero entries."""
        nz = self.data != 0
        rows = np.nonzero(np.any(nz, axis=1))[0]
        if rows.size == 0:
            return Patch((0, 0), np.zeros((1, 1), np.complex128))
        cols = np.nonzero(np.any(nz, axis=0))[0]
        r0, r1, c0, c1 = rows[0], rows[-1], cols[0], cols[-1]
        return Patch((self.lo[0] + int(r0), self.lo[1] + int(c0)), self.data[r0:r1 + 1, c0:c1 + 1].copy())

    def is_zero(self) -> bool:
        return not np.any(self.data)

    def mean(self) -> complex:
        if self.lo[0] <= 0 <= self.hi[0] and self.lo[1] <= 0 <= self.hi[1]:
            return complex(self.data[-self.lo[0], -self.lo[1]])
        return 0j

    def sobolev_sq(self, s: float) -> float:
        j1, j2 = self.freqs()
        r2 = (j1 * j1 + j2 * j2).astype(np.float64)
        w = np.where(r2 > 0, np.where(r2 > 0, r2, 1.0) ** s, 0.0)
        return float(np.sum(w * (self.data.real ** 2 + self.data.imag ** 2)))


def sample_size(*shapes) -> int:
    """Padded FFT size for products of patches with the given block shapes."""
    need = max(sum(s[0] for s in shapes) - len(shapes) + 1, sum(s[1] for s in shapes) - len(shapes) + 1)
    P = _pow2_at_least(need)
    if P > MAX_PADDED:
        raise AliasError(f"patch product needs a padded grid of {P} > {MAX_PADDED} points per dimension")
    return P


def patch_samples(p: Patch, P: int) -> np.ndarray:
    """Samples of ``exp(-2 pi i lo.x) f(x)`` on a ``P``-grid, ``f`` the patch function.

    Products of such samples followed by :func:`product_from_samples` give
    exact coefficients as long as ``P`` exceeds the summed block widths.
    """
    F = np.zeros((P, P), np.complex128)
    F[: p.shape[0], : p.shape[1]] = p.data
    s = sfft.ifft2(F, workers=runtime.workers())
    s *= P * P
    return s


def product_from_samples(samples: np.ndarray, lo, shape) -> Patch:
    """Patch at ``lo`` of the given block ``shape`` from product samples."""
    P = samples.shape[0]
    if shape[0] > P or shape[1] > P:
        raise AliasError(f"product block {shape} does not fit the sample grid {P}")
    H = sfft.fft2(samples, workers=runtime.workers())
    H /= P * P
    return Patch(tuple(lo), H[: shape[0], : shape[1]].copy())


def tensor_sobolev_sq_patches(p11: Patch, p12: Patch, p22: Patch, s: float) -> float:
    """Homogeneous ``H^s`` squared norm of a tensor given as three aligned patches."""
    box = p11 + p12.scale(0) + p22.scale(0)
    pieces = []
    for p in (p11, p12, p22):
        out = np.zeros(box.shape, np.complex128)
        a, b = p.lo[0] - box.lo[0], p.lo[1] - box.lo[1]
        out[a:a + p.shape[0], b:b + p.shape[1]] = p.data
        pieces.append(out)
    sig2 = sigma_max_sq(*pieces)
    j1, j2 = box.freqs()
    r2 = (j1 * j1 + j2 * j2).astype(np.float64)
    w = np.where(r2 > 0, np.where(r2 > 0, r2, 1.0) ** s, 0.0)
    return float(np.sum(w * sig2))
