"""Exact products of band-limited fields.

The product of two trigonometric polynomials is computed as a grid product on
a padded FFT grid of size ``P``.  Each factor is placed at its frequencies
modulo ``P``; as long as the frequency bounding box of the product is
narrower than ``P`` in each direction, every product coefficient is
recovered from a unique residue, so the result is the exact convolution of
the coefficient arrays.  Only entries inside that bounding box are written,
so no roundoff leaks outside the true support.
"""
from __future__ import annotations

import numpy as np
import scipy.fft as sfft

from .. import runtime
from .fields import SpectralField
from .grid import GridSpec


class AliasError(ValueError):
    """Product frequencies do not fit on the requested output grid."""


# Largest padded FFT size multiply() will allocate.
MAX_PADDED = 8192


def _pow2_at_least(m: int, minimum: int = 8) -> int:
    p = minimum
    while p < m:
        p *= 2
    return p


def _samples(F: np.ndarray, real: bool) -> np.ndarray:
    P = F.shape[0]
    w = runtime.workers()
    if real:
        s = sfft.irfft2(F[:, : P // 2 + 1], s=(P, P), workers=w)
    else:
        s = sfft.ifft2(F, workers=w)
    s *= P * P
    return s


def convolve_blocks(a: np.ndarray, alo, b: np.ndarray, blo, real: bool = False):
    """Exact convolution of two dense coefficient blocks.

    ``a`` holds coefficients at frequencies ``alo + (i1, i2)``; likewise
    ``b``.  Returns ``(c, clo)`` with ``c`` of shape
    ``a.shape + b.shape - 1``.  ``real`` declares both blocks Hermitian and
    symmetric about the origin, which allows real-valued grid samples.
    """
    shape = (a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1)
    clo = (alo[0] + blo[0], alo[1] + blo[1])
    P = _pow2_at_least(max(shape))
    if P > MAX_PADDED:
        raise AliasError(f"product needs a padded grid of {P} > {MAX_PADDED} points per dimension")
    sf = _samples(_place_block(a, alo, P), real)
    sg = _samples(_place_block(b, blo, P), real)
    sf *= sg
    del sg
    H = sfft.fft2(sf, workers=runtime.workers())
    del sf
    H /= P * P
    k1 = np.arange(clo[0], clo[0] + shape[0]) % P
    k2 = np.arange(clo[1], clo[1] + shape[1]) % P
    return H[np.ix_(k1, k2)], clo


def _place_block(block: np.ndarray, lo, P: int) -> np.ndarray:
    out = np.zeros((P, P), np.complex128)
    k1 = np.arange(lo[0], lo[0] + block.shape[0]) % P
    k2 = np.arange(lo[1], lo[1] + block.shape[1]) % P
    out[np.ix_(k1, k2)] = block
    return out


def extract_block(f: SpectralField, box):
    """Dense coefficient block of ``f`` over ``box = ((lo1, hi1), (lo2, hi2))``."""
    (lo1, hi1), (lo2, hi2) = box
    n = f.n
    return f.coeffs[np.ix_(np.arange(lo1, hi1 + 1) % n, np.arange(lo2, hi2 + 1) % n)]


def product_box(f: SpectralField, g: SpectralField):
    """Bounding box of the product support, or ``None`` if either factor is zero."""
    bf, bg = f.support_box(), g.support_box()
    if bf is None or bg is None:
        return None
    return ((bf[0][0] + bg[0][0], bf[0][1] + bg[0][1]), (bf[1][0] + bg[1][0], bf[1][1] + bg[1][1]))


def multiply(f: SpectralField, g: SpectralField, out_n: int | None = None) -> SpectralField:
    """Exact pointwise product ``f g`` as a field on an ``out_n``-grid.

    Raises
    ------
    AliasError
        If the product has frequencies outside ``[-out_n/2, out_n/2)``.
    """
    out_n = max(f.n, g.n) if out_n is None else out_n
    grid = GridSpec(out_n)
    real = f.real_flag and g.real_flag
    bf, bg = f.support_box(), g.support_box()
    if bf is None or bg is None:
        return SpectralField.zeros(grid, real)
    sb = ((bf[0][0] + bg[0][0], bf[0][1] + bg[0][1]), (bf[1][0] + bg[1][0], bf[1][1] + bg[1][1]))
    h = out_n // 2
    if any(lo < -h or hi >= h for lo, hi in sb):
        raise AliasError(
            f"product frequencies reach {sb[0]} x {sb[1]} (per axis), outside [-{h}, {h}) of grid n={out_n}"
        )
    symmetric = real and all(lo == -hi for lo, hi in bf) and all(lo == -hi for lo, hi in bg)
    c, clo = convolve_blocks(extract_block(f, bf), (bf[0][0], bf[1][0]),
                             extract_block(g, bg), (bg[0][0], bg[1][0]), real=symmetric)
    out = np.zeros((out_n, out_n), np.complex128)
    k1 = np.arange(clo[0], clo[0] + c.shape[0]) % out_n
    k2 = np.arange(clo[1], clo[1] + c.shape[1]) % out_n
    out[np.ix_(k1, k2)] = c
    return SpectralField(grid, out, real, enforce=real)
