"""NumPy implementations of the compiled kernels.

Same signatures as ``_ckernels``.  Work is split into fixed-size row blocks
whose partial sums are accumulated in block order, so the result depends only
on the input array.
"""
import numpy as np

_ROWS = 256
_XI_BLOCK = 64


def phi_hat_sine(x, phi, xi, h):
    x = np.ascontiguousarray(x, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    out = np.empty(xi.shape[0])
    for start in range(0, xi.shape[0], _XI_BLOCK):
        block = xi[start:start + _XI_BLOCK]
        out[start:start + _XI_BLOCK] = h * (np.sin(2.0 * np.pi * block[:, None] * x[None, :]) @ phi)
    return out


def _freqs(n):
    return np.fft.fftfreq(n, 1.0 / n)


def sobolev_sq_sum(c, s):
    n1, n2 = c.shape
    j1, j2 = _freqs(n1), _freqs(n2)
    acc = 0.0
    for start in range(0, n1, _ROWS):
        r2 = j1[start:start + _ROWS, None] ** 2 + j2[None, :] ** 2
        blk = c[start:start + _ROWS]
        with np.errstate(divide="ignore"):
            w = np.where(r2 > 0, r2, 1.0) ** s
        w[r2 == 0] = 0.0
        acc += float(np.sum(w * (blk.real ** 2 + blk.imag ** 2)))
    return acc


def sigma_max_sq(x, y, z):
    """Largest eigenvalue of ``A^H A`` for ``A = [[x, y], [y, z]]`` (no cancellation)."""
    ay2 = np.abs(y) ** 2
    h11 = np.abs(x) ** 2 + ay2
    h22 = ay2 + np.abs(z) ** 2
    h12 = np.conj(x) * y + np.conj(y) * z
    return 0.5 * (h11 + h22) + np.sqrt((0.5 * (h11 - h22)) ** 2 + np.abs(h12) ** 2)


def tensor_sobolev_sq_sum(a11, a12, a22, s):
    n1, n2 = a11.shape
    j1, j2 = _freqs(n1), _freqs(n2)
    acc = 0.0
    for start in range(0, n1, _ROWS):
        sl = slice(start, start + _ROWS)
        x, y, z = a11[sl], a12[sl], a22[sl]
        sig2 = sigma_max_sq(x, y, z)
        r2 = j1[sl, None] ** 2 + j2[None, :] ** 2
        w = np.where(r2 > 0, r2, 1.0) ** s
        w[r2 == 0] = 0.0
        acc += float(np.sum(w * sig2))
    return acc


def abs_pow_sum(a, p):
    a = np.ascontiguousarray(a).ravel()
    acc = 0.0
    step = _ROWS * 4096
    for start in range(0, a.shape[0], step):
        blk = np.abs(a[start:start + step])
        if p == 1.0:
            acc += float(np.sum(blk))
        elif p == 2.0:
            acc += float(np.sum(blk * blk))
        else:
            acc += float(np.sum(blk ** p))
    return acc


def hypot_pow_sum(a, b, p):
    a = np.ascontiguousarray(a).ravel()
    b = np.ascontiguousarray(b).ravel()
    acc = 0.0
    step = _ROWS * 4096
    for start in range(0, a.shape[0], step):
        r2 = a[start:start + step] ** 2 + b[start:start + step] ** 2
        acc += float(np.sum(r2 if p == 2.0 else r2 ** (0.5 * p)))
    return acc


def hypot_max(a, b):
    a = np.ascontiguousarray(a).ravel()
    b = np.ascontiguousarray(b).ravel()
    if a.size == 0:
        return 0.0
    return float(np.sqrt(np.max(a * a + b * b)))
