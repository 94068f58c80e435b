"""Intermittent Mikado flows built by direct Fourier synthesis.

For ``lam = 4**m`` and a direction ``k`` the scalar profile is

    rho(x) = sum_n lam^{-1/4} phi_hat(n / sqrt(lam)) exp(2 pi i sqrt(lam) 5 n k.x)

and the flow is ``W = rho k_perp``.  All frequencies are integer multiples of
the step ``m = 5 sqrt(lam) k``, so the profile is a one-dimensional function
``g(s)`` of ``s = m.x``; :class:`LineField` stores its coefficients ``c_n``.
Because ``x -> m.x`` maps the torus onto the circle measure-preservingly,
Lebesgue norms of ``rho`` are those of ``g`` on ``[0, 1)``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft as sfft
from scipy.signal import fftconvolve

from . import _kernels as K
from .geometry import DirectionSet, perp
from .spectral.fields import SpectralField, VectorField
from .spectral.grid import GridSpec
from .spectral.products import AliasError

TRUNCATION = 1e-14
# Largest argument at which |phi_hat| is scanned for the truncation threshold.
XI_SCAN = 400.0


def _bump_sine(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) < 0.5
    xi = x[inside]
    out[inside] = np.sin(2.0 * np.pi * xi) * np.exp(-1.0 / (1.0 - 4.0 * xi * xi))
    return out


@dataclass(frozen=True)
class MikadoProfile:
    """Odd profile ``phi(x) = c sin(2 pi x) exp(-1/(1 - 4x^2))`` on ``|x| < 1/2``.

    ``phi_hat`` is evaluated by the trapezoid rule on ``nodes + 1`` equispaced
    points of ``[0, 1/2]``; the rule is spectrally accurate because ``phi``
    is smooth and vanishes to infinite order at the endpoints.
    """

    nodes: int = 4096
    _x: np.ndarray = field(init=False, repr=False, compare=False)
    _phi: np.ndarray = field(init=False, repr=False, compare=False)
    c: float = field(init=False)

    def __post_init__(self):
        x = np.linspace(0.0, 0.5, self.nodes + 1)
        raw = _bump_sine(x)
        h = 0.5 / self.nodes
        # phi^2 is even: int over (-1/2, 1/2) is twice the half-line integral
        sq = 2.0 * h * K.abs_pow_sum(np.ascontiguousarray(raw), 2.0)
        c = 1.0 / np.sqrt(sq)
        object.__setattr__(self, "_x", x)
        object.__setattr__(self, "_phi", np.ascontiguousarray(c * raw))
        object.__setattr__(self, "c", float(c))

    def phi(self, x):
        return self.c * _bump_sine(x)

    @property
    def l2_norm(self) -> float:
        h = 0.5 / self.nodes
        return float(np.sqrt(2.0 * h * K.abs_pow_sum(self._phi, 2.0)))

    def phi_hat_imag(self, xi) -> np.ndarray:
        """Imaginary part of ``phi_hat(xi)`` (the real part vanishes by oddness)."""
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        h = 0.5 / self.nodes
        return -2.0 * K.phi_hat_sine(self._x, self._phi, np.ascontiguousarray(xi.ravel()), h).reshape(xi.shape)

    def phi_hat(self, xi) -> np.ndarray:
        return 1j * self.phi_hat_imag(xi)

    @property
    def identity(self) -> str:
        """Hash of the profile samples, recorded in reports."""
        return hashlib.sha256(self._phi.tobytes()).hexdigest()[:16]

    def lp_norm(self, p: float) -> float:
        if np.isinf(p):
            xs = np.linspace(0.0, 0.5, 200001)
            return float(np.max(np.abs(self.phi(xs))))
        h = 0.5 / self.nodes
        return float((2.0 * h * K.abs_pow_sum(self._phi, float(p))) ** (1.0 / p))


@lru_cache(maxsize=1)
def default_profile() -> MikadoProfile:
    return MikadoProfile()


@lru_cache(maxsize=16)
def lattice_phi_hat(sqrt_lam: int, nodes: int = 4096) -> np.ndarray:
    """``Im phi_hat(n / sqrt_lam)`` for ``n = 0 .. floor(XI_SCAN * sqrt_lam)``."""
    prof = default_profile() if nodes == 4096 else MikadoProfile(nodes)
    n = np.arange(0, int(XI_SCAN * sqrt_lam) + 1, dtype=np.float64)
    vals = prof.phi_hat_imag(n / sqrt_lam)
    vals[0] = 0.0
    vals.setflags(write=False)
    return vals


def is_even_power_of_two(lam) -> bool:
    lam = int(lam)
    return lam > 0 and (lam & (lam - 1)) == 0 and (lam.bit_length() - 1) % 2 == 0


@dataclass(frozen=True)
class LineField:
    """``sum_{|n| <= n_max} coeffs[n + n_max] exp(2 pi i n step.x)``."""

    step: tuple
    coeffs: np.ndarray

    @property
    def n_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    def coefficient(self, n: int) -> complex:
        i = n + self.n_max
        return complex(self.coeffs[i]) if 0 <= i < self.coeffs.size else 0j

    def harmonics(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def frequencies(self) -> np.ndarray:
        """Integer frequency vectors, shape ``(2 n_max + 1, 2)``."""
        n = self.harmonics()
        return np.stack([n * self.step[0], n * self.step[1]], axis=1)

    def reoriented(self, step) -> "LineField":
        """Same function written with step ``step`` (equal to ``+-self.step``)."""
        step = tuple(int(s) for s in step)
        if step == tuple(self.step):
            return self
        if step == (-self.step[0], -self.step[1]):
            return LineField(step, self.coeffs[::-1].copy())
        raise ValueError(f"step {step} is not parallel to {self.step}")

    def scale(self, a) -> "LineField":
        return LineField(self.step, self.coeffs * a)

    def square(self) -> "LineField":
        """Exact coefficients of the pointwise square."""
        c = fftconvolve(self.coeffs, self.coeffs)
        return LineField(self.step, c)

    def samples_1d(self, N: int | None = None) -> np.ndarray:
        """``g(s)`` at ``s = i / N``; ``N`` defaults to a power of two above ``8 n_max``."""
        if N is None:
            N = 64
            while N < 8 * (self.n_max + 1):
                N *= 2
        if N <= 2 * self.n_max:
            raise ValueError("sampling grid too coarse for the line field")
        F = np.zeros(N, np.complex128)
        n = self.harmonics()
        F[n % N] = self.coeffs
        return sfft.ifft(F) * N

    def lp_norm(self, p: float, N: int | None = None) -> float:
        g = self.samples_1d(N)
        a = np.ascontiguousarray(np.abs(g))
        if np.isinf(p):
            return float(a.max())
        return float((K.abs_pow_sum(a, float(p)) / a.size) ** (1.0 / p))

    def fits(self, n: int) -> bool:
        h = n // 2
        top = self.n_max * max(abs(self.step[0]), abs(self.step[1]))
        return top < h

    def to_field(self, n: int, real_flag: bool = True) -> SpectralField:
        """Dense field on an ``n``-grid; raises if the support does not fit."""
        nz = np.nonzero(self.coeffs)[0]
        used = 0 if nz.size == 0 else int(np.max(np.abs(nz - self.n_max)))
        top = used * max(abs(self.step[0]), abs(self.step[1]))
        if top >= n // 2:
            raise AliasError(f"line field reaches frequency {top}, beyond grid n={n}")
        c = np.zeros((n, n), np.complex128)
        hs = self.harmonics()
        sel = np.abs(hs) <= used
        f = self.frequencies()[sel]
        np.add.at(c, (f[:, 0] % n, f[:, 1] % n), self.coeffs[sel])
        return SpectralField(GridSpec(n), c, real_flag, enforce=False)


@dataclass(frozen=True)
class MikadoField:
    lam: int
    k: tuple
    rho: LineField
    kperp: tuple

    @property
    def field_lines(self):
        """Components of ``W = rho k_perp`` as line fields."""
        return self.rho.scale(self.kperp[0]), self.rho.scale(self.kperp[1])

    def field_dense(self, n: int) -> VectorField:
        a, b = self.field_lines
        return VectorField(a.to_field(n), b.to_field(n))

    def rho_dense(self, n: int) -> SpectralField:
        return self.rho.to_field(n)


def rho_coefficients(lam: int, sign: int = 1):
    """Truncated coefficients ``c_n`` along the step ``sign * 5 sqrt(lam) k``."""
    s = int(round(np.sqrt(lam)))
    vals = lattice_phi_hat(s)
    keep = np.nonzero(np.abs(vals) > TRUNCATION)[0]
    n_max = int(keep.max()) if keep.size else 0
    pos = np.where(np.abs(vals[: n_max + 1]) > TRUNCATION, vals[: n_max + 1], 0.0)
    pos = 1j * pos * lam ** -0.25
    full = np.zeros(2 * n_max + 1, np.complex128)
    full[n_max:] = pos
    full[:n_max + 1] = -pos[::-1]  # phi_hat is odd
    full[n_max] = 0.0
    return full


def mikado_field(profile: MikadoProfile | None, lam: int, k, directions: DirectionSet | None = None) -> MikadoField:
    """Synthesise ``rho`` and ``W`` for ``lam = 4**m`` (``m >= 3``) and ``k`` in the direction set."""
    if profile is not None and profile != default_profile():
        raise ValueError("only the default profile has cached lattice values")
    lam_i = int(lam)
    if lam_i != lam or not is_even_power_of_two(lam_i) or lam_i < 64:
        raise ValueError(f"lambda must be an even power of two >= 2^6, got {lam}")
    ds = directions or DirectionSet()
    if not ds.contains(k):
        raise ValueError(f"direction {k} is not in the direction set")
    s = int(round(np.sqrt(lam_i)))
    k5 = (int(round(5 * k[0])), int(round(5 * k[1])))
    step = (s * k5[0], s * k5[1])
    rho = LineField(step, rho_coefficients(lam_i))
    kf = (k5[0] / 5.0, k5[1] / 5.0)
    return MikadoField(lam_i, kf, rho, perp(kf))


def check_items(mf: MikadoField, ds: DirectionSet | None = None) -> dict:
    """Measured residuals of the Mikado-flow properties for one field.

    Keys: ``div`` and ``div_tensor`` (relative coefficient residuals),
    ``parallel`` (component along ``k``), ``second_moment`` (max entry error
    of the mean of ``W (x) W`` against ``k_perp (x) k_perp``), ``mean``,
    ``periodic`` (0 when the step is a multiple of ``sqrt(lam)``), and
    ``antipodal_rho``, ``antipodal_W`` (coefficient mismatches with ``-k``).
    """
    ds = ds or DirectionSet()
    rho, kp, k = mf.rho, mf.kperp, mf.k
    freqs = rho.frequencies().astype(np.float64)
    two_pi = 2.0 * np.pi
    amp = two_pi * np.hypot(freqs[:, 0], freqs[:, 1]) * np.abs(rho.coeffs)
    scale = max(float(amp.max()), 1e-300)
    dotp = freqs[:, 0] * kp[0] + freqs[:, 1] * kp[1]
    div_res = float(np.max(np.abs(two_pi * dotp * rho.coeffs))) / scale
    sq = rho.square()
    fsq = sq.frequencies().astype(np.float64)
    dsq = fsq[:, 0] * kp[0] + fsq[:, 1] * kp[1]
    amp_sq = max(float(np.max(two_pi * np.hypot(fsq[:, 0], fsq[:, 1]) * np.abs(sq.coeffs))), 1e-300)
    div_t = float(np.max(np.abs(two_pi * dsq * sq.coeffs))) / amp_sq
    parallel = abs(kp[0] * k[0] + kp[1] * k[1])
    m2 = float(np.sum(np.abs(rho.coeffs) ** 2))
    target = np.outer(kp, kp)
    second = float(np.max(np.abs(m2 * target - target)))
    mean = abs(rho.coefficient(0))
    s = int(round(np.sqrt(mf.lam)))
    periodic = float((rho.step[0] % s) + (rho.step[1] % s))
    neg = mikado_field(None, mf.lam, (-k[0], -k[1]), ds)
    neg_rho = neg.rho.reoriented(rho.step)
    anti_rho = float(np.max(np.abs(neg_rho.coeffs + rho.coeffs)))
    w_pos = [rho.coeffs * kp[0], rho.coeffs * kp[1]]
    w_neg = [neg_rho.coeffs * neg.kperp[0], neg_rho.coeffs * neg.kperp[1]]
    anti_w = float(max(np.max(np.abs(a - b)) for a, b in zip(w_pos, w_neg)))
    return {
        "div": div_res,
        "div_tensor": div_t,
        "parallel": float(parallel),
        "second_moment": second,
        "mean": float(mean),
        "periodic": periodic,
        "antipodal_rho": anti_rho,
        "antipodal_W": anti_w,
    }


def lp_norms(lam: int, ps, k=(1.0, 0.0)) -> dict:
    """``||W||_{L^p}`` for each ``p`` (computed on the one-dimensional profile)."""
    mf = mikado_field(None, lam, k)
    return {p: mf.rho.lp_norm(p) for p in ps}


def predicted_lp(lam: int, p: float, profile: MikadoProfile | None = None) -> float:
    """Exact value ``lam^{(1/2)(1/2 - 1/p)} ||phi||_p`` implied by the rescaling."""
    profile = profile or default_profile()
    e = 0.5 * (0.5 - (0.0 if np.isinf(p) else 1.0 / p))
    return lam ** e * profile.lp_norm(p)
