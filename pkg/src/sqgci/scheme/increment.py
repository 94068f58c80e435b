"""The increment ``w_{q+1}`` assembled direction by direction in Fourier space.

For each ``k`` in the direction set the potential

    Phi_k = (2 pi i sigma)^{-1} LowPass_lam(a_k rho_k) exp(2 pi i sigma k.x)

is built by frequency shifting: ``(a_k rho_k)^`` is formed on the window
``|eta| < lam / 8`` (the only frequencies the low-pass keeps) as a sum of
shifted copies of ``a_k^`` weighted by the Mikado coefficients, and then
moved to the carrier ``sigma k``.  The increment is ``w_k = grad_perp Phi_k``.
Each ``Phi_k`` is stored as a :class:`Patch`, so memory scales with the
window rather than with a grid holding ``|xi| ~ 11 lam / 8``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import DirectionSet, check_positive, squared_coefficients
from ..mikado import mikado_field
from ..spectral.fields import SpectralField, SymTensorField, VectorField, hermitian_part, inverse, transform
from ..spectral.grid import GridSpec, grid_for_box
from ..spectral.littlewood_paley import lowpass_symbol
from ..spectral.norms import lp_norm
from ..spectral.operators import TWO_PI, lam_symbol
from ..spectral.patch import Patch, patch_samples, product_from_samples, sample_size
from .constants import passband_fraction
from .params import BudgetError
from .state import IterateState

# Largest grid used to resolve the square roots a_k.
MAX_AMPLITUDE_GRID = 4096
TAIL_REL = 1e-14


class BallViolation(ValueError):
    """``I + C R / lam`` left the ball where the coefficient maps are defined."""

    def __init__(self, measured: float, radius: float):
        super().__init__(f"max_x |C R(x) / lambda| = {measured:.6e} is not below eps_gamma = {radius}; "
                         "choose a larger lambda")
        self.measured = measured
        self.radius = radius


@dataclass(frozen=True)
class DirectionalIncrement:
    """One direction ``k``: its amplitude ``a_k`` and potential ``Phi_k``."""

    k: tuple
    a: SpectralField
    potential: Patch

    def velocity(self):
        """``w_k = grad_perp Phi_k = (-d2 Phi, d1 Phi)`` as two patches."""
        p = self.potential
        return (p.map(lambda j1, j2: -1j * TWO_PI * j2), p.map(lambda j1, j2: 1j * TWO_PI * j1))

    def theta(self) -> Patch:
        """``grad_perp . w_k = Laplacian Phi_k``."""
        return self.potential.map(lambda j1, j2: -(TWO_PI * TWO_PI) * (j1 * j1 + j2 * j2))

    def is_zero(self) -> bool:
        return self.potential.is_zero()


@dataclass(frozen=True)
class IncrementRecord:
    """Everything produced by one increment construction.

    ``directions`` lists the six directions in the order of
    :attr:`DirectionSet.dirs` (k1, k2, k3, -k1, -k2, -k3).  ``a_sq`` holds the
    three squared amplitudes of the representatives.
    """

    lam: int
    C_value: float
    directions: tuple
    a_sq: tuple
    p_tilde: SpectralField
    passband: float
    amplitude_grid: int = 0

    @property
    def sigma(self) -> float:
        return 1.25 * self.lam

    @property
    def per_k(self) -> dict:
        return {d.k: d for d in self.directions}

    def is_zero(self) -> bool:
        return all(d.is_zero() for d in self.directions)

    def velocity_patches(self):
        """Per-direction ``(w1, w2)`` patches (zero directions skipped)."""
        return [d.velocity() for d in self.directions if not d.is_zero()]

    def support_radii(self):
        """Smallest and largest ``|xi|`` carrying a nonzero coefficient of ``w``, or ``None``."""
        lo, hi = np.inf, 0.0
        for w1, w2 in self.velocity_patches():
            j1, j2 = w1.freqs()
            r = np.sqrt((j1 * j1 + j2 * j2).astype(np.float64))
            nz = (w1.data != 0) | (w2.data != 0)
            if np.any(nz):
                lo = min(lo, float(r[nz].min()))
                hi = max(hi, float(r[nz].max()))
        return None if hi == 0.0 else (lo, hi)

    def complex_field(self, n: int) -> VectorField:
        """Sum of the per-direction increments, without imposing realness."""
        g = GridSpec(n)
        x = SpectralField.zeros(g, real_flag=False)
        y = SpectralField.zeros(g, real_flag=False)
        for w1, w2 in self.velocity_patches():
            x = x + w1.to_field(n)
            y = y + w2.to_field(n)
        return VectorField(x, y)

    def realness_error(self, n: int) -> float:
        """Largest imaginary part of the grid samples of the summed increment."""
        v = self.complex_field(n)
        if not (np.any(v.x.coeffs) or np.any(v.y.coeffs)):
            return 0.0
        return float(max(np.max(np.abs(np.imag(inverse(c)))) for c in v.components))

    def w_field(self, n: int) -> VectorField:
        """The real increment on an ``n``-grid."""
        v = self.complex_field(n)
        return VectorField(*(SpectralField(c.grid, hermitian_part(c.coeffs), True, enforce=False)
                             for c in v.components))


def _carrier(lam: int, k) -> tuple:
    """Integer frequency ``sigma k = (lam / 4)(5 k)``."""
    q = lam // 4
    return (int(round(5 * k[0])) * q, int(round(5 * k[1])) * q)


def check_ball(R: SymTensorField, lam: int, C: float, eps_gamma: float) -> float:
    """``max_x |C R(x) / lam|`` (operator norm); raises :class:`BallViolation` if not below ``eps_gamma``."""
    m = C * lp_norm(R.on_grid(R.n), np.inf) / lam
    if not m < eps_gamma:
        raise BallViolation(m, eps_gamma)
    return m


def squared_amplitudes(R: SymTensorField, lam: int, C: float):
    """Exact coefficients of ``a_k^2 = Gamma_k(I + C R / lam)^2`` for the three representatives."""
    c = C / lam
    m11, m12, m22 = (f.scale(c) for f in R.components)
    sq = list(squared_coefficients(m11.coeffs, m12.coeffs, m22.coeffs))
    # the identity contributes (1 - 9/16, 25/32, 25/32) to the means
    for i, const in enumerate((7.0 / 16.0, 25.0 / 32.0, 25.0 / 32.0)):
        sq[i] = sq[i].copy()
        sq[i][0, 0] += const
    return tuple(SpectralField(R.grid, s, True, enforce=False) for s in sq)


def _resolved(coeffs: np.ndarray) -> bool:
    n = coeffs.shape[0]
    k = np.abs(np.fft.fftfreq(n, 1.0 / n))
    band = (k[:, None] >= n // 4) | (k[None, :] >= n // 4)
    top = np.max(np.abs(coeffs))
    return bool(np.max(np.abs(coeffs[band])) <= TAIL_REL * top)


def amplitudes(a_sq, floor: float):
    """Square roots ``a_k`` as spectral fields, resolved on an adaptive grid.

    The squares are sampled on successively finer grids until the Fourier
    coefficients of the root in the outer half of the spectrum fall below
    ``TAIL_REL`` of the largest one.  Returns the fields and the grid used.
    """
    base = max(f.compact().n for f in a_sq)
    n = max(4 * base, 64)
    while True:
        samples = [inverse(f.on_grid(n)) for f in a_sq]
        check_positive(samples, floor)
        roots = [transform(np.sqrt(s), GridSpec(n)) for s in samples]
        if all(_resolved(r.coeffs) for r in roots):
            return tuple(r.compact() for r in roots), n
        if 2 * n > MAX_AMPLITUDE_GRID:
            raise BudgetError(f"amplitude square roots are not resolved on a {n}-grid")
        n *= 2


def _window_product(a: SpectralField, rho_coeffs: np.ndarray, step, W: int) -> np.ndarray:
    """Coefficients of ``a rho`` on the box ``|eta_i| <= W``.

    ``rho = sum_n c_n exp(2 pi i n step.x)`` so ``(a rho)^(eta) = sum_n c_n a^(eta - n step)``.
    """
    out = np.zeros((2 * W + 1, 2 * W + 1), np.complex128)
    box = a.support_box()
    if box is None:
        return out
    (l1, h1), (l2, h2) = box
    blk = a.coeffs[np.ix_(np.arange(l1, h1 + 1) % a.n, np.arange(l2, h2 + 1) % a.n)]
    nmax = (rho_coeffs.size - 1) // 2
    for n in range(-nmax, nmax + 1):
        c = rho_coeffs[n + nmax]
        if c == 0:
            continue
        s1, s2 = n * step[0], n * step[1]
        # block frequencies after the shift, clipped to the window
        a1, b1 = max(l1 + s1, -W), min(h1 + s1, W)
        a2, b2 = max(l2 + s2, -W), min(h2 + s2, W)
        if a1 > b1 or a2 > b2:
            continue
        out[a1 + W:b1 + W + 1, a2 + W:b2 + W + 1] += c * blk[a1 - s1 - l1:b1 - s1 - l1 + 1, a2 - s2 - l2:b2 - s2 - l2 + 1]
    return out


def _potential(a: SpectralField, lam: int, k, directions: DirectionSet) -> Patch:
    mf = mikado_field(None, lam, k, directions)
    W = lam // 8
    win = _window_product(a, mf.rho.coeffs, mf.rho.step, W)
    eta = np.arange(-W, W + 1)
    r = np.sqrt(eta[:, None] ** 2 + eta[None, :] ** 2) / lam
    win *= lowpass_symbol(r)
    win /= 2j * np.pi * (1.25 * lam)
    c = _carrier(lam, k)
    return Patch((c[0] - W, c[1] - W), win).trimmed()


def low_frequency_pressure(dirs, lam: int, C: float, a_sq) -> SpectralField:
    """``p~ = -1/2 sum_k (Lambda^{-1} theta_k) theta_{-k} - (lam / 2C) sum_k a_k^2``.

    The sum over ``Omega`` runs over the representatives; the ``-k`` term is
    the complex conjugate of the ``k`` term.
    """
    patches = []
    for d in dirs[:3]:
        if d.is_zero():
            continue
        th = d.theta()
        f = th.map(lambda j1, j2: lam_symbol(j1, j2, -1.0))
        g = th.conj()
        P = sample_size(f.shape, g.shape)
        prod = product_from_samples(patch_samples(f, P) * patch_samples(g, P),
                                    (f.lo[0] + g.lo[0], f.lo[1] + g.lo[1]),
                                    (f.shape[0] + g.shape[0] - 1, f.shape[1] + g.shape[1] - 1))
        patches.append(prod)
    trace = a_sq[0] + a_sq[1] + a_sq[2]
    out = trace.scale(-lam / C)
    for p in patches:
        half = (p + p.conj()).scale(-0.5)
        hi = max(abs(half.lo[0]), abs(half.lo[1]), abs(half.hi[0]), abs(half.hi[1]))
        n = max(grid_for_box(-hi, hi), out.n)
        out = out.on_grid(n) + half.to_field(n, real_flag=True)
    return out


def build_increment(state: IterateState, lam: int, C: float, directions: DirectionSet | None = None,
                    floor: float = 1e-6) -> IncrementRecord:
    """Construct ``w_{q+1}`` and ``p~_{q+1}`` from ``R_q``.

    Raises
    ------
    BallViolation
        If ``I + C R_q / lam`` is not within ``eps_gamma`` of ``I`` at some grid point.
    PositivityViolation
        If a squared amplitude falls below ``floor``.
    """
    ds = directions or DirectionSet()
    lam = int(lam)
    check_ball(state.R, lam, C, ds.eps_gamma)
    a_sq = squared_amplitudes(state.R, lam, C)
    a, n_a = amplitudes(a_sq, floor)
    dirs = []
    for i, k in enumerate(ds.dirs):
        ak = a[i % 3]
        dirs.append(DirectionalIncrement(k, ak, _potential(ak, lam, k, ds)))
    dirs = tuple(dirs)
    p_tilde = low_frequency_pressure(dirs, lam, C, a_sq)
    return IncrementRecord(lam, C, dirs, a_sq, p_tilde, passband_fraction(lam), n_a)
