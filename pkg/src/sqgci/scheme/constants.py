"""The normalising constant C, its lattice-sum counterpart and the choice of lambda."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ..mikado import MikadoProfile, default_profile, is_even_power_of_two, rho_coefficients
from ..spectral.littlewood_paley import lowpass_symbol
from ..spectral.norms import lp_norm
from .params import LAMBDA_FLOOR, ConfigError, SchemeParams
from .state import IterateState

# |K(5x)| vanishes for |x| >= 1/40 and is identically 1 for |x| <= 1/80.
OUTER = 1.0 / 40.0
INNER = 1.0 / 80.0


class QuadratureError(RuntimeError):
    pass


def c_integrand(x, profile: MikadoProfile | None = None):
    """``2 pi |phi_hat(x)|^2 |x - 1/4|^3 |K(5x)|^2``."""
    profile = profile or default_profile()
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    ph = profile.phi_hat_imag(x)
    k = lowpass_symbol(5.0 * np.abs(x))
    return 2.0 * np.pi * ph * ph * np.abs(x - 0.25) ** 3 * k * k


def _integral(profile, breaks, epsrel):
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, err = quad(lambda t: float(c_integrand(t, profile)[0]), a, b, epsabs=0.0, epsrel=epsrel, limit=200)
        if not np.isfinite(val) or err > max(epsrel * abs(val), 1e-300) * 10:
            raise QuadratureError(f"quadrature on [{a}, {b}] did not converge (estimate {val}, error {err})")
        total += val
    return total


@dataclass(frozen=True)
class CValue:
    C: float
    inverse: float
    refined_inverse: float

    @property
    def refinement_rel(self) -> float:
        return abs(self.inverse - self.refined_inverse) / abs(self.inverse)


@lru_cache(maxsize=4)
def constant_C_detail(epsrel: float = 1e-10, agreement: float = 1e-8) -> CValue:
    """Adaptive quadrature of ``C^{-1} = 80 int 2 pi |phi_hat|^2 |x - 1/4|^3 |K(5x)|^2 dx``.

    A second evaluation with a finer profile quadrature and a finer split of
    the interval must agree to ``agreement`` (relative).
    """
    prof = default_profile()
    coarse = 80.0 * _integral(prof, [-OUTER, -INNER, 0.0, INNER, OUTER], epsrel)
    fine_prof = MikadoProfile(2 * prof.nodes)
    breaks = np.linspace(-OUTER, OUTER, 9)
    fine = 80.0 * _integral(fine_prof, sorted(set(breaks.tolist()) | {-INNER, INNER}), epsrel / 10)
    if not (coarse > 0 and np.isfinite(coarse)):
        raise QuadratureError(f"C^-1 evaluated to {coarse}")
    if abs(coarse - fine) > agreement * abs(coarse):
        raise QuadratureError(f"refinements disagree: {coarse} vs {fine}")
    return CValue(1.0 / coarse, coarse, fine)


def constant_C(profile: MikadoProfile | None = None) -> float:
    if profile is not None and profile != default_profile():
        raise ValueError("constant_C is tabulated for the default profile only")
    return constant_C_detail().C


@dataclass(frozen=True)
class RiemannResult:
    lam: int
    I_value: float
    C_prime: float
    rel_error: float


def riemann_constant(lam: int) -> RiemannResult:
    """Lattice sum ``I`` with step ``lam^{-1/2}`` and ``C' = lam^{-1/2} (I - lam C^{-1})``.

    ``I = 80 lam sum_n 2 pi |phi_hat(n h)|^2 |n h - 1/4|^3 |K(5 n h)|^2 h``
    with ``h = lam^{-1/2}``; ``rel_error = |I / lam - C^{-1}| C``.
    """
    if not is_even_power_of_two(lam):
        raise ValueError(f"lambda must be an even power of two, got {lam}")
    s = int(round(np.sqrt(lam)))
    h = 1.0 / s
    nmax = int(np.ceil(OUTER * s)) + 1
    n = np.arange(-nmax, nmax + 1)
    pos = default_profile().phi_hat_imag(np.arange(nmax + 1) * h)
    ph = np.concatenate([-pos[:0:-1], pos])
    x = n * h
    k = lowpass_symbol(5.0 * np.abs(x))
    terms = 2.0 * np.pi * ph * ph * np.abs(x - 0.25) ** 3 * k * k * h
    I_value = 80.0 * lam * float(np.sum(terms))
    cinv = constant_C_detail().inverse
    c_prime = (I_value - lam * cinv) / np.sqrt(lam)
    return RiemannResult(int(lam), I_value, float(c_prime), abs(I_value / lam - cinv) / cinv)


def passband_fraction(lam: int) -> float:
    """Share of the Mikado energy ``sum |c_n|^2`` kept by the low-pass at scale ``lam``.

    The profile has harmonics at ``5 sqrt(lam) n``; the low-pass keeps
    ``|xi| < lam / 8``, so only ``|n| < sqrt(lam) / 40`` survive.  The
    fraction is exactly zero for ``lam < 1600``.
    """
    c = rho_coefficients(int(lam))
    nm = (c.size - 1) // 2
    n = np.arange(-nm, nm + 1)
    k = lowpass_symbol(5.0 * np.abs(n) / np.sqrt(lam))
    tot = float(np.sum(np.abs(c) ** 2))
    return float(np.sum(np.abs(c) ** 2 * k * k)) / tot


def lambda_bound(R_inf: float, C: float, eps_gamma: float) -> float:
    return max(10.0 * C * R_inf / eps_gamma, float(LAMBDA_FLOOR))


def choose_lambda(state: IterateState, params: SchemeParams, C: float | None = None, step: int | None = None) -> int:
    """Smallest admissible ``4**m`` above the bound, or validate a fixed value."""
    C = constant_C() if C is None else C
    R_inf = lp_norm(state.R, np.inf)
    bound = lambda_bound(R_inf, C, params.eps_gamma)
    if params.lambda_policy == "auto":
        return smallest_even_power_above(bound)
    idx = state.q if step is None else step
    lams = params.lambda_policy
    if idx >= len(lams):
        raise ConfigError(f"no fixed lambda given for step {idx + 1}")
    lam = lams[idx]
    if not lam > bound:
        raise ConfigError(f"fixed lambda {lam} violates lambda > max(10 C ||R_q||_inf / eps, 128) = {bound:.6g}")
    return lam


def smallest_even_power_above(bound: float) -> int:
    lam = 1
    while not lam > bound:
        lam *= 4
    return lam
