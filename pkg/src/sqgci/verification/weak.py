"""Weak formulation, temperature variable and paraproduct norms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..scheme.state import IterateState
from ..spectral.fields import SpectralField, VectorField
from ..spectral.grid import grid_for_box
from ..spectral.littlewood_paley import RemoveMean, Shell, populated_shells, project
from ..spectral.norms import lp_norm, sobolev_sq
from ..spectral.operators import TWO_PI, grad, lam, lam_vec, partial, perp_div, perp_grad, perp_riesz
from ..spectral.products import multiply, product_box

LP_EXPONENTS = (1.0, 1.5, 2.0 - 1.0 / 8.0)


def compact_vector(v: VectorField) -> VectorField:
    n = max(c.compact().n for c in v.components)
    return v.on_grid(n) if n < v.n else v


def pairing(f, g) -> float:
    """``int f g`` over the torus for real fields (scalar or vector)."""
    if isinstance(f, VectorField):
        return sum(pairing(a, b) for a, b in zip(f.components, g.components))
    n = max(f.n, g.n)
    a, b = f.on_grid(n), g.on_grid(n)
    return float(np.sum(a.coeffs.real * b.coeffs.real + a.coeffs.imag * b.coeffs.imag))


def _product(f: SpectralField, g: SpectralField) -> SpectralField:
    box = product_box(f, g)
    if box is None:
        return SpectralField.zeros(f.grid if f.n >= g.n else g.grid)
    r = max(abs(box[0][0]), abs(box[0][1]), abs(box[1][0]), abs(box[1][1]))
    return multiply(f, g, max(grid_for_box(-r, r), f.n, g.n))


@dataclass(frozen=True)
class WeakResidual:
    velocity_side: float
    stress_side: float
    bound: float

    @property
    def difference(self) -> float:
        return abs(self.velocity_side - self.stress_side)

    @property
    def relative(self) -> float:
        scale = max(abs(self.velocity_side), abs(self.stress_side), 1e-300)
        return self.difference / scale


def weak_residual(state: IterateState, test: SpectralField, gamma: float, mean_tol: float = 1e-14) -> WeakResidual:
    """Both pairings of the weak formulation against ``test``.

    velocity side ``-<v, Lambda^gamma grad_perp phi> - <P(theta u), grad phi>``
    with ``theta = grad_perp . v`` and ``P`` removing the mean; stress side
    ``<R_ij, d_j (grad_perp phi)_i>``.  ``bound`` is
    ``||R||_{H^-4} ||grad grad_perp phi||_{H^4}``.
    """
    scale = max(np.max(np.abs(test.coeffs)), 1e-300)
    if abs(test.mean) > mean_tol * scale:
        raise ValueError("the test function must have zero mean")
    v = compact_vector(state.v)
    u = compact_vector(state.u)
    gp = perp_grad(test)
    lhs1 = -pairing(v, lam_vec(gp, gamma))
    th = perp_div(v)
    tu = VectorField(_product(th, u.x), _product(th, u.y))
    tu = project(tu, RemoveMean())
    lhs2 = -pairing(tu, grad(test))
    R = state.R
    rhs = 0.0
    for i, comp in ((1, gp.x), (2, gp.y)):
        for j in (1, 2):
            rhs += pairing(R.entry(i, j), partial(comp, j))
    r_norm = np.sqrt(sobolev_sq(R, -4.0))
    # d_j (grad_perp phi)_i has rank one with norm 4 pi^2 |j|^2 |phi_hat|
    phi_norm = np.sqrt(sobolev_sq(test, 4.0 + 2.0)) * (TWO_PI * TWO_PI)
    return WeakResidual(lhs1 + lhs2, rhs, float(r_norm * phi_norm))


def random_test(rng: np.random.Generator, n: int, radius: int) -> SpectralField:
    """Real, mean-zero trigonometric polynomial with frequencies ``|j|_inf <= radius``."""
    from ..spectral.grid import GridSpec
    c = np.zeros((n, n), np.complex128)
    k = np.fft.fftfreq(n, 1.0 / n)
    mask = (np.abs(k)[:, None] <= radius) & (np.abs(k)[None, :] <= radius)
    c[mask] = rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum())
    c[0, 0] = 0.0
    return SpectralField(GridSpec(n), c, True, enforce=True)


@dataclass(frozen=True)
class ThetaU:
    theta: SpectralField
    u: VectorField
    u_error: float
    lp: dict
    v_lp: dict


def theta_u(state: IterateState) -> ThetaU:
    """``theta = -grad_perp . v`` and ``Lambda^{-1} grad_perp theta`` compared with ``u``."""
    v = compact_vector(state.v)
    theta = -perp_div(v)
    u_rec = perp_riesz(theta)
    u = state.u.on_grid(max(state.u.n, u_rec.n))
    u_rec = u_rec.on_grid(u.n)
    err = float(max(np.max(np.abs(a.coeffs - b.coeffs)) for a, b in zip(u.components, u_rec.components)))
    lt = lam(theta, -1.0)
    lp = {p: lp_norm(lt, p) for p in LP_EXPONENTS}
    vlp = {p: lp_norm(v, p) for p in LP_EXPONENTS}
    return ThetaU(theta, u_rec, err, lp, vlp)


def paraproduct_norm(f: SpectralField, g: SpectralField, s: float, tol: float = 0.0):
    """``sum_{j, j'} ||RemoveMean(Shell(j) f Shell(j') g)||_{H^s}`` over populated shells.

    Returns the total and a table ``{(j, j'): term}``.
    """
    table = {}
    for j in populated_shells(f, tol):
        fj = project(f, Shell(j))
        for jj in populated_shells(g, tol):
            prod = _product(fj, project(g, Shell(jj)))
            table[(j, jj)] = float(np.sqrt(sobolev_sq(project(prod, RemoveMean()), s)))
    return float(sum(table.values())), table
