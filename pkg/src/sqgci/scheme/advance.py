"""One step of the iteration: new velocity, pressure and Reynolds stress."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..spectral.fields import SpectralField, SymTensorField, VectorField
from ..spectral.grid import grid_for_box
from ..spectral.operators import grad, inverse_divergence, lam_vec, partial, perp_div, tensor_div
from ..spectral.products import multiply
from .increment import IncrementRecord
from .params import BudgetError, SchemeParams
from .state import IterateState


class MeanCheckError(RuntimeError):
    """The assembled right-hand side has a nonzero mean (an assembly bug)."""


def _box_radius(f) -> int:
    if isinstance(f, (VectorField, SymTensorField)):
        return max(_box_radius(c) for c in f.components)
    b = f.support_box()
    if b is None:
        return 0
    return max(abs(b[0][0]), abs(b[0][1]), abs(b[1][0]), abs(b[1][1]))


def product_grid(*pairs) -> int:
    """Smallest grid holding every product ``f g`` for the given field pairs."""
    r = 0
    for f, g in pairs:
        r = max(r, _box_radius(f) + _box_radius(g))
    return grid_for_box(-r, r)


def nonlinear(a: VectorField, b: VectorField, out_n: int) -> VectorField:
    """``a . grad b - (grad b)^T a``: components ``sum_j a_j d_j b_i - d_i b_j a_j``."""
    comps = []
    for i in (1, 2):
        acc = None
        bi = b.components[i - 1]
        for j in (1, 2):
            aj = a.components[j - 1]
            t = multiply(aj, partial(bi, j), out_n) - multiply(partial(b.components[j - 1], i), aj, out_n)
            acc = t if acc is None else acc + t
        comps.append(acc)
    return VectorField(*comps)


def _with_mean_removed(v: VectorField) -> VectorField:
    out = []
    for c in v.components:
        cc = c.coeffs.copy()
        cc[0, 0] = 0.0
        out.append(SpectralField(c.grid, cc, c.real_flag, enforce=False))
    return VectorField(*out)


@dataclass(frozen=True)
class StepResult:
    """The new state with the stress split and assembly diagnostics."""

    state: IterateState
    R_O: SymTensorField
    R_N: SymTensorField
    R_D: SymTensorField
    rhs_mean: float
    grid: int


def step_grid(state: IterateState, lam: int, params: SchemeParams) -> int:
    """Velocity grid after the step and a check of the memory budget.

    Velocities live on ``grid_factor * lam`` points; the quadratic terms need
    twice that.  Raises :class:`BudgetError` when the product grid exceeds
    ``params.max_grid``.
    """
    n = max(params.grid_factor * lam, state.v.n)
    if 2 * n > params.max_grid:
        raise BudgetError(f"lambda = {lam} needs a {2 * n}-point product grid, above max_grid = {params.max_grid}")
    return n


def advance(state: IterateState, inc: IncrementRecord, params: SchemeParams) -> StepResult:
    """Apply the increment.

    ``v' = v + w``, ``u' = u + Lambda w``, ``p' = p + p~`` and
    ``R' = R_O + R_N + R_D`` with

    * ``R_O = R + R(Lambda w . grad w - (grad w)^T Lambda w + grad p~)``,
    * ``R_N = R(Lambda w . grad v - (grad v)^T Lambda w + u . grad w - (grad w)^T u)``,
    * ``R_D = R(Lambda^gamma w)``,

    where ``R(.)`` is the inverse divergence.  The mean of the assembled
    right-hand side is checked before inversion.
    """
    lam = inc.lam
    n = step_grid(state, lam, params)
    w = inc.w_field(n)
    lw = lam_vec(w, 1.0)
    u = state.u.on_grid(n)
    v = state.v.on_grid(n)
    out_n = max(2 * n, state.R.n)
    quad = nonlinear(lw, w, out_n)
    nash = nonlinear(lw, v, out_n) + nonlinear(u, w, out_n)
    diss = lam_vec(w, params.gamma).on_grid(out_n)
    gp = grad(inc.p_tilde).on_grid(out_n)
    rhs = quad + nash + diss + gp
    mean = max(abs(rhs.x.mean), abs(rhs.y.mean))
    tol = params.tolerances["rhs_mean"]
    if mean > tol:
        raise MeanCheckError(f"right-hand side mean {mean:.3e} exceeds {tol:.1e}")
    inv = lambda f: inverse_divergence(_with_mean_removed(f))
    R = state.R.on_grid(out_n)
    R_O = R + inv(quad + gp)
    R_N = inv(nash)
    R_D = inv(diss)
    new = IterateState(
        state.q + 1,
        lam,
        state.u.on_grid(n) + lw,
        v + w,
        state.p.on_grid(max(state.p.n, inc.p_tilde.n)) + inc.p_tilde,
        R_O + R_N + R_D,
    )
    return StepResult(new, R_O, R_N, R_D, float(mean), n)


def projected_residual(state: IterateState, gamma: float):
    """``grad_perp . div R - grad_perp . (u . grad v - (grad v)^T u + Lambda^gamma v)``.

    Returns ``(max_abs, relative)`` over the coefficients, the relative value
    being normalised by the larger of the two sides.
    """
    n = max(product_grid((state.u, state.v)), state.R.n, state.v.n)
    u, v = state.u.on_grid(state.v.n), state.v
    lhs = perp_div(tensor_div(state.R)).on_grid(n)
    rhs = perp_div(nonlinear(u, v, n) + lam_vec(v, gamma).on_grid(n))
    diff = np.max(np.abs(lhs.coeffs - rhs.coeffs))
    scale = max(np.max(np.abs(lhs.coeffs)), np.max(np.abs(rhs.coeffs)), 1e-300)
    return float(diff), float(diff / scale)
