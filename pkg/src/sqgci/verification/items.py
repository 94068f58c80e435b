"""Checks of the inductive items (1)-(7) and step diagnostics over a trace."""
from __future__ import annotations

import numpy as np

from .. import __version__
from .._kernels import BACKEND
from ..mikado import default_profile
from ..scheme.advance import projected_residual
from ..scheme.constants import riemann_constant
from ..scheme.diagnostics import cross_term_separation, oscillation_ratio, split_norms
from ..spectral.grid import grid_for_box
from ..spectral.littlewood_paley import Shell, populated_shells, project
from ..spectral.norms import l2_coeff_norm, lp_norm, sobolev_sq
from ..spectral.operators import div, lam_vec
from .item7 import item7_sums
from .report import VerificationReport
from .trace import Trace
from .weak import LP_EXPONENTS, compact_vector, random_test, theta_u, weak_residual

# Constant in the bound of the diagonal item (7) step by ||R_q||_{H^-4}.
DIAGONAL_CONSTANT = 546.0
# Threshold for the per-step constants of item (4), ||v_q - v_{q-1}||_{L^p} 2^q.
ITEM4_CONSTANT = 1.0
CROSS_SEPARATION = 5.0 / 8.0 - 1.0 / 4.0
SHELL_MASS_REL = 1e-12


def _max_abs(*fields) -> float:
    return float(max(np.max(np.abs(f.coeffs)) for f in fields))


def _tensor_norm(R, s=-4.0) -> float:
    return float(np.sqrt(sobolev_sq(R, s)))


def _support_radius(*fields) -> int:
    r = 0
    for f in fields:
        b = f.support_box()
        if b is not None:
            r = max(r, abs(b[0][0]), abs(b[0][1]), abs(b[1][0]), abs(b[1][1]))
    return r


def unique_shell(dv):
    """Shells ``j`` with ``Shell(j) dv = dv`` up to ``SHELL_MASS_REL`` of the coefficient mass."""
    total = l2_coeff_norm(dv)
    if total == 0.0:
        return []
    out = []
    for j in populated_shells(dv):
        rest = dv - project(dv, Shell(j))
        if l2_coeff_norm(rest) <= SHELL_MASS_REL * total:
            out.append(j)
    return out


def _state_items(rep: VerificationReport, tr: Trace, q: int, strict: bool):
    p = tr.params
    tol = p.tolerances
    s = tr.states[q]
    u, v = compact_vector(s.u), compact_vector(s.v)
    tag = f"q{q}"
    m = max(abs(c.mean) for c in (*u.components, *v.components))
    rep.add(f"item1.{tag}.mean", m, tol["mean"], m <= tol["mean"], tol["mean"], "max |mean| of u, v components")
    d = max(_max_abs(div(u)), _max_abs(div(v)))
    rep.add(f"item1.{tag}.divergence", d, tol["divergence"], d <= tol["divergence"], tol["divergence"],
            "max |coefficient| of div u, div v")
    lv = lam_vec(v, 1.0)
    e = max(_max_abs(a - b) for a, b in zip(u.components, lv.components)) / max(_max_abs(*u.components), 1e-300)
    rep.add(f"item1.{tag}.u_equals_lambda_v", e, tol["mean"], e <= tol["mean"], tol["mean"],
            "max |u - Lambda v| / max |u| over coefficients")
    thr = tol["base_residual"] if q == 0 else tol["residual_rel"]
    absr, rel = projected_residual(s, p.gamma)
    meas = absr if q == 0 else rel
    rep.add(f"item2.{tag}.residual", meas, thr, meas <= thr, thr,
            "grad_perp . (div R - u.grad v + (grad v)^T u - Lambda^gamma v), "
            + ("max |coefficient|" if q == 0 else "max |coefficient| relative to the larger side"))
    rn = _tensor_norm(s.R)
    if q == 0 or strict:
        rep.add(f"item3.{tag}.norm", rn, 2.0 ** -q, rn < 2.0 ** -q, None, "||R_q||_{H^-4} < 2^-q")
    else:
        prev = _tensor_norm(tr.states[q - 1].R)
        ratio = rn / prev if prev > 0 else float("inf")
        rep.add(f"item3.{tag}.ratio", ratio, 1.0, ratio < 1.0, None, "||R_q||_{H^-4} / ||R_{q-1}||_{H^-4} < 1")
    if q == 0:
        dv = v
    else:
        n = max(s.v.n, tr.states[q - 1].v.n)
        dv = compact_vector(s.v.on_grid(n) - tr.states[q - 1].v.on_grid(n))
    for pp in LP_EXPONENTS:
        k = lp_norm(dv, pp) * 2.0 ** q
        rep.add(f"item4.{tag}.p{pp:g}", k, ITEM4_CONSTANT, k <= ITEM4_CONSTANT, None,
                f"||v_q - v_(q-1)||_L^{pp:g} * 2^q")
    l1 = lp_norm(v, 1.0)
    floor = (1.0 + 2.0 ** -q) * p.delta
    rep.add(f"item5.{tag}", l1, floor, l1 > floor, None, "||v_q||_L1 > (1 + 2^-q) delta, delta = A / (2 pi)")
    shells = unique_shell(dv)
    meas = shells[0] if len(shells) == 1 else shells
    rep.add(f"item6.{tag}", meas, "exactly one shell", len(shells) == 1, SHELL_MASS_REL,
            "shells j with Shell(j)(v_q - v_(q-1)) = v_q - v_(q-1), mass outside relative")
    if q >= 1:
        rep.note(f"item6.{tag}.expected_shell", int(round(np.log2(s.lam))), "log2 lambda_q")


def _step_diagnostics(rep: VerificationReport, tr: Trace, q: int, strict: bool):
    p = tr.params
    tol = p.tolerances
    inc = tr.increments[q - 1]
    prev = tr.states[q - 1]
    tag = f"q{q}"
    lam = inc.lam
    rep.note(f"step.{tag}.lambda", lam, "lambda_q")
    rep.note(f"step.{tag}.passband_fraction", inc.passband, "share of sum |c_n|^2 kept by the low-pass")
    outside = 0.0
    for w1, w2 in inc.velocity_patches():
        j1, j2 = w1.freqs()
        r = np.sqrt((j1 * j1 + j2 * j2).astype(np.float64))
        out = (r < 9.0 / 8.0 * lam) | (r > 11.0 / 8.0 * lam)
        if np.any(out):
            outside = max(outside, float(np.max(np.abs(w1.data[out]))), float(np.max(np.abs(w2.data[out]))))
    rep.note(f"step.{tag}.annulus_outside", outside, "max |w_hat| outside 9/8 lam <= |xi| <= 11/8 lam",
             tol["annulus"], outside <= tol["annulus"], tol["annulus"])
    radii = inc.support_radii()
    rep.note(f"step.{tag}.support_radii", None if radii is None else [radii[0] / lam, radii[1] / lam],
             "min and max |xi| / lambda over the support of w_hat")
    n = 4 * lam
    re = inc.realness_error(n)
    rep.note(f"step.{tag}.realness", re, f"max |Im w| on a {n}-grid", tol["realness"], re <= tol["realness"],
             tol["realness"])
    if q - 1 < len(tr.steps):
        st = tr.steps[q - 1]
        rep.note(f"step.{tag}.rhs_mean", st.rhs_mean, "max |mean| of the stress right-hand side", tol["rhs_mean"],
                 st.rhs_mean <= tol["rhs_mean"], tol["rhs_mean"])
    sn = split_norms(prev, inc, p.gamma)
    small = 2.0 ** (-2 * (q - 1) - 100)
    for name, val in (("R_O", sn.R_O), ("R_N", sn.R_N), ("R_D", sn.R_D)):
        if strict and name != "R_O":
            rep.note(f"step.{tag}.{name}", val, f"||{name}||_H^-4 < 2^(-2q-100)", small, val < small)
        else:
            rep.note(f"step.{tag}.{name}", val, f"||{name}||_H^-4")
    ratio = oscillation_ratio(prev, inc)
    rep.note(f"step.{tag}.oscillation_ratio", ratio, "||R_q + sum R(T_k) + p~ I||_H^-4 / ||R_q||_H^-4", 1.0,
             ratio < 1.0)
    sep = cross_term_separation(inc)
    rep.note(f"step.{tag}.cross_separation", sep, "min |xi| / lam over products of w_k, w_k' with k' != -k",
             CROSS_SEPARATION, None if sep is None else sep >= CROSS_SEPARATION)
    rc = riemann_constant(lam)
    rep.note(f"step.{tag}.riemann_I", rc.I_value, "lattice sum I")
    rep.note(f"step.{tag}.riemann_C_prime", rc.C_prime, "lam^-1/2 (I - lam / C)")
    rep.note(f"step.{tag}.riemann_rel_error", rc.rel_error, "|I / lam - 1 / C| C")


def _weak_checks(rep: VerificationReport, tr: Trace, q: int, n_tests: int, seed: int):
    p = tr.params
    s = tr.states[q]
    rng = np.random.default_rng(seed + q)
    radius = max(4, _support_radius(*s.v.components, *s.R.components))
    n = grid_for_box(-radius, radius)
    worst, viol = 0.0, 0
    for _ in range(n_tests):
        w = weak_residual(s, random_test(rng, n, radius), p.gamma)
        worst = max(worst, w.relative)
        viol += abs(w.stress_side) > w.bound * (1.0 + 1e-12)
    thr = p.tolerances["weak_rel"]
    rep.add(f"weak.q{q}.relative", worst, thr, worst <= thr, thr,
            f"max relative gap between the two weak pairings over {n_tests} random tests")
    rep.add(f"weak.q{q}.bound", viol, 0, viol == 0, None,
            "tests with |<R, grad grad_perp phi>| > ||R||_H^-4 ||grad grad_perp phi||_H^4")


def _theta_checks(rep: VerificationReport, tr: Trace, q: int):
    t = theta_u(tr.states[q])
    scale = max(_max_abs(*tr.states[q].u.components), 1e-300)
    e = t.u_error / scale
    rep.add(f"theta.q{q}.u_error", e, 1e-12, e <= 1e-12, 1e-12, "max |Lambda^-1 grad_perp theta - u| / max |u|")
    for pp, val in t.lp.items():
        rep.note(f"theta.q{q}.lp{pp:g}", val, f"||Lambda^-1 theta||_L^{pp:g}")
    if t.v_lp[1.5] > 0:
        rep.note(f"theta.q{q}.riesz_ratio", t.lp[1.5] / t.v_lp[1.5], "||Lambda^-1 theta||_L1.5 / ||v||_L1.5")


def check_items(tr: Trace, strict: bool = False, n_tests: int = 100, seed: int = 0) -> VerificationReport:
    """Verify every state of the trace and every step between states."""
    if not tr.states:
        raise ValueError("empty trace")
    rep = VerificationReport()
    rep.add("trace.hash_chain", tr.verify_chain(), True, tr.verify_chain(), None,
            "recomputed provenance hash chain equals the stored one")
    for q in range(len(tr.states)):
        _state_items(rep, tr, q, strict)
        if q >= 1:
            _step_diagnostics(rep, tr, q, strict)
        _weak_checks(rep, tr, q, n_tests, seed)
        _theta_checks(rep, tr, q)
    it = item7_sums(tr.states)
    rep.note("item7.off_diagonal", it.off_diagonal, "sum_{n != m} ||(grad_perp . dv_n)(du_m)||_H^-5")
    rep.note("item7.diagonal", it.diagonal, "sum_n ||(grad_perp . dv_n)(du_n)||_H^-5")
    rep.note("item7.off_steps", list(it.off_steps), "per-step increments of the off-diagonal sum")
    rep.note("item7.diag_steps", list(it.diag_steps), "per-step increments of the diagonal sum")
    for q in range(1, len(tr.states)):
        rn = _tensor_norm(tr.states[q - 1].R)
        ratio = it.diag_steps[q] / rn if rn > 0 else float("inf")
        rep.add(f"item7.q{q}.diagonal_ratio", ratio, DIAGONAL_CONSTANT, ratio < DIAGONAL_CONSTANT, None,
                "||(grad_perp . w_q)(Lambda w_q)||_H^-5 / ||R_(q-1)||_H^-4")
    rep.environment = environment(tr)
    return rep


def environment(tr: Trace) -> dict:
    from .trace import params_dict
    return {
        "package_version": __version__,
        "backend": BACKEND,
        "profile_hash": default_profile().identity,
        "lambda_schedule": tr.lambdas,
        "grids": [{"q": s.q, "velocity": s.v.n, "stress": s.R.n} for s in tr.states],
        "params": params_dict(tr.params),
        "C": tr.increments[0].C_value if tr.increments else None,
    }
