"""Single-step measurements swept over lambda, with log-log slope fits.

Every quantity is measured on the step from the base state with the given
lambda.  Scaling sweeps deliberately bypass the admissibility floor on
lambda so that small values can be included.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ..geometry import DirectionSet
from ..mikado import is_even_power_of_two, lp_norms
from ..scheme.constants import constant_C, riemann_constant
from ..scheme.diagnostics import oscillation_ratio, split_norms
from ..scheme.increment import build_increment
from ..scheme.params import ConfigError, SchemeParams
from ..scheme.state import base_state
from ..spectral.norms import lp_norm, sobolev_sq
from .item7 import step_diagonal, step_off_diagonal

W_EXPONENTS = (1.0, 1.5, 2.0, np.inf)

# quantity -> (kind, target, tolerance); kind "slope" checks |slope - target| <= tol,
# "slope_max" checks slope <= target, "decreasing" checks strict decrease and
# the last value below target, "bounded" checks a finite non-increasing sequence.
CHECKS = {
    "w_L1": ("slope", 0.5 * (0.5 - 1.0), 0.05),
    "w_L1.5": ("slope", 0.5 * (0.5 - 1.0 / 1.5), 0.05),
    "w_L2": ("slope", 0.0, 0.05),
    "w_Linf": ("slope", 0.25, 0.05),
    "R_D": ("slope", -0.25, 0.10),
    "R_N": ("slope_max", 0.0, None),
    "R_O": (None, None, None),
    "oscillation_ratio": ("decreasing", 0.5, None),
    "riemann_rel_error": ("slope", -0.5, 0.15),
    "riemann_C_prime": ("bounded", None, None),
    "mikado_W_L1": ("slope", 0.5 * (0.5 - 1.0), 0.05),
    "item7_off_step": ("slope_max", -3.0, None),
    "item7_diag_ratio": ("max", 546.0, None),
}
RIEMANN_ONLY = ("riemann_rel_error", "riemann_C_prime", "mikado_W_L1")
ALL_QUANTITIES = tuple(CHECKS)


@dataclass(frozen=True)
class ScalingStudySpec:
    lambdas: tuple
    quantities: tuple = ALL_QUANTITIES

    def __post_init__(self):
        lams = tuple(int(x) for x in self.lambdas)
        if len(lams) < 2:
            raise ConfigError("a scaling study needs at least two lambda values")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ConfigError("scaling lambdas must be strictly increasing")
        for lam in lams:
            if not is_even_power_of_two(lam):
                raise ConfigError(f"scaling lambda {lam} is not an even power of two")
        unknown = set(self.quantities) - set(CHECKS)
        if unknown:
            raise ConfigError(f"unknown scaling quantities {sorted(unknown)}")
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "quantities", tuple(q for q in ALL_QUANTITIES if q in self.quantities))


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    residual: float


@dataclass
class ScalingResult:
    spec: ScalingStudySpec
    values: dict = field(default_factory=dict)  # quantity -> list aligned with spec.lambdas
    fits: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)  # quantity -> (passed, description)

    @property
    def passed(self) -> bool:
        return all(p for p, _ in self.checks.values() if p is not None)


def loglog_fit(lams, values) -> Fit:
    """Least-squares line through ``(log lam, log value)``; ``nan`` if any value is not positive."""
    x = np.log(np.asarray(lams, np.float64))
    y = np.asarray(values, np.float64)
    if y.size < 2 or not np.all(np.isfinite(y)) or np.any(y <= 0):
        return Fit(float("nan"), float("nan"), float("nan"))
    y = np.log(y)
    A = np.vstack([x, np.ones_like(x)]).T
    (m, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    r = y - (m * x + b)
    return Fit(float(m), float(b), float(np.sqrt(np.mean(r * r))))


def measure(lam: int, params: SchemeParams, quantities, C: float) -> dict:
    """All requested quantities for one lambda."""
    out = {}
    if "riemann_rel_error" in quantities or "riemann_C_prime" in quantities:
        rc = riemann_constant(lam)
        out["riemann_rel_error"] = rc.rel_error
        out["riemann_C_prime"] = abs(rc.C_prime)
    if "mikado_W_L1" in quantities:
        out["mikado_W_L1"] = lp_norms(lam, [1.0])[1.0]
    rest = [q for q in quantities if q not in RIEMANN_ONLY]
    if not rest:
        return {q: out[q] for q in quantities}
    s0 = base_state(params)
    inc = build_increment(s0, lam, C, DirectionSet(params.eps_gamma, params.positivity_floor),
                          params.positivity_floor)
    if any(q.startswith("w_") for q in rest):
        w = None if inc.is_zero() else inc.w_field(4 * lam)
        for p in W_EXPONENTS:
            out[f"w_L{'inf' if np.isinf(p) else f'{p:g}'}"] = 0.0 if w is None else lp_norm(w, p)
    if {"R_D", "R_N", "R_O"} & set(rest):
        sn = split_norms(s0, inc, params.gamma)
        out.update(R_D=sn.R_D, R_N=sn.R_N, R_O=sn.R_O)
    if "oscillation_ratio" in rest:
        out["oscillation_ratio"] = oscillation_ratio(s0, inc)
    if "item7_off_step" in rest:
        out["item7_off_step"] = step_off_diagonal([s0], inc)
    if "item7_diag_ratio" in rest:
        out["item7_diag_ratio"] = step_diagonal(inc) / float(np.sqrt(sobolev_sq(s0.R, -4.0)))
    return {q: out[q] for q in quantities}


def _check(name, lams, vals, fit):
    kind, target, tol = CHECKS[name]
    v = np.asarray(vals, np.float64)
    if kind == "slope":
        ok = bool(np.isfinite(fit.slope) and abs(fit.slope - target) <= tol)
        return ok, f"slope {fit.slope:.6g} within {tol:g} of {target:.6g}"
    if kind == "slope_max":
        ok = bool(np.isfinite(fit.slope) and fit.slope <= target)
        return ok, f"slope {fit.slope:.6g} <= {target:g}"
    if kind == "decreasing":
        ok = bool(np.all(np.isfinite(v)) and np.all(np.diff(v) < 0) and v[-1] < target)
        return ok, f"strictly decreasing and last value {v[-1]:.6g} < {target:g}"
    if kind == "bounded":
        ok = bool(np.all(np.isfinite(v)) and np.all(np.diff(v) <= 0))
        return ok, f"finite and non-increasing, max {np.max(v):.6g}"
    if kind == "max":
        ok = bool(np.all(np.isfinite(v)) and np.all(v < target))
        return ok, f"every value < {target:g}, max {np.max(v):.6g}"
    return None, "reported only"


def scaling_study(spec: ScalingStudySpec, params: SchemeParams | None = None, C: float | None = None,
                  progress=None) -> ScalingResult:
    params = params or SchemeParams()
    C = constant_C() if C is None else C
    res = ScalingResult(spec, {q: [] for q in spec.quantities})
    for lam in spec.lambdas:
        m = measure(lam, params, spec.quantities, C)
        for q in spec.quantities:
            res.values[q].append(float(m[q]))
        if progress is not None:
            progress(lam, m)
    for q in spec.quantities:
        res.fits[q] = loglog_fit(spec.lambdas, res.values[q])
        res.checks[q] = _check(q, spec.lambdas, res.values[q], res.fits[q])
    return res


def _fmt(x) -> str:
    return repr(float(x))


def write_csv(res: ScalingResult, values_path, fits_path):
    """One row per lambda and quantity, and one row per fitted quantity."""
    with open(values_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "quantity", "value"])
        for i, lam in enumerate(res.spec.lambdas):
            for q in res.spec.quantities:
                w.writerow([lam, q, _fmt(res.values[q][i])])
    with open(fits_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quantity", "slope", "intercept", "residual", "pass", "check"])
        for q in res.spec.quantities:
            f = res.fits[q]
            ok, desc = res.checks[q]
            w.writerow([q, _fmt(f.slope), _fmt(f.intercept), _fmt(f.residual), "" if ok is None else str(ok), desc])
