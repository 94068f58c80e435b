"""Ordered record of iterates and increments with a provenance hash chain.

A trace is persisted as one ``.npz`` file holding every coefficient array
plus a JSON sidecar with metadata and hashes.  Fields are stored on their
smallest enclosing grid together with the grid they belong to.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geometry import DirectionSet
from ..mikado import default_profile
from ..scheme.advance import StepResult, advance, step_grid
from ..scheme.constants import choose_lambda, constant_C
from ..scheme.increment import DirectionalIncrement, IncrementRecord, build_increment
from ..scheme.params import SchemeParams
from ..scheme.state import IterateState, base_state
from ..spectral.fields import SpectralField, SymTensorField, VectorField
from ..spectral.grid import GridSpec
from ..spectral.patch import Patch

TRACE_FORMAT = 1


def _update(h, arr: np.ndarray):
    a = np.ascontiguousarray(arr)
    h.update(str(a.shape).encode())
    h.update(a.tobytes())


def _field_hash(h, f: SpectralField):
    c = f.compact()
    h.update(str(f.n).encode())
    _update(h, c.coeffs)


def state_hash(s: IterateState) -> str:
    h = hashlib.sha256()
    h.update(f"{s.q}:{s.lam}".encode())
    for f in (*s.u.components, *s.v.components, s.p, *s.R.components):
        _field_hash(h, f)
    return h.hexdigest()


def increment_hash(inc: IncrementRecord) -> str:
    h = hashlib.sha256()
    h.update(f"{inc.lam}:{inc.C_value!r}:{inc.passband!r}".encode())
    for d in inc.directions:
        h.update(repr(d.k).encode())
        h.update(repr(d.potential.lo).encode())
        _update(h, d.potential.data)
        _field_hash(h, d.a)
    for f in (*inc.a_sq, inc.p_tilde):
        _field_hash(h, f)
    return h.hexdigest()


def params_dict(p: SchemeParams) -> dict:
    d = dataclasses.asdict(p)
    d["lambda_policy"] = p.lambda_policy if isinstance(p.lambda_policy, str) else list(p.lambda_policy)
    d["tolerances"] = dict(sorted(p.tolerances.items()))
    return d


def params_from_dict(d: dict) -> SchemeParams:
    d = dict(d)
    if not isinstance(d["lambda_policy"], str):
        d["lambda_policy"] = tuple(d["lambda_policy"])
    return SchemeParams(**d)


def chain(params: SchemeParams, states, increments) -> list:
    """Hashes ``h_0 .. h_q`` with ``h_{i+1} = H(h_i, increment_i, state_{i+1})``."""
    h0 = hashlib.sha256(json.dumps(params_dict(params), sort_keys=True).encode() + state_hash(states[0]).encode())
    out = [h0.hexdigest()]
    for inc, s in zip(increments, states[1:]):
        out.append(hashlib.sha256((out[-1] + increment_hash(inc) + state_hash(s)).encode()).hexdigest())
    return out


@dataclass
class Trace:
    """States ``0..q``, the increments between them and the parameters."""

    params: SchemeParams
    states: list = field(default_factory=list)
    increments: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    hashes: list = field(default_factory=list)

    @property
    def q(self) -> int:
        return len(self.states) - 1

    @property
    def lambdas(self) -> list:
        return [s.lam for s in self.states[1:]]

    def append(self, inc: IncrementRecord, step: StepResult):
        if step.state.q != self.states[-1].q + 1:
            raise ValueError("trace steps must be consecutive")
        self.increments.append(inc)
        self.steps.append(step)
        self.states.append(step.state)
        self.hashes.append(hashlib.sha256((self.hashes[-1] + increment_hash(inc)
                                           + state_hash(step.state)).encode()).hexdigest())

    def verify_chain(self) -> bool:
        return chain(self.params, self.states, self.increments) == self.hashes


def start_trace(params: SchemeParams) -> Trace:
    s0 = base_state(params)
    return Trace(params, [s0], [], [], chain(params, [s0], []))


def run_trace(params: SchemeParams, q_max: int, C: float | None = None) -> Trace:
    """Base state followed by ``q_max`` steps."""
    C = constant_C() if C is None else C
    tr = start_trace(params)
    ds = DirectionSet(params.eps_gamma, params.positivity_floor)
    for _ in range(q_max):
        s = tr.states[-1]
        lam = choose_lambda(s, params, C)
        step_grid(s, lam, params)  # fail on the budget before building anything
        inc = build_increment(s, lam, C, ds, params.positivity_floor)
        tr.append(inc, advance(s, inc, params))
    return tr


# persistence ---------------------------------------------------------------

def _put_field(arrays: dict, key: str, f: SpectralField) -> dict:
    c = f.compact()
    arrays[key] = c.coeffs
    return {"n": f.n, "stored_n": c.n, "real": f.real_flag}


def _get_field(arrays, key: str, meta: dict) -> SpectralField:
    f = SpectralField(GridSpec(meta["stored_n"]), arrays[key], meta["real"], enforce=False)
    return f.on_grid(meta["n"])


_STATE_KEYS = ("u1", "u2", "v1", "v2", "p", "R11", "R12", "R22")


def save_trace(tr: Trace, stem) -> tuple:
    """Write ``stem.npz`` and ``stem.json``; returns both paths."""
    stem = Path(stem)
    arrays, meta_states, meta_incs = {}, [], []
    for i, s in enumerate(tr.states):
        fields = (*s.u.components, *s.v.components, s.p, *s.R.components)
        meta_states.append({"q": s.q, "lam": s.lam,
                            "fields": {k: _put_field(arrays, f"s{i}_{k}", f) for k, f in zip(_STATE_KEYS, fields)}})
    for i, inc in enumerate(tr.increments):
        dirs = []
        for j, d in enumerate(inc.directions):
            arrays[f"i{i}_d{j}_phi"] = d.potential.data
            dirs.append({"k": list(d.k), "lo": list(d.potential.lo), "a": _put_field(arrays, f"i{i}_d{j}_a", d.a)})
        meta_incs.append({
            "lam": inc.lam, "C": inc.C_value, "passband": inc.passband, "amplitude_grid": inc.amplitude_grid,
            "directions": dirs,
            "a_sq": [_put_field(arrays, f"i{i}_asq{j}", f) for j, f in enumerate(inc.a_sq)],
            "p_tilde": _put_field(arrays, f"i{i}_pt", inc.p_tilde),
            "step": {"rhs_mean": tr.steps[i].rhs_mean, "grid": tr.steps[i].grid} if i < len(tr.steps) else None,
        })
    npz = stem.with_suffix(".npz")
    with open(npz, "wb") as fh:
        np.savez(fh, **arrays)
    meta = {"format": TRACE_FORMAT, "params": params_dict(tr.params), "states": meta_states,
            "increments": meta_incs, "hashes": tr.hashes, "profile": default_profile().identity}
    js = stem.with_suffix(".json")
    js.write_text(json.dumps(meta, indent=1, sort_keys=True))
    return npz, js


def load_trace(stem) -> Trace:
    """Read a trace written by :func:`save_trace`.

    The stress split of each step is not stored; the step records carry
    only the right-hand side mean and the grid.
    """
    stem = Path(stem)
    meta = json.loads(stem.with_suffix(".json").read_text())
    if meta.get("format") != TRACE_FORMAT:
        raise ValueError(f"unsupported trace format {meta.get('format')}")
    params = params_from_dict(meta["params"])
    with np.load(stem.with_suffix(".npz")) as arrays:
        states = []
        for i, ms in enumerate(meta["states"]):
            f = {k: _get_field(arrays, f"s{i}_{k}", ms["fields"][k]) for k in _STATE_KEYS}
            states.append(IterateState(ms["q"], ms["lam"], VectorField(f["u1"], f["u2"]), VectorField(f["v1"], f["v2"]),
                                       f["p"], SymTensorField(f["R11"], f["R12"], f["R22"])))
        incs, steps = [], []
        for i, mi in enumerate(meta["increments"]):
            dirs = tuple(
                DirectionalIncrement(tuple(d["k"]), _get_field(arrays, f"i{i}_d{j}_a", d["a"]),
                                     Patch(tuple(d["lo"]), arrays[f"i{i}_d{j}_phi"]))
                for j, d in enumerate(mi["directions"]))
            a_sq = tuple(_get_field(arrays, f"i{i}_asq{j}", m) for j, m in enumerate(mi["a_sq"]))
            incs.append(IncrementRecord(mi["lam"], mi["C"], dirs, a_sq, _get_field(arrays, f"i{i}_pt", mi["p_tilde"]),
                                        mi["passband"], mi["amplitude_grid"]))
            if mi["step"] is not None:
                steps.append(StepResult(states[i + 1], None, None, None, mi["step"]["rhs_mean"], mi["step"]["grid"]))
    return Trace(params, states, incs, steps, meta["hashes"])
