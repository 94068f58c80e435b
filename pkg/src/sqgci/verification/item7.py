"""Running sums of ``||(grad_perp . dv_n)(du_m)||_{H^-5}`` over increments.

``dv_n = v_n - v_{n-1}`` and ``du_n = u_n - u_{n-1}`` with ``v_{-1} = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..scheme.diagnostics import align, field_patches, lam_patch
from ..scheme.increment import IncrementRecord
from ..spectral.fields import VectorField
from ..spectral.norms import sobolev_sq
from ..spectral.operators import perp_div
from ..spectral.patch import Patch, patch_samples, product_from_samples, sample_size
from .weak import _product, compact_vector

S_ITEM7 = -5.0


def increments(states):
    """Pairs ``(dv_n, du_n)`` on compact grids."""
    out = []
    prev = None
    for s in states:
        if prev is None:
            dv, du = s.v, s.u
        else:
            n = max(s.v.n, prev.v.n)
            dv = s.v.on_grid(n) - prev.v.on_grid(n)
            du = s.u.on_grid(n) - prev.u.on_grid(n)
        out.append((compact_vector(dv), compact_vector(du)))
        prev = s
    return out


def pair_term(dv: VectorField, du: VectorField, s: float = S_ITEM7) -> float:
    th = perp_div(dv)
    prod = VectorField(_product(th, du.x), _product(th, du.y))
    return float(np.sqrt(sobolev_sq(prod, s)))


@dataclass(frozen=True)
class Item7Sums:
    off_diagonal: float
    diagonal: float
    off_steps: tuple
    diag_steps: tuple


def item7_sums(states) -> Item7Sums:
    """Both sums and their per-step increments over ``states``."""
    inc = increments(states)
    q = len(inc)
    T = [[pair_term(inc[a][0], inc[b][1]) for b in range(q)] for a in range(q)]
    off_steps = tuple(sum(T[k][m] + T[m][k] for m in range(k)) for k in range(q))
    diag_steps = tuple(T[k][k] for k in range(q))
    return Item7Sums(float(sum(off_steps)), float(sum(diag_steps)), off_steps, diag_steps)


# patch evaluation for a single step, used by the lambda sweeps ---------------

def _scalar_vector_product(a: Patch, b):
    a, b1, b2 = align(a, *b)
    P = sample_size(a.shape, b1.shape)
    sa = patch_samples(a, P)
    lo = (a.lo[0] + b1.lo[0], a.lo[1] + b1.lo[1])
    shape = (a.shape[0] + b1.shape[0] - 1, a.shape[1] + b1.shape[1] - 1)
    return tuple(product_from_samples(sa * patch_samples(x, P), lo, shape) for x in (b1, b2))


def _vector_norm_sq(groups, s: float) -> float:
    groups = [align(*g) for g in groups if not all(p.is_zero() for p in g)]
    if not groups:
        return 0.0
    boxes = [(g[0].lo, g[0].hi) for g in groups]
    overlap = any(a[0] <= d[0] and c[0] <= b[0] and a[1] <= d[1] and c[1] <= b[1]
                  for i, (a, b) in enumerate(boxes) for (c, d) in boxes[i + 1:])
    if overlap:
        acc = groups[0]
        for g in groups[1:]:
            acc = (acc[0] + g[0], acc[1] + g[1])
        groups = [acc]
    return float(sum(g[0].sobolev_sq(s) + g[1].sobolev_sq(s) for g in groups))


def step_off_diagonal(history, inc: IncrementRecord, s: float = S_ITEM7) -> float:
    """Off-diagonal increment ``sum_{n<q} T(q, n) + T(n, q)`` for a new increment.

    ``history`` lists the states ``0..q-1``; the new increment is given by
    its directional patches.
    """
    prev = increments(history)
    total = 0.0
    for dv, du in prev:
        th = Patch.from_field(perp_div(dv))
        du_p = field_patches(du)
        g1, g2 = [], []
        for d in inc.directions:
            if d.is_zero():
                continue
            w = d.velocity()
            g1.append(_scalar_vector_product(d.theta(), du_p))
            g2.append(_scalar_vector_product(th, tuple(lam_patch(p, 1.0) for p in w)))
        total += np.sqrt(_vector_norm_sq(g1, s)) + np.sqrt(_vector_norm_sq(g2, s))
    return float(total)


def step_diagonal(inc: IncrementRecord, s: float = S_ITEM7) -> float:
    """``||(grad_perp . w)(Lambda w)||_{H^s}`` from directional patches.

    Products are grouped by unordered direction pair; a pair and its
    negative are complex conjugates with equal norms.
    """
    nz = [d for d in inc.directions if not d.is_zero()]
    low, high, seen = [], [], set()
    for i, d in enumerate(nz):
        for e in nz[i:]:
            key = (d.k, e.k)
            if key in seen:
                continue
            neg = (tuple(-c for c in d.k), tuple(-c for c in e.k))
            seen.update({key, neg, neg[::-1]})
            X = _scalar_vector_product(d.theta(), tuple(lam_patch(p, 1.0) for p in e.velocity()))
            if e is not d:
                Y = _scalar_vector_product(e.theta(), tuple(lam_patch(p, 1.0) for p in d.velocity()))
                X = (X[0] + Y[0], X[1] + Y[1])
            if np.allclose(np.add(d.k, e.k), 0.0):
                low.append(X)
            else:
                high.append(X)
    tot = 0.0
    if low:
        acc = low[0]
        for g in low[1:]:
            acc = (acc[0] + g[0], acc[1] + g[1])
        tot += _vector_norm_sq([acc], s)
    tot += 2.0 * _vector_norm_sq(high, s)
    return float(np.sqrt(tot))
