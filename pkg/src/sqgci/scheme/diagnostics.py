"""Error-mechanism diagnostics computed from per-direction patches.

The increment's directional pieces live in disjoint windows around
``sigma k``.  Quadratic interactions, inverse divergences and homogeneous
Sobolev norms are evaluated window by window, which keeps memory
proportional to ``lam^2 / 16`` rather than to a grid resolving ``2 sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..spectral.fields import SymTensorField, VectorField
from ..spectral.operators import TWO_PI, inverse_divergence_coeffs, lam_symbol
from ..spectral.patch import Patch, patch_samples, product_from_samples, sample_size, tensor_sobolev_sq_patches
from .increment import IncrementRecord
from .state import IterateState


def align(*patches):
    """The patches re-embedded in their common bounding box."""
    zero = patches[0].scale(0)
    for p in patches[1:]:
        zero = zero + p.scale(0)
    return tuple(p + zero for p in patches)


def derivative(p: Patch, i: int) -> Patch:
    if i == 1:
        return p.map(lambda j1, j2: 1j * TWO_PI * j1)
    return p.map(lambda j1, j2: 1j * TWO_PI * j2)


def lam_patch(p: Patch, s: float) -> Patch:
    return p.map(lambda j1, j2: lam_symbol(j1, j2, s))


def field_patches(v: VectorField):
    return align(Patch.from_field(v.x), Patch.from_field(v.y))


def nonlinear_patches(a, b):
    """``a . grad b - (grad b)^T a`` for patch pairs ``a = (a1, a2)``, ``b = (b1, b2)``."""
    a = align(*a)
    b = align(*b)
    P = sample_size(a[0].shape, b[0].shape)
    sa = [patch_samples(x, P) for x in a]
    db = {(i, j): patch_samples(derivative(b[i - 1], j), P) for i in (1, 2) for j in (1, 2)}
    lo = (a[0].lo[0] + b[0].lo[0], a[0].lo[1] + b[0].lo[1])
    shape = (a[0].shape[0] + b[0].shape[0] - 1, a[0].shape[1] + b[0].shape[1] - 1)
    out = []
    for i in (1, 2):
        acc = sa[0] * (db[(i, 1)] - db[(1, i)]) + sa[1] * (db[(i, 2)] - db[(2, i)])
        out.append(product_from_samples(acc, lo, shape))
    return tuple(out)


def inverse_divergence_patches(x: Patch, y: Patch):
    x, y = align(x, y)
    j1, j2 = x.freqs()
    r11, r12, r22 = inverse_divergence_coeffs(j1, j2, x.data, y.data)
    return Patch(x.lo, r11), Patch(x.lo, r12), Patch(x.lo, r22)


def tensor_patches(R: SymTensorField):
    return align(*(Patch.from_field(c) for c in R.components))


def _boxes_disjoint(groups) -> bool:
    boxes = [(g[0].lo, g[0].hi) for g in groups]
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            (a, b), (c, d) = boxes[i], boxes[j]
            if a[0] <= d[0] and c[0] <= b[0] and a[1] <= d[1] and c[1] <= b[1]:
                return False
    return True


def tensor_norm_sq(groups, s: float = -4.0) -> float:
    """``||sum_g T_g||_{H^s}^2`` for tensor patch triples ``g``.

    Disjointly supported pieces are summed in norm squared; overlapping
    pieces are first added coefficientwise.
    """
    groups = [align(*g) for g in groups if not all(p.is_zero() for p in g)]
    if not groups:
        return 0.0
    if not _boxes_disjoint(groups):
        acc = groups[0]
        for g in groups[1:]:
            acc = tuple(a + b for a, b in zip(acc, g))
        groups = [acc]
    return float(sum(tensor_sobolev_sq_patches(*g, s) for g in groups))


def low_frequency_terms(inc: IncrementRecord):
    """``sum_k T_k`` assembled as written, returned as a real vector of patches.

    ``T_k = 1/2 (X_k + conj X_k)`` with
    ``X_k = Lambda w_k . grad w_{-k} - (grad w_k)^T Lambda w_{-k}``, so the sum
    over the direction set is ``sum_{reps} (X_k + conj X_k)``.
    """
    acc = None
    for d in inc.directions[:3]:
        if d.is_zero():
            continue
        w = d.velocity()
        lw = tuple(lam_patch(p, 1.0) for p in w)
        wm = tuple(p.conj() for p in w)
        X = nonlinear_patches(lw, wm)
        term = tuple(x + x.conj() for x in X)
        acc = term if acc is None else tuple(a + b for a, b in zip(acc, term))
    return acc


def oscillation_ratio(state: IterateState, inc: IncrementRecord, s: float = -4.0) -> float:
    """``||R_q + sum_k R(T_k) + p~ I||_{H^s} / ||R_q||_{H^s}``."""
    Rq = tensor_patches(state.R)
    p = Patch.from_field(inc.p_tilde)
    parts = [Rq, (p, p.scale(0), p)]
    T = low_frequency_terms(inc)
    if T is not None:
        parts.append(inverse_divergence_patches(*T))
    total = align(*[q for g in parts for q in g])
    n = len(total) // 3
    summed = [sum((total[3 * g + c] for g in range(1, n)), total[c]) for c in range(3)]
    num = tensor_sobolev_sq_patches(*summed, s)
    den = tensor_sobolev_sq_patches(*Rq, s)
    return float(np.sqrt(num / den))


def cross_term_separation(inc: IncrementRecord):
    """Smallest ``|xi| / lam`` over product supports of ``w_k`` and ``w_k'`` with ``k' != -k``.

    Uses the Minkowski sum of the support boxes, a superset of the true
    product support, so the value is a lower bound.  ``None`` when the
    increment vanishes.
    """
    dirs = [d for d in inc.directions if not d.is_zero()]
    best = None
    for i, d in enumerate(dirs):
        for e in dirs[i:]:
            if np.allclose(np.add(d.k, e.k), 0.0):
                continue
            a, b = d.potential, e.potential
            lo = (a.lo[0] + b.lo[0], a.lo[1] + b.lo[1])
            hi = (a.hi[0] + b.hi[0], a.hi[1] + b.hi[1])
            x = min(max(0, lo[0]), hi[0]) if lo[0] <= 0 <= hi[0] else (lo[0] if lo[0] > 0 else hi[0])
            y = min(max(0, lo[1]), hi[1]) if lo[1] <= 0 <= hi[1] else (lo[1] if lo[1] > 0 else hi[1])
            r = float(np.hypot(x, y)) / inc.lam
            best = r if best is None else min(best, r)
    return best


@dataclass(frozen=True)
class SplitNorms:
    R_O: float
    R_N: float
    R_D: float


def dissipation_norm(inc: IncrementRecord, gamma: float, s: float = -4.0) -> float:
    """``||R(Lambda^gamma w)||_{H^s}``."""
    groups = []
    for d in inc.directions:
        if d.is_zero():
            continue
        w1, w2 = d.velocity()
        groups.append(inverse_divergence_patches(lam_patch(w1, gamma), lam_patch(w2, gamma)))
    return float(np.sqrt(tensor_norm_sq(groups, s)))


def nash_norm(state: IterateState, inc: IncrementRecord, s: float = -4.0) -> float:
    """``||R(Lambda w . grad v - (grad v)^T Lambda w + u . grad w - (grad w)^T u)||_{H^s}``."""
    u = field_patches(state.u)
    v = field_patches(state.v)
    groups = []
    for d in inc.directions:
        if d.is_zero():
            continue
        w = d.velocity()
        lw = tuple(lam_patch(p, 1.0) for p in w)
        a = nonlinear_patches(lw, v)
        b = nonlinear_patches(u, w)
        groups.append(inverse_divergence_patches(a[0] + b[0], a[1] + b[1]))
    return float(np.sqrt(tensor_norm_sq(groups, s)))


def oscillation_norm(state: IterateState, inc: IncrementRecord, s: float = -4.0) -> float:
    """``||R_q + R(Lambda w . grad w - (grad w)^T Lambda w + grad p~)||_{H^s}``.

    Pairs with ``k' = -k`` and the pressure form the low-frequency part; the
    remaining pairs sit in disjoint windows around ``sigma (k + k')``, and
    pairs related by ``(k, k') -> (-k, -k')`` are complex conjugates.
    """
    dirs = inc.directions
    p = Patch.from_field(inc.p_tilde)
    gp = (derivative(p, 1), derivative(p, 2))
    low = list(gp)
    T = low_frequency_terms(inc)
    if T is not None:
        low = [low[0] + T[0], low[1] + T[1]]
    low_t = align(*tensor_patches(state.R), *inverse_divergence_patches(*low))
    low_t = tuple(low_t[c] + low_t[c + 3] for c in range(3))
    total = tensor_sobolev_sq_patches(*low_t, s)
    high = []
    nz = [d for d in dirs if not d.is_zero()]
    seen = set()
    for i, d in enumerate(nz):
        for e in nz[i:]:
            key = (d.k, e.k)
            if np.allclose(np.add(d.k, e.k), 0.0) or key in seen:
                continue
            seen.update({key, (tuple(-c for c in d.k), tuple(-c for c in e.k)),
                         (tuple(-c for c in e.k), tuple(-c for c in d.k))})
            wd, we = d.velocity(), e.velocity()
            ld = tuple(lam_patch(q, 1.0) for q in wd)
            X = nonlinear_patches(ld, we)
            if e is not d:
                le = tuple(lam_patch(q, 1.0) for q in we)
                Y = nonlinear_patches(le, wd)
                X = (X[0] + Y[0], X[1] + Y[1])
            high.append(inverse_divergence_patches(*X))
    # each computed pair stands for itself and its conjugate partner
    total += 2.0 * tensor_norm_sq(high, s)
    return float(np.sqrt(total))


def split_norms(state: IterateState, inc: IncrementRecord, gamma: float, s: float = -4.0) -> SplitNorms:
    return SplitNorms(oscillation_norm(state, inc, s), nash_norm(state, inc, s), dissipation_norm(inc, gamma, s))


def increment_sobolev(inc: IncrementRecord, s: float) -> float:
    """``||w||_{H^s}`` from the disjoint directional windows."""
    tot = 0.0
    for d in inc.directions:
        if not d.is_zero():
            w1, w2 = d.velocity()
            tot += w1.sobolev_sq(s) + w2.sobolev_sq(s)
    return float(np.sqrt(tot))
