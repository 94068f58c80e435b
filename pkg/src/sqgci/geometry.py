"""Six-direction decomposition of symmetric matrices near the identity.

Directions ``Omega = {+-e1, +-(3/5, 4/5), +-(3/5, -4/5)}``.  For ``M`` close to
``I`` the coefficients ``a_k = Gamma_k(M)`` satisfy

    M = 1/2 sum_{k in Omega} a_k^2 k_perp (x) k_perp,   a_k = a_{-k},

and are given by explicit linear functionals followed by a square root.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# Representatives k1, k2, k3 of the three antipodal pairs, as exact fractions.
_REPS = (
    (Fraction(1), Fraction(0)),
    (Fraction(3, 5), Fraction(4, 5)),
    (Fraction(3, 5), Fraction(-4, 5)),
)


class PositivityViolation(ValueError):
    """A squared coefficient fell below the positivity floor."""

    def __init__(self, functional: str, value: float, floor: float):
        super().__init__(f"coefficient functional {functional} = {value:.6e} is below the floor {floor:.1e}; "
                         "the matrix lies outside the admissible ball around I")
        self.functional = functional
        self.value = value
        self.floor = floor


@dataclass(frozen=True)
class SymMatrix2:
    m11: float
    m12: float
    m22: float

    @classmethod
    def identity(cls) -> "SymMatrix2":
        return cls(1.0, 0.0, 1.0)

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m12, self.m22]], dtype=np.float64)

    def op_norm_from_identity(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.as_array() - np.eye(2)))))


def perp(k):
    return (-k[1], k[0])


@dataclass(frozen=True)
class DirectionSet:
    """The six unit directions with the admissible radius ``eps_gamma``."""

    eps_gamma: float = 0.05
    floor: float = 1e-6
    reps: tuple = field(default=_REPS, repr=False)

    @property
    def dirs(self):
        """All six directions as float pairs: k1, k2, k3, -k1, -k2, -k3."""
        out = [tuple(float(c) for c in k) for k in self.reps]
        return out + [(-a, -b) for a, b in out]

    @property
    def dirs_exact(self):
        out = list(self.reps)
        return out + [(-a, -b) for a, b in out]

    def integer_dirs(self):
        """The vectors ``5k`` as exact integer pairs."""
        return [(int(5 * a), int(5 * b)) for a, b in self.dirs_exact]

    def rep_index(self, k) -> int:
        """Index 0..2 of the antipodal pair containing ``k``."""
        for i, r in enumerate(self.reps):
            rf = (float(r[0]), float(r[1]))
            if np.allclose(k, rf, atol=1e-14) or np.allclose(k, (-rf[0], -rf[1]), atol=1e-14):
                return i
        raise ValueError(f"direction {k} is not in the direction set")

    def contains(self, k) -> bool:
        try:
            self.rep_index(k)
            return True
        except ValueError:
            return False


def squared_coefficients(m11, m12, m22):
    """The three linear functionals ``a_k^2`` (works elementwise on arrays)."""
    a1 = m22 - 9.0 / 16.0 * m11
    a2 = 25.0 / 32.0 * m11 - 25.0 / 24.0 * m12
    a3 = 25.0 / 32.0 * m11 + 25.0 / 24.0 * m12
    return a1, a2, a3


def check_positive(sq, floor: float):
    for name, v in zip(("a_k1^2", "a_k2^2", "a_k3^2"), sq):
        vmin = float(np.min(v))
        if vmin < floor:
            raise PositivityViolation(name, vmin, floor)


def gamma_coefficients(M: SymMatrix2, floor: float = 1e-6):
    """Positive coefficients ``(a1, a2, a3)`` for the representatives k1, k2, k3."""
    sq = squared_coefficients(M.m11, M.m12, M.m22)
    check_positive(sq, floor)
    return tuple(float(np.sqrt(s)) for s in sq)


def reconstruct(a1: float, a2: float, a3: float) -> SymMatrix2:
    """``1/2 sum_{k in Omega} a_k^2 k_perp (x) k_perp`` with ``a_{-k} = a_k``."""
    m = np.zeros((2, 2))
    for a, k in zip((a1, a2, a3), _REPS):
        kp = np.array(perp((float(k[0]), float(k[1]))))
        # each representative appears twice in Omega, cancelling the 1/2
        m += a * a * np.outer(kp, kp)
    return SymMatrix2(float(m[0, 0]), float(m[0, 1]), float(m[1, 1]))


def pair_separation():
    """``|k + k'|`` over all ordered non-antipodal pairs (including k = k')."""
    dirs = DirectionSet().dirs_exact
    out = []
    for k in dirs:
        for kk in dirs:
            if k[0] == -kk[0] and k[1] == -kk[1]:
                continue
            s = (k[0] + kk[0]) ** 2 + (k[1] + kk[1]) ** 2
            out.append(((k, kk), float(s) ** 0.5))
    return out
