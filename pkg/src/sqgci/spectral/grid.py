"""Uniform grids on the unit torus and their integer frequency lattices."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """An ``n x n`` grid on [0, 1)^2.

    Parameters
    ----------
    n : int
        Points per dimension, a power of two no smaller than 8.
    lambda_max : float, optional
        Largest frequency magnitude the grid is sized for.  Defaults to
        ``n / 4`` and must not exceed ``n / 3``.
    """

    n: int
    lambda_max: float | None = None

    def __post_init__(self):
        if not is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if self.lambda_max is None:
            object.__setattr__(self, "lambda_max", self.n / 4)
        if not 0 < self.lambda_max <= self.n / 3:
            raise ValueError(f"lambda_max={self.lambda_max} must lie in (0, n/3] for n={self.n}")

    @classmethod
    def for_lambda(cls, lam: float, factor: int = 4) -> "GridSpec":
        return cls(int(factor * lam), float(lam))

    @property
    def freqs(self) -> np.ndarray:
        """Integer frequencies in FFT order, shape (n,)."""
        return _freqs(self.n)

    def wavenumbers(self):
        """Broadcastable integer frequency arrays ``(j1[:, None], j2[None, :])``."""
        k = self.freqs
        return k[:, None], k[None, :]

    def radius_sq(self) -> np.ndarray:
        j1, j2 = self.wavenumbers()
        return (j1 * j1 + j2 * j2).astype(np.float64)

    def points(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def mesh(self):
        x = self.points()
        return np.meshgrid(x, x, indexing="ij")

    def contains(self, j1: int, j2: int) -> bool:
        h = self.n // 2
        return -h <= j1 < h and -h <= j2 < h


@lru_cache(maxsize=32)
def _freqs(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    k.setflags(write=False)
    return k


def index_of(j: int, n: int) -> int:
    """FFT-order index of integer frequency ``j`` on an ``n``-grid."""
    return int(j) % n


def grid_for_box(lo: int, hi: int, minimum: int = 8) -> int:
    """Smallest power-of-two grid whose lattice [-n/2, n/2) holds [lo, hi]."""
    n = minimum
    while not (-(n // 2) <= lo and hi < n // 2):
        n *= 2
    return n
