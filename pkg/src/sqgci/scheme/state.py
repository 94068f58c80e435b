"""Iterate container and the explicit base state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..spectral.fields import SpectralField, SymTensorField, VectorField
from ..spectral.grid import GridSpec
from .params import SchemeParams


@dataclass(frozen=True)
class IterateState:
    """``(q, lambda_q, u_q, v_q, p_q, R_q)``; ``lam`` is 0 at ``q = 0``."""

    q: int
    lam: int
    u: VectorField
    v: VectorField
    p: SpectralField
    R: SymTensorField

    @property
    def sigma(self) -> float:
        return 1.25 * self.lam


def base_state(params: SchemeParams) -> IterateState:
    """``v0 = A sin(2 pi x1) e2`` with the stress that makes it an exact solution."""
    A = params.amplitude_A
    g = params.gamma
    grid = GridSpec(8)
    zero = SpectralField.zeros(grid)
    # sin(2 pi x1) has coefficients -i/2 at (1, 0) and i/2 at (-1, 0)
    v2 = SpectralField.from_modes(grid, {(1, 0): -0.5j * A, (-1, 0): 0.5j * A})
    u2 = SpectralField.from_modes(grid, {(1, 0): -0.5j * 2 * np.pi * A, (-1, 0): 0.5j * 2 * np.pi * A})
    r11 = np.pi / 4.0 * A * A  # (pi/2) A^2 cos(4 pi x1)
    r12 = -0.5 * (2.0 * np.pi) ** (g - 1.0) * A  # -(2 pi)^(g-1) A cos(2 pi x1)
    R = SymTensorField(
        SpectralField.from_modes(grid, {(2, 0): r11, (-2, 0): r11}),
        SpectralField.from_modes(grid, {(1, 0): r12, (-1, 0): r12}),
        zero.copy(),
    )
    return IterateState(0, 0, VectorField(zero.copy(), u2), VectorField(zero.copy(), v2), zero.copy(), R)
