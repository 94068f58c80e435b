"""Scheme parameters and admissibility of the frequency parameter."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..mikado import is_even_power_of_two

LAMBDA_FLOOR = 128

DEFAULT_TOLERANCES = {
    "rhs_mean": 1e-11,
    "residual_rel": 1e-10,
    "base_residual": 1e-11,
    "realness": 1e-12,
    "annulus": 1e-12,
    "mean": 1e-12,
    "divergence": 1e-11,
    "shell_mass": 1e-12,
    "weak_rel": 1e-10,
    "quadrature_rel": 1e-10,
    "refinement_rel": 1e-8,
}


class ConfigError(ValueError):
    """Invalid parameter values."""


class BudgetError(RuntimeError):
    """A requested grid exceeds the configured memory budget."""


@dataclass(frozen=True)
class SchemeParams:
    """Parameters of the iteration.

    ``lambda_policy`` is ``"auto"`` or a tuple of fixed values, one per step.
    Fixed values must be even powers of two above ``LAMBDA_FLOOR``.
    """

    gamma: float = 1.0
    amplitude_A: float = 1e-6
    eps_gamma: float = 0.05
    lambda_policy: object = "auto"
    grid_factor: int = 4
    max_grid: int = 4096
    positivity_floor: float = 1e-6
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if not (0.0 < self.gamma <= 2.0):
            raise ConfigError(f"gamma must lie in (0, 2], got {self.gamma}")
        if not self.amplitude_A > 0:
            raise ConfigError(f"amplitude_A must be positive, got {self.amplitude_A}")
        if not (0.0 < self.eps_gamma < 1.0):
            raise ConfigError(f"eps_gamma must lie in (0, 1), got {self.eps_gamma}")
        if self.grid_factor < 3:
            raise ConfigError("grid_factor must be at least 3")
        if isinstance(self.lambda_policy, str):
            if self.lambda_policy != "auto":
                raise ConfigError(f"unknown lambda policy {self.lambda_policy!r}")
        else:
            lams = tuple(int(x) for x in self.lambda_policy)
            for lam in lams:
                if not is_even_power_of_two(lam) or lam <= LAMBDA_FLOOR:
                    raise ConfigError(f"fixed lambda {lam} must be an even power of two > {LAMBDA_FLOOR}")
            object.__setattr__(self, "lambda_policy", lams)
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(self.tolerances)
        object.__setattr__(self, "tolerances", tol)

    @property
    def delta(self) -> float:
        """L^1 floor constant ``A / (2 pi)``."""
        return self.amplitude_A / (2.0 * np.pi)
