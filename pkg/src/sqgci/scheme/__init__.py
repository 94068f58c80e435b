"""Iteration of the relaxed equation: parameters, states, increments and steps."""
from .advance import MeanCheckError, StepResult, advance, projected_residual, step_grid
from .constants import choose_lambda, constant_C, passband_fraction, riemann_constant
from .increment import BallViolation, DirectionalIncrement, IncrementRecord, build_increment
from .params import BudgetError, ConfigError, SchemeParams
from .state import IterateState, base_state

__all__ = [
    "BallViolation", "BudgetError", "ConfigError", "DirectionalIncrement", "IncrementRecord", "IterateState",
    "MeanCheckError", "SchemeParams", "StepResult", "advance", "base_state", "build_increment", "choose_lambda",
    "constant_C", "passband_fraction", "projected_residual", "riemann_constant", "step_grid",
]
