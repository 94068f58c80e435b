"""Traces, item checks, weak-form checks and reports."""
from .items import check_items
from .report import SCHEMA, Entry, VerificationReport
from .trace import Trace, load_trace, run_trace, save_trace, start_trace
from .weak import paraproduct_norm, theta_u, weak_residual

__all__ = [
    "SCHEMA", "Entry", "Trace", "VerificationReport", "check_items", "load_trace", "paraproduct_norm",
    "run_trace", "save_trace", "start_trace", "theta_u", "weak_residual",
]
