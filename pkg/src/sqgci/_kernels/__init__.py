"""Hot kernels: compiled Cython core with a NumPy fallback.

The compiled module is used when it imports; setting ``SQG_PURE_PYTHON=1``
forces the fallback.  ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernels

if os.environ.get("SQG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

phi_hat_sine = _impl.phi_hat_sine
sobolev_sq_sum = _impl.sobolev_sq_sum
tensor_sobolev_sq_sum = _impl.tensor_sobolev_sq_sum
abs_pow_sum = _impl.abs_pow_sum
hypot_pow_sum = _impl.hypot_pow_sum
hypot_max = _impl.hypot_max

__all__ = [
    "BACKEND",
    "phi_hat_sine",
    "sobolev_sq_sum",
    "tensor_sobolev_sq_sum",
    "abs_pow_sum",
    "hypot_pow_sum",
    "hypot_max",
]
