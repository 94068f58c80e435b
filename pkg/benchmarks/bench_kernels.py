"""Timing of the compiled kernels against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--n 1024] [--repeat 5]

Both backends are imported directly, so the comparison does not depend on
SQG_PURE_PYTHON.  Results are also checked for agreement.
"""
import argparse
import timeit

import numpy as np

from sqgci._kernels import _pykernels as py

try:
    from sqgci._kernels import _ckernels as cy
except ImportError:  # extension not built
    cy = None


def cases(n: int, rng):
    c = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))).astype(np.complex128)
    t = [(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))).astype(np.complex128) for _ in range(3)]
    a = rng.normal(size=n * n)
    b = rng.normal(size=n * n)
    x = np.linspace(0.0, 0.5, 4097)
    phi = np.sin(np.pi * x) ** 4
    xi = np.linspace(0.0, 40.0, 2 * n)
    return {
        "sobolev_sq_sum": lambda m: m.sobolev_sq_sum(c, -4.0),
        "tensor_sobolev_sq_sum": lambda m: m.tensor_sobolev_sq_sum(*t, -4.0),
        "abs_pow_sum": lambda m: m.abs_pow_sum(a, 1.5),
        "hypot_pow_sum": lambda m: m.hypot_pow_sum(a, b, 1.5),
        "hypot_max": lambda m: m.hypot_max(a, b),
        "phi_hat_sine": lambda m: m.phi_hat_sine(x, phi, xi, x[1] - x[0]),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1024, help="grid size of the test arrays")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}{'rel diff':>12}")
    for name, fn in cases(args.n, rng).items():
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:<24}{tp:>14.2f}{'n/a':>14}")
            continue
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        rp, rc = np.asarray(fn(py)), np.asarray(fn(cy))
        diff = float(np.max(np.abs(rp - rc)) / max(float(np.max(np.abs(rp))), 1e-300))
        print(f"{name:<24}{tp:>14.2f}{tc:>14.2f}{tp / tc:>10.2f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
