"""Binary grid dumps and CSV coefficient dumps.

Binary layout (little endian): ``b"SQGF"``, ``u32`` format version, ``u32``
grid size ``n``, ``u8`` kind (0 scalar, 1 vector, 2 symmetric tensor), then
``n*n`` float64 samples per component in row-major order (components in the
order x, y or 11, 12, 22).
"""
from __future__ import annotations

import csv
import struct

import numpy as np

from .fields import SpectralField, SymTensorField, VectorField, inverse, transform
from .grid import GridSpec

MAGIC = b"SQGF"
VERSION = 1
KIND_SCALAR, KIND_VECTOR, KIND_TENSOR = 0, 1, 2
_HEADER = struct.Struct("<4sIIB")


def _kind_and_components(f):
    if isinstance(f, SpectralField):
        return KIND_SCALAR, (f,)
    if isinstance(f, VectorField):
        return KIND_VECTOR, f.components
    if isinstance(f, SymTensorField):
        return KIND_TENSOR, f.components
    raise TypeError(f"cannot dump {type(f).__name__}")


def write_field(path, f) -> None:
    kind, comps = _kind_and_components(f)
    n = comps[0].n
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, kind))
        for c in comps:
            if not c.real_flag:
                raise ValueError("binary dumps hold real fields only")
            fh.write(np.ascontiguousarray(inverse(c), dtype="<f8").tobytes())


def read_field(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, version, n, kind = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        ncomp = {KIND_SCALAR: 1, KIND_VECTOR: 2, KIND_TENSOR: 3}.get(kind)
        if ncomp is None:
            raise ValueError(f"{path}: unknown field kind {kind}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != ncomp * n * n:
        raise ValueError(f"{path}: expected {ncomp * n * n} samples, found {data.size}")
    grid = GridSpec(n)
    comps = [transform(data[i * n * n:(i + 1) * n * n].reshape(n, n).astype(np.float64), grid)
             for i in range(ncomp)]
    if kind == KIND_SCALAR:
        return comps[0]
    if kind == KIND_VECTOR:
        return VectorField(*comps)
    return SymTensorField(*comps)


def write_coeffs_csv(path, f: SpectralField, tol: float = 0.0) -> int:
    """Write nonzero coefficients as ``j1, j2, re, im`` rows in lexicographic order."""
    k = f.grid.freqs
    order = np.argsort(k, kind="stable")
    sub = f.coeffs[np.ix_(order, order)]
    mask = np.abs(sub) > tol
    i1, i2 = np.nonzero(mask)
    rows = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j1", "j2", "re", "im"])
        for a, b in zip(i1, i2):
            c = sub[a, b]
            w.writerow([int(k[order[a]]), int(k[order[b]]), repr(float(c.real)), repr(float(c.imag))])
            rows += 1
    return rows


def read_coeffs_csv(path, n: int, real_flag: bool = True) -> SpectralField:
    grid = GridSpec(n)
    c = np.zeros((n, n), np.complex128)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            c[int(row["j1"]) % n, int(row["j2"]) % n] = complex(float(row["re"]), float(row["im"]))
    return SpectralField(grid, c, real_flag, enforce=False)
