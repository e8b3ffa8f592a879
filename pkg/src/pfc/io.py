"""Reading matrices (Matrix Market subset, CSV) and kernel specifications."""

import csv
from pathlib import Path

import numpy as np

from .errors import InputError
from .jentzsch import const_kernel, exp_kernel, poly_kernel
from .matrix import ComplexMatrix, NonnegativeMatrix

_BANNER = "%%matrixmarket"


def _parse_mm(text):
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith(_BANNER):
        raise InputError("missing %%MatrixMarket banner")
    head = lines[0].split()
    if len(head) != 5:
        raise InputError(f"malformed header: {lines[0]!r}")
    obj, layout, field, symmetry = (h.lower() for h in head[1:])
    if obj != "matrix" or layout not in ("coordinate", "array"):
        raise InputError(f"unsupported object/format: {obj} {layout}")
    if field not in ("real", "complex") or symmetry != "general":
        raise InputError(f"unsupported field/symmetry: {field} {symmetry}")
    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise InputError("missing size line")
    try:
        size = [int(t) for t in body[0].split()]
        rows = [[float(t) for t in ln.split()] for ln in body[1:]]
    except ValueError as exc:
        raise InputError(f"malformed number: {exc}") from None
    width = 2 if field == "complex" else 1
    dtype = complex if field == "complex" else float

    def value(tok):
        return complex(tok[0], tok[1]) if width == 2 else tok[0]

    if layout == "array":
        if len(size) != 2:
            raise InputError("array size line needs 'rows cols'")
        m, n = size
        if len(rows) != m * n or any(len(r) != width for r in rows):
            raise InputError(f"expected {m * n} entries of width {width}")
        vals = np.array([value(r) for r in rows], dtype=dtype)
        return vals.reshape((n, m)).T  # column-major
    if len(size) != 3:
        raise InputError("coordinate size line needs 'rows cols nnz'")
    m, n, nnz = size
    if len(rows) != nnz:
        raise InputError(f"expected {nnz} entries, found {len(rows)}")
    a = np.zeros((m, n), dtype=dtype)
    for r in rows:
        if len(r) != 2 + width:
            raise InputError(f"malformed entry line {r}")
        i, j = int(r[0]) - 1, int(r[1]) - 1
        if not (0 <= i < m and 0 <= j < n):
            raise InputError(f"index ({i + 1}, {j + 1}) out of range")
        a[i, j] += value(r[2:])
    return a


def _parse_csv(text):
    rows = [r for r in csv.reader(text.splitlines()) if any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty CSV")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("ragged CSV rows")
    try:
        vals = [[complex(c.strip().replace(" ", "")) for c in r] for r in rows]
    except ValueError as exc:
        raise InputError(f"malformed CSV entry: {exc}") from None
    a = np.array(vals, dtype=complex)
    return a.real.copy() if not np.any(a.imag) else a


def parse_matrix_text(text, fmt=None, nonnegative=True):
    if fmt is None:
        fmt = "mm" if text.lstrip().lower().startswith(_BANNER) else "csv"
    if fmt not in ("mm", "csv"):
        raise InputError(f"unknown format {fmt!r}")
    a = _parse_mm(text) if fmt == "mm" else _parse_csv(text)
    if nonnegative:
        return NonnegativeMatrix(a)
    return ComplexMatrix(a)


def parse_matrix(path, fmt=None, nonnegative=True):
    """Read a square matrix from Matrix Market or CSV.

    With ``nonnegative`` the result is a :class:`NonnegativeMatrix` and any
    negative entry is rejected with its 0-based ``(row, col)``; otherwise a
    :class:`ComplexMatrix`. The format is sniffed from the banner when
    ``fmt`` is not given.
    """
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    return parse_matrix_text(p.read_text(), fmt, nonnegative)


def parse_kernel(spec):
    """``const:c``, ``poly:c0,c1,...`` (sum of c_k (st)^k) or ``exp[:a]``."""
    name, _, args = str(spec).partition(":")
    try:
        nums = [float(t) for t in args.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad kernel arguments in {spec!r}") from None
    if name == "const":
        return const_kernel(*(nums or [1.0]))
    if name == "poly":
        return poly_kernel(*nums)
    if name == "exp":
        return exp_kernel(*(nums or [1.0]))
    raise InputError(f"unknown kernel {name!r}")
