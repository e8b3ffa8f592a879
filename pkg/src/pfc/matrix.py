"""Dense nonnegative matrices, complex matrices and ordered vectors.

Everything here is immutable: the stored arrays are copied on construction
and flagged read-only, so instances can be shared freely between threads.
"""

import enum
import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionError, InputError, NegativeEntryError

MAX_DIM = 512
CLAMP_TOL = 1e-12
TAU_POS = 1e-12


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _square(a, what):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {a.shape}")
    n = a.shape[0]
    if not 1 <= n <= MAX_DIM:
        raise DimensionError(f"{what} dimension {n} outside [1, {MAX_DIM}]")
    return n


class NonnegativeMatrix:
    """Square real matrix with every entry >= 0.

    Entries in ``[-1e-12, 0)`` are treated as round-off and clamped to zero;
    ``clamped`` records whether that happened. Anything more negative is
    rejected with :class:`NegativeEntryError`.
    """

    __slots__ = ("_a", "clamped")

    def __init__(self, entries):
        if isinstance(entries, NonnegativeMatrix):
            self._a = entries._a
            self.clamped = entries.clamped
            return
        a = np.asarray(entries)
        if np.iscomplexobj(a):
            if np.any(a.imag != 0):
                raise InputError("nonnegative matrix must be real")
            a = a.real
        a = np.array(a, dtype=float)
        _square(a, "matrix")
        if not np.all(np.isfinite(a)):
            raise InputError("matrix has non-finite entries")
        bad = a < -CLAMP_TOL
        if bad.any():
            i, j = (int(k) for k in np.argwhere(bad)[0])
            raise NegativeEntryError(
                f"negative entry {float(a[i, j])!r} at ({i}, {j})", location=(i, j)
            )
        small = a < 0
        self.clamped = bool(small.any())
        if self.clamped:
            a[small] = 0.0
        self._a = _frozen(a)

    @property
    def entries(self):
        return self._a

    @property
    def n(self):
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a.copy()
        return self._a.astype(dtype)

    def __repr__(self):
        return f"NonnegativeMatrix(n={self.n})"

    def __eq__(self, other):
        if not isinstance(other, NonnegativeMatrix):
            return NotImplemented
        return np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash(self._a.tobytes())

    def is_positive(self):
        return bool(np.all(self._a > 0))

    def support(self):
        """Boolean zero pattern ``a_ij > 0``."""
        return self._a > 0


class ComplexMatrix:
    __slots__ = ("_a",)

    def __init__(self, entries):
        if isinstance(entries, (ComplexMatrix, NonnegativeMatrix)):
            entries = entries.entries
        a = np.array(entries, dtype=complex)
        _square(a, "matrix")
        self._a = _frozen(a)

    @property
    def entries(self):
        return self._a

    @property
    def n(self):
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a.copy()
        return self._a.astype(dtype)

    def __repr__(self):
        return f"ComplexMatrix(n={self.n})"


class OrderedVector:
    """Real vector carrying the entrywise order, with a cached 1-norm."""

    __slots__ = ("_x", "norm1")

    def __init__(self, coords):
        if isinstance(coords, OrderedVector):
            self._x, self.norm1 = coords._x, coords.norm1
            return
        x = np.array(coords, dtype=float).reshape(-1)
        if x.size == 0:
            raise DimensionError("empty vector")
        self._x = _frozen(x)
        self.norm1 = float(np.sum(np.abs(x)))

    @property
    def coords(self):
        return self._x

    @property
    def n(self):
        return self._x.size

    def __len__(self):
        return self._x.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._x.copy()
        return self._x.astype(dtype)

    def __repr__(self):
        return f"OrderedVector({self._x.tolist()})"

    def is_nonnegative(self):
        return bool(np.all(self._x >= 0))


def as_real_matrix(A):
    """Plain float ndarray view of a matrix-like input."""
    if isinstance(A, (NonnegativeMatrix, ComplexMatrix)):
        return A.entries
    return np.asarray(A, dtype=float)


def as_vector(x):
    if isinstance(x, OrderedVector):
        return x.coords
    return np.asarray(x, dtype=float).reshape(-1)


class Order(enum.Enum):
    LEQ = "LEQ"
    GEQ = "GEQ"
    EQ = "EQ"
    STRICT_LT = "STRICT_LT"
    STRICT_GT = "STRICT_GT"
    INCOMPARABLE = "INCOMPARABLE"


def entrywise_abs(M):
    """Matrix of entry moduli ``|m_ij|``."""
    a = M.entries if isinstance(M, (ComplexMatrix, NonnegativeMatrix)) else np.asarray(M)
    return NonnegativeMatrix(np.abs(a))


def _cmp_operand(a):
    if isinstance(a, NonnegativeMatrix):
        return a.entries
    if isinstance(a, OrderedVector):
        return a.coords
    return np.asarray(a, dtype=float)


def entrywise_cmp(a, b):
    """Compare two matrices or two vectors in the entrywise partial order.

    ``STRICT_*`` verdicts require strict inequality in every entry; a tie in
    any single coordinate downgrades them to ``LEQ`` / ``GEQ``.
    """
    x, y = _cmp_operand(a), _cmp_operand(b)
    if x.shape != y.shape:
        raise DimensionError(f"cannot compare shapes {x.shape} and {y.shape}")
    if np.array_equal(x, y):
        return Order.EQ
    if np.all(x < y):
        return Order.STRICT_LT
    if np.all(x > y):
        return Order.STRICT_GT
    if np.all(x <= y):
        return Order.LEQ
    if np.all(x >= y):
        return Order.GEQ
    return Order.INCOMPARABLE


def apply(A, x):
    """Matrix-vector product ``A x`` as an :class:`OrderedVector`."""
    a = as_real_matrix(A)
    v = as_vector(x)
    if a.shape[1] != v.size:
        raise DimensionError(f"matrix of order {a.shape[1]} applied to vector of length {v.size}")
    return OrderedVector(a @ v)


def normalize_1(x):
    v = as_vector(x)
    s = float(np.sum(np.abs(v)))
    if s == 0.0:
        raise InputError("cannot normalize the zero vector")
    return OrderedVector(v / s)


def is_strictly_positive(x, tau=TAU_POS):
    """True when every coordinate of ``x / ||x||_1`` exceeds ``tau``."""
    v = as_vector(x)
    s = float(np.sum(np.abs(v)))
    return s > 0 and bool(np.all(v / s > tau))


def det_lu(M):
    """Determinant from an LU factorization with partial pivoting."""
    a = np.asarray(M)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("determinant needs a square matrix")
    if a.shape[0] == 0:
        return 1.0
    with warnings.catch_warnings():
        # an exactly singular factor is a legitimate zero determinant
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    swaps = np.count_nonzero(piv != np.arange(piv.size))
    d = np.prod(np.diag(lu))
    return float(-d if swaps % 2 else d) if not np.iscomplexobj(d) else complex(-d if swaps % 2 else d)


def char_poly_value(A, x):
    """``det(x I - A)``."""
    a = as_real_matrix(A)
    return det_lu(x * np.eye(a.shape[0]) - a)


def norm1_op(M):
    """Operator norm induced by the 1-norm (max absolute column sum)."""
    m = np.asarray(M)
    return float(np.max(np.sum(np.abs(m), axis=0))) if m.size else 0.0
