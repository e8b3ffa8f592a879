"""Perron roots and vectors with Collatz-Wielandt certificates.

The workhorse is the normalized fixed-point map ``x -> A x / ||A x||_1`` on
the unit simplex, applied to the shifted operator ``s I + A``. The shift
keeps the eigenvectors, turns an irreducible matrix into a primitive one,
and so removes the oscillation of periodic matrices.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    InputError,
    PositivityError,
    PreconditionError,
    ReducibleError,
)
from .matrix import (
    TAU_POS,
    ComplexMatrix,
    NonnegativeMatrix,
    OrderedVector,
    as_vector,
    char_poly_value,
    is_strictly_positive,
)
from .structure import _bool_power, _reach, is_irreducible, reducible_block_form

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
STALL_WINDOW = 200


@dataclass(frozen=True)
class SimplicityReport:
    derivative_value: float
    summand_values: tuple
    simple: bool
    fd_crosscheck: float
    threshold: float


@dataclass(frozen=True)
class PerronCertificate:
    rho: float
    vector: OrderedVector
    cw_lower: float
    cw_upper: float
    residual: float
    iterations: int
    strictly_positive: bool
    converged: bool = True
    nilpotent: bool = False
    simplicity: SimplicityReport = field(default=None, compare=False)


@dataclass(frozen=True)
class DominanceReport:
    verdict: str
    rho_B: float
    rho_M: float
    abs_equals_M: bool = None
    peripheral_vectors_ok: bool = None


DOMINATED_STRICT = "DOMINATED_STRICT"
DOMINATED_EQ_RADIUS = "DOMINATED_EQ_RADIUS"
NOT_DOMINATED = "NOT_DOMINATED"


def _nonneg_vector(x):
    v = as_vector(x)
    if np.any(v < 0):
        raise PreconditionError("vector must be nonnegative")
    if not np.any(v > 0):
        raise InputError("vector must be nonzero")
    return v


def collatz_wielandt(A, x):
    """Lower and upper Collatz-Wielandt ratios of ``A`` at ``x >= 0``.

    Both range over the support of ``x``. Coordinates with ``x_j = 0`` and
    ``(Ax)_j = 0`` carry no information and are skipped; a coordinate with
    ``x_j = 0 < (Ax)_j`` sends the upper bound to infinity.
    """
    a = NonnegativeMatrix(A).entries
    v = _nonneg_vector(x)
    if v.size != a.shape[0]:
        raise DimensionError("vector length does not match matrix order")
    y = a @ v
    supp = v > 0
    r = y[supp] / v[supp]
    lower, upper = float(r.min()), float(r.max())
    if np.any(y[~supp] > 0):
        upper = float("inf")
    return lower, upper


def is_nilpotent(A):
    """Exact test ``A^n = 0`` on the boolean support."""
    s = NonnegativeMatrix(A).entries > 0
    return not _bool_power(s, s.shape[0]).any()


def _residual(a, x, rho):
    return float(np.sum(np.abs(a @ x - rho * x)))


def _accelerate(a, x, shift, tol):
    """Apply ``(shift I + A)^(2^j)`` for growing ``j`` by repeated squaring."""
    n = a.shape[0]
    m = shift * np.eye(n) + a
    m /= m.max()
    for _ in range(60):
        m = m @ m
        top = m.max()
        if top == 0 or not np.isfinite(top):
            break
        m /= top
        y = m @ x
        s = y.sum()
        if s <= 0:
            break
        y /= s
        rho = float(np.sum(a @ y))
        if _residual(a, y, rho) <= tol:
            return y
    return None


def _fixed_point(a, x, tol, max_iter, on_stall=None):
    """Shifted simplex iteration; returns ``(x, rho, residual, iters, ok)``."""
    scale = float(np.max(np.sum(a, axis=1))) or 1.0
    y = a @ x
    rho = float(y.sum())
    res = _residual(a, x, rho)
    best = (x, rho, res)
    window_res = res
    hooks = [on_stall] if on_stall else []
    it = 0
    while res > tol and it < max_iter:
        s = max(rho, 1e-3 * scale)
        x = s * x + y
        x /= x.sum()
        y = a @ x
        rho = float(y.sum())
        res = _residual(a, x, rho)
        it += 1
        if res < best[2]:
            best = (x, rho, res)
        if it % STALL_WINDOW == 0:
            if res > 0.5 * window_res:
                if hooks:
                    x = hooks.pop()(x)
                else:
                    z = _accelerate(a, x, s, tol)
                    if z is not None:
                        x = z
                y = a @ x
                rho = float(y.sum())
                res = _residual(a, x, rho)
                if res < best[2]:
                    best = (x, rho, res)
            window_res = res
    if res > tol:
        x, rho, res = best
        return x, rho, res, it, False
    # polish down to the rounding floor
    target = 1e-3 * tol
    for _ in range(500):
        if res <= target:
            break
        s = max(rho, 1e-3 * scale)
        z = s * x + y
        z /= z.sum()
        yz = a @ z
        rz = float(yz.sum())
        rs = _residual(a, z, rz)
        if rs >= res * (1 - 1e-3):
            break
        x, y, rho, res = z, yz, rz, rs
        it += 1
    return x, rho, res, it, True


def _certificate(a, x, rho, res, it, ok, simplicity=None):
    lo, hi = collatz_wielandt(a, x)
    return PerronCertificate(
        rho=rho,
        vector=OrderedVector(x),
        cw_lower=lo,
        cw_upper=hi,
        residual=res,
        iterations=it,
        strictly_positive=is_strictly_positive(x),
        converged=ok,
        simplicity=simplicity,
    )


def perron_fixed_point(A, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Spectral radius and a nonnegative eigenvector of any ``A >= 0``.

    Nilpotent supports are detected exactly and answered with ``rho = 0``
    and a canonical basis vector killed by ``A``. Otherwise the shifted
    simplex map is iterated from the barycenter. If the budget runs out
    the best iterate is returned with ``converged=False``.
    """
    M = NonnegativeMatrix(A)
    a = M.entries
    n = M.n
    if is_nilpotent(M):
        j = int(np.flatnonzero(~(a > 0).any(axis=0))[0])
        e = np.zeros(n)
        e[j] = 1.0
        return PerronCertificate(
            rho=0.0,
            vector=OrderedVector(e),
            cw_lower=0.0,
            cw_upper=0.0,
            residual=0.0,
            iterations=0,
            strictly_positive=n == 1,
            nilpotent=True,
        )
    x0 = np.full(n, 1.0 / n)
    x, rho, res, it, ok = _fixed_point(a, x0, tol, max_iter)
    if n > 1 and not is_irreducible(M).irreducible:
        block = _block_pair(a, tol, max_iter)
        if block is not None and block[2] <= max(tol, res):
            x, rho, res = block
            ok = True
    return _certificate(a, x, rho, res, it, ok)


def _block_pair(a, tol, max_iter):
    """Perron pair of a reducible matrix assembled from its diagonal blocks.

    Plain iteration converges only like ``1/k`` when the Perron root is
    defective (equal block radii along a chain). Here every irreducible
    block is solved on its own, the earliest block in topological order
    that attains the largest radius carries the eigenvector, and the
    components on blocks upstream of it follow from the resolvent, which is
    nonnegative because those blocks have strictly smaller radius.
    """
    perm, sizes = reducible_block_form(a)
    edges = np.cumsum((0,) + sizes)
    blocks = [list(perm[edges[k]:edges[k + 1]]) for k in range(len(sizes))]
    pairs = []
    for idx in blocks:
        sub = a[np.ix_(idx, idx)]
        if len(idx) == 1:
            pairs.append((float(sub[0, 0]), np.ones(1)))
            continue
        x0 = np.full(len(idx), 1.0 / len(idx))
        x, r, _, _, ok = _fixed_point(sub, x0, tol, max_iter, _improve_hook(sub))
        if not ok:
            return None
        pairs.append((r, x))
    rho = max(r for r, _ in pairs)
    k = next(i for i, (r, _) in enumerate(pairs) if r >= rho - 1e-10 * max(1.0, rho))
    rho, xk = pairs[k]
    K = blocks[k]
    x = np.zeros(a.shape[0])
    x[K] = xk
    # indices with a path into block k (their coordinates must absorb A x)
    up = _reach((a > 0).T, K[0])
    up[K] = False
    U = np.flatnonzero(up)
    if U.size:
        m = rho * np.eye(U.size) - a[np.ix_(U, U)]
        x[U] = np.maximum(np.linalg.solve(m, a[np.ix_(U, K)] @ xk), 0.0)
    x /= x.sum()
    return x, rho, _residual(a, x, rho)


def improve_bound(A, x, r):
    """One strict improvement of a Collatz-Wielandt lower bound.

    Given ``A x >= r x`` with ``A x != r x``, returns ``y = (I + A)^(n-1) x``
    (1-normalized, strictly positive) and ``r' = min_j (Ay)_j / y_j > r``.
    """
    M = NonnegativeMatrix(A)
    if not is_irreducible(M).irreducible:
        raise ReducibleError("improve_bound needs an irreducible matrix")
    a = M.entries
    v = _nonneg_vector(x)
    if v.size != M.n:
        raise DimensionError("vector length does not match matrix order")
    d = a @ v - r * v
    scale = max(1.0, float(np.abs(a @ v).max()), abs(r) * float(v.max()))
    if np.any(d < -1e-12 * scale):
        raise PreconditionError("A x >= r x does not hold")
    if not np.any(d != 0):
        raise PreconditionError("A x = r x; no improvement possible")
    y = v / v.sum()
    for _ in range(M.n - 1):
        y = y + a @ y
        y /= y.sum()
    if not np.all(y > 0):
        raise PreconditionError("(I + A)^(n-1) x is not strictly positive")
    r_new = float(np.min((a @ y) / y))
    if not r_new > r:
        raise PreconditionError("A x = r x up to rounding; no strict improvement")
    return OrderedVector(y), r_new


def _improve_hook(a):
    def hook(x):
        lo, _ = collatz_wielandt(a, x)
        try:
            y, _ = improve_bound(a, x, lo)
        except PreconditionError:
            return x
        return y.coords.copy()

    return hook


def perron_irreducible(A, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Perron pair of an irreducible matrix with positivity and simplicity
    verified.

    Raises :class:`ReducibleError` for reducible input and
    :class:`PositivityError` if the computed vector has a coordinate at or
    below ``1e-12`` after normalization, which can only be a numerical
    breakdown.
    """
    M = NonnegativeMatrix(A)
    if not is_irreducible(M).irreducible:
        raise ReducibleError("matrix is reducible")
    a = M.entries
    n = M.n
    x0 = np.full(n, 1.0 / n)
    if n == 1 and a[0, 0] == 0:
        x, rho, res, it, ok = x0, 0.0, 0.0, 0, True
    else:
        x, rho, res, it, ok = _fixed_point(a, x0, tol, max_iter, _improve_hook(a))
    simplicity = simplicity_check(a, rho)
    cert = _certificate(a, x, rho, res, it, ok, simplicity)
    if not np.all(x > TAU_POS):
        raise PositivityError("Perron vector lost strict positivity", best=cert)
    return cert


def simplicity_check(A, rho):
    """Derivative of the characteristic polynomial at ``rho`` as the sum of
    the principal ``(n-1)``-minors ``det(rho I - A_j)``.

    ``A_j`` deletes row and column ``j``. A central difference of
    ``det(X I - A)`` with step ``1e-5 * max(1, rho)`` is returned alongside
    as an independent check.
    """
    a = NonnegativeMatrix(A).entries
    if rho < 0:
        raise PreconditionError("rho must be nonnegative")
    n = a.shape[0]
    summands = tuple(
        float(char_poly_value(np.delete(np.delete(a, j, 0), j, 1), rho)) for j in range(n)
    )
    deriv = float(np.sum(summands))
    h = 1e-5 * max(1.0, rho)
    fd = (char_poly_value(a, rho + h) - char_poly_value(a, rho - h)) / (2 * h)
    threshold = 1e-8 * max(1.0, rho) ** (n - 1)
    return SimplicityReport(
        derivative_value=deriv,
        summand_values=summands,
        simple=deriv > threshold,
        fd_crosscheck=float(fd),
        threshold=threshold,
    )


def dominance_compare(B, M, eq_tol=1e-9):
    """Compare ``rho(B)`` with ``rho(M)`` for ``|B| <= M``, ``M`` irreducible.

    When the radii agree (within ``eq_tol`` relative) the report also checks
    the two consequences of equality: ``|B| = M`` and that ``|x|`` is a
    Perron vector of ``M`` for every peripheral eigenvector ``x`` of ``B``.
    """
    Mm = NonnegativeMatrix(M)
    if not is_irreducible(Mm).irreducible:
        raise ReducibleError("M must be irreducible")
    b = ComplexMatrix(B).entries
    m = Mm.entries
    if b.shape != m.shape:
        raise DimensionError("B and M differ in order")
    cert = perron_irreducible(Mm)
    rho_M = cert.rho
    abs_b = np.abs(b)
    scale = max(1.0, float(m.max()))
    if np.any(abs_b > m + 1e-12 * scale):
        rho_B = float(np.max(np.abs(np.linalg.eigvals(b))))
        return DominanceReport(NOT_DOMINATED, rho_B, rho_M)
    lam, vecs = np.linalg.eig(b)
    rho_B = float(np.max(np.abs(lam)))
    tol = eq_tol * max(1.0, rho_M)
    if rho_B < rho_M - tol:
        return DominanceReport(DOMINATED_STRICT, rho_B, rho_M)
    abs_equal = bool(np.max(np.abs(abs_b - m)) <= 1e-9 * scale)
    ok = True
    for k in np.flatnonzero(np.abs(lam) >= rho_M - tol):
        z = np.abs(vecs[:, k])
        z /= z.sum()
        if np.sum(np.abs(m @ z - rho_M * z)) > 1e-8 * max(1.0, rho_M):
            ok = False
    return DominanceReport(DOMINATED_EQ_RADIUS, rho_B, rho_M, abs_equal, ok)


def krein_rutman_lower(A, x, p, lam, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Eigenpair ``(mu, w)`` of ``A >= 0`` with ``mu >= lam`` and ``w >= 0``,
    starting from a witness ``x >= 0`` with ``A^p x >= lam^p x``.

    The shifted simplex map for ``A^p`` keeps the set
    ``{y >= 0, ||y||_1 = 1, A^p y >= lam^p y}`` invariant, so its limit is an
    eigenvector of ``A^p`` with eigenvalue ``nu >= lam^p``. That eigenvector
    lifts to ``A`` through ``w = sum_{i<p} nu^((p-1-i)/p) A^i v``.
    """
    M = NonnegativeMatrix(A)
    a = M.entries
    p = int(p)
    if p < 1:
        raise PreconditionError("p must be a positive integer")
    if not lam > 0:
        raise PreconditionError("lambda must be positive")
    v = _nonneg_vector(x)
    if v.size != M.n:
        raise DimensionError("vector length does not match matrix order")
    g = np.linalg.matrix_power(a, p)
    c = lam**p
    gv = g @ v
    scale = max(1.0, float(np.abs(gv).max()), c * float(v.max()))
    if np.any(gv - c * v < -1e-12 * scale):
        raise PreconditionError("A^p x >= lambda^p x does not hold")
    y, nu, res, it, ok = _fixed_point(g, v / v.sum(), tol, max_iter)
    if not ok:
        raise ConvergenceError(f"no convergence after {it} iterations (residual {res:.3g})")
    if nu < c - 1e-9 * max(1.0, c):
        raise ConvergenceError(f"eigenvalue {float(nu)!r} fell below lambda^p = {float(c)!r}")
    mu = nu ** (1.0 / p)
    w = np.zeros_like(y)
    term = y.copy()
    for i in range(p):
        w += mu ** (p - 1 - i) * term
        term = a @ term
    return mu, OrderedVector(w / w.sum())
