"""Closed convex cones in R^n and the order they induce.

Three kinds are supported, each with exact membership and dual tests:
the nonnegative orthant, finitely generated polyhedral cones given by both
their generators and their facet inequalities, and Lorentz (second-order)
cones ``{x : x[axis] >= ||x without axis||_2}``.

All vectors handed out by this module are normalized in the 1-norm.
"""

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import ConeError, ConvergenceError, DimensionError, PreconditionError

MEMBERSHIP_TOL = 1e-10


class ConeKind(enum.Enum):
    ORTHANT = "ORTHANT"
    POLYHEDRAL = "POLYHEDRAL"
    LORENTZ = "LORENTZ"


@dataclass(frozen=True, eq=False)
class ConvexCone:
    """A proper, generating, closed convex cone.

    Build instances with :meth:`orthant`, :meth:`lorentz` or
    :meth:`polyhedral` rather than calling the constructor directly.
    For a polyhedral cone ``generators`` holds one generator per row and
    ``duals`` one inequality ``h . x >= 0`` per row.
    """

    kind: ConeKind
    dim: int
    generators: np.ndarray = None
    duals: np.ndarray = None
    axis: int = None

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise DimensionError("cone dimension must be >= 1")
        if self.kind is ConeKind.LORENTZ:
            if self.axis is None or not 0 <= self.axis < n:
                raise ConeError(f"axis {self.axis} out of range for dimension {n}")
            return
        if self.kind is ConeKind.ORTHANT:
            eye = np.eye(n)
            eye.setflags(write=False)
            object.__setattr__(self, "generators", eye)
            object.__setattr__(self, "duals", eye)
            return
        g = np.atleast_2d(np.array(self.generators, dtype=float))
        h = np.atleast_2d(np.array(self.duals, dtype=float))
        if g.shape[1] != n or h.shape[1] != n:
            raise DimensionError("generator / dual rows must have length dim")
        if np.linalg.matrix_rank(g) < n:
            raise ConeError("generators do not span the space (cone is not generating)")
        if np.linalg.matrix_rank(h) < n:
            raise ConeError("dual inequalities leave a line in the cone (cone is not proper)")
        if np.any(h @ g.T < -1e-12):
            raise ConeError("a generator violates a dual inequality")
        g.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "duals", h)

    @classmethod
    def orthant(cls, n):
        return cls(ConeKind.ORTHANT, int(n))

    @classmethod
    def lorentz(cls, n, axis=None):
        n = int(n)
        return cls(ConeKind.LORENTZ, n, axis=n - 1 if axis is None else int(axis))

    @classmethod
    def polyhedral(cls, generators, duals):
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        return cls(ConeKind.POLYHEDRAL, g.shape[1], generators=g, duals=duals)

    def interior_point(self):
        if self.kind is ConeKind.LORENTZ:
            e = np.zeros(self.dim)
            e[self.axis] = 1.0
            return e
        g = self.generators / np.sum(np.abs(self.generators), axis=1, keepdims=True)
        x = g.sum(axis=0)
        return x / np.sum(np.abs(x))

    def _rest(self, x):
        return np.delete(x, self.axis, axis=-1)

    def sample_points(self, count=64, seed=0):
        """Deterministic cone points: generators, or Lorentz boundary rays."""
        if self.kind is not ConeKind.LORENTZ:
            return np.array(self.generators)
        n = self.dim
        rng = np.random.default_rng(seed)
        dirs = [np.eye(n - 1)[i] * s for i in range(n - 1) for s in (1.0, -1.0)]
        if n > 1:
            r = rng.normal(size=(count, n - 1))
            dirs.extend(r / np.linalg.norm(r, axis=1, keepdims=True))
        pts = [self.interior_point()]
        for d in dirs:
            p = np.insert(np.asarray(d, dtype=float), self.axis, 1.0)
            pts.append(p)
        return np.array(pts)


def _check_dim(C, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != C.dim:
        raise DimensionError(f"vector of length {x.size} for cone of dimension {C.dim}")
    return x


def cone_contains(C, x, tol=MEMBERSHIP_TOL):
    x = _check_dim(C, x)
    if C.kind is ConeKind.ORTHANT:
        return bool(np.all(x >= -tol))
    if C.kind is ConeKind.LORENTZ:
        return bool(x[C.axis] >= np.linalg.norm(C._rest(x)) - tol)
    return bool(np.all(C.duals @ x >= -tol))


def decompose(C, x):
    """Split ``x = x_plus - x_minus`` with both parts in ``C``.

    The orthant uses coordinatewise positive and negative parts. The other
    kinds shift along an interior direction ``e`` by the smallest ``s >= 0``
    making ``x + s e`` a member, and return ``(x + s e, s e)``.
    """
    x = _check_dim(C, x)
    if C.kind is ConeKind.ORTHANT:
        return np.maximum(x, 0.0), np.maximum(-x, 0.0)
    e = C.interior_point()
    if C.kind is ConeKind.LORENTZ:
        s = max(0.0, float(np.linalg.norm(C._rest(x)) - x[C.axis]))
    else:
        he = C.duals @ e
        if np.any(he <= 0):
            raise ConeError("no interior direction; cone data is not generating")
        s = max(0.0, float(np.max(-(C.duals @ x) / he)))
    xp, xm = x + s * e, s * e
    if not (cone_contains(C, xp, 1e-9 * max(1.0, s)) and cone_contains(C, xm)):
        raise ConeError("decomposition failed")
    return xp, xm


@dataclass(frozen=True, eq=False)
class PositiveFunctional:
    """Linear form ``x -> f . x``, nonnegative on ``cone`` when one is given."""

    coefficients: np.ndarray
    cone: ConvexCone = field(default=None, repr=False)

    def __post_init__(self):
        f = np.array(self.coefficients, dtype=float).reshape(-1)
        f.setflags(write=False)
        object.__setattr__(self, "coefficients", f)
        C = self.cone
        if C is None:
            return
        if f.size != C.dim:
            raise DimensionError("functional length does not match cone dimension")
        if C.kind is ConeKind.LORENTZ:
            ok = f[C.axis] >= np.linalg.norm(C._rest(f)) - 1e-12
        else:
            ok = bool(np.all(C.generators @ f >= -1e-12))
        if not ok:
            raise ConeError("functional is negative somewhere on the cone")

    def __call__(self, x):
        return float(self.coefficients @ np.asarray(x, dtype=float))


def separating_functional(C, u):
    """Positive form ``f`` with ``f(u) > 0`` for any ``u`` outside ``-C``.

    Orthant and polyhedral cones sum the dual generators that are positive
    at ``u``. The Lorentz cone, being self-dual, takes the dual element
    ``(g, 1)`` with ``||g|| <= 1`` that maximizes ``f(u)``.
    """
    u = _check_dim(C, u)
    if cone_contains(C, -u, tol=0.0):
        raise PreconditionError("u lies in -C; no separating positive form exists")
    if C.kind is ConeKind.LORENTZ:
        rest = C._rest(u)
        r = np.linalg.norm(rest)
        g = rest / r if r > 0 else np.zeros_like(rest)
        f = np.insert(g, C.axis, 1.0)
    else:
        hu = C.duals @ u
        f = C.duals[hu > 0].sum(axis=0)
    pf = PositiveFunctional(f, C)
    if not pf(u) > 0:
        raise PreconditionError("could not separate u from -C")
    return pf


def rank_one_B(f, u, v_plus):
    """Rank-one positive operator ``x -> (f(x) / f(u)) v_plus``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v_plus, dtype=float).reshape(-1)
    fu = f(u)
    if not fu > 0:
        raise PreconditionError("f(u) must be positive")
    if f.cone is not None and not cone_contains(f.cone, v, 1e-10 * max(1.0, np.abs(v).max(initial=0))):
        raise PreconditionError("v_plus is not in the cone")
    return np.outer(v, f.coefficients) / fu


def preserves(T, C, tol=1e-10):
    """Does ``T`` map ``C`` into itself?

    Exact for orthant and polyhedral cones (images of the generators are
    tested); sampled on boundary rays for the Lorentz cone.
    """
    T = np.asarray(T, dtype=float)
    pts = C.sample_points()
    for p in pts:
        q = T @ p
        if not cone_contains(C, q, tol * max(1.0, float(np.abs(q).max()))):
            return False
    return True


@dataclass(frozen=True)
class ConeEigenpair:
    eigenvalue: float
    vector: np.ndarray
    residual: float
    iterations: int
    method: str
    oracle_assisted: bool = False


def _null_cone_vector(T, C):
    n = C.dim
    u, s, vt = np.linalg.svd(T)
    cut = 1e-12 * max(1.0, float(s[0]) if s.size else 0.0)
    N = vt[s <= cut].T
    if N.shape[1] == 0:
        return None
    if C.kind is ConeKind.LORENTZ:
        J = -np.eye(n)
        J[C.axis, C.axis] = 1.0
        w, V = np.linalg.eigh(N.T @ J @ N)
        if w[-1] < -1e-12:
            return None
        x = N @ V[:, -1]
        if x[C.axis] < 0:
            x = -x
    else:
        G = C.generators.T
        k = G.shape[1]
        res = scipy.optimize.linprog(
            np.zeros(k),
            A_eq=np.vstack([T @ G, np.ones((1, k))]),
            b_eq=np.concatenate([np.zeros(n), [1.0]]),
            bounds=[(0, None)] * k,
            method="highs",
        )
        if res.status != 0:
            return None
        x = G @ res.x
    x = x / np.sum(np.abs(x))
    if not cone_contains(C, x, 1e-9) or np.sum(np.abs(T @ x)) > 1e-10 * max(1.0, np.abs(T).max()):
        return None
    return x


def _cesaro(history):
    """Average over the shortest detected cycle in the iterate history."""
    h = np.array(history)
    for m in range(2, min(32, len(h) // 2) + 1):
        if np.max(np.abs(h[-1] - h[-1 - m])) < 1e-9:
            return h[-m:].mean(axis=0)
    return None


def _oracle_pair(T, C):
    lam, V = np.linalg.eig(T)
    best = None
    for k in np.argsort(-lam.real):
        if abs(lam[k].imag) > 1e-9 * max(1.0, abs(lam[k])) or lam[k].real < -1e-12:
            continue
        x = V[:, k].real
        if not np.any(x):
            continue
        for sign in (1.0, -1.0):
            y = sign * x / np.sum(np.abs(x))
            if cone_contains(C, y, 1e-9):
                best = (float(lam[k].real), y)
                break
        if best:
            break
    return best


def cone_eigenvector_finite(T, C, tol=1e-10, max_iter=20_000, start=None, project=None):
    """Eigenvector of a cone-preserving ``T`` lying in ``C``.

    A nonzero cone vector in the kernel of ``T`` is returned first with
    eigenvalue 0. Otherwise the averaged normalized map
    ``x -> (x + T x / phi(T x)) / 2`` is iterated on the base
    ``{x in C : phi(x) = 1}``, where ``phi`` is a strictly positive form.
    Slow phases are accelerated by repeated squaring of the averaged
    operator, periodic orbits are Cesaro-averaged, and as a last resort the
    real eigenpairs of a dense eigensolver are filtered for cone membership
    (reported with ``oracle_assisted=True``).

    ``project`` (a matrix) is applied after every step; it keeps the
    iterates inside an invariant subspace.
    """
    T = np.asarray(T, dtype=float)
    n = C.dim
    if T.shape != (n, n):
        raise DimensionError("operator and cone dimensions differ")
    if not preserves(T, C):
        raise ConeError("operator does not map the cone into itself")
    x = _null_cone_vector(T, C)
    if x is not None:
        return ConeEigenpair(0.0, x, float(np.sum(np.abs(T @ x))), 0, "kernel")
    phi = separating_functional(C, C.interior_point()).coefficients
    x = C.interior_point() if start is None else np.array(start, dtype=float)
    if not cone_contains(C, x, 1e-9 * max(1.0, np.abs(x).max())):
        raise PreconditionError("start vector is not in the cone")
    x = x / (phi @ x)
    scale = max(float(np.abs(T).sum(axis=0).max()), 1e-300)

    def step(x):
        y = T @ x
        lam = float(phi @ y)
        return y, lam, float(np.sum(np.abs(y - lam * x)) / np.sum(np.abs(x)))

    y, lam, res = step(x)
    history = []
    it = 0
    method = "iteration"
    window = res
    while res > tol * max(1.0, abs(lam)) and it < max_iter:
        if lam <= 1e-300 * scale:
            break
        x = x + y / lam
        if project is not None:
            x = project @ x
        x = x / (phi @ x)
        y, lam, res = step(x)
        it += 1
        history.append(x)
        if len(history) > 80:
            history.pop(0)
        if it % 200 == 0:
            if res > 0.5 * window:
                z = _squaring(T, x, lam, phi, tol, project)
                if z is not None:
                    x = z
                    y, lam, res = step(x)
                    method = "accelerated"
            window = res
    if res > tol * max(1.0, abs(lam)) and history:
        z = _cesaro(history)
        if z is not None:
            z = z / (phi @ z)
            yz, lz, rz = step(z)
            if rz < res:
                x, y, lam, res = z, yz, lz, rz
                method = "cesaro"
    if res <= tol * max(1.0, abs(lam)):
        x, lam, res = _inverse_polish(T, C, x, lam, res, phi)
    w = x / np.sum(np.abs(x))
    if res <= tol * max(1.0, abs(lam)) and cone_contains(C, w, 1e-9):
        return ConeEigenpair(lam, w, float(np.sum(np.abs(T @ w - lam * w))), it, method)
    best = _oracle_pair(T, C)
    if best is None:
        raise ConvergenceError(f"no cone eigenvector after {it} iterations (residual {res:.3g})")
    lam, w = best
    return ConeEigenpair(lam, w, float(np.sum(np.abs(T @ w - lam * w))), it, "oracle", True)


def _inverse_polish(T, C, x, lam, res, phi, steps=3):
    """Shifted inverse iteration from a converged iterate.

    A defective dominant eigenvalue leaves the averaged iteration with an
    ``O(1/k)`` eigenvalue error even when the residual is tiny; each inverse
    step with shift ``lam`` multiplies the eigendirection by about
    ``1/|lam - mu|``. Steps leaving the cone or increasing the residual are
    discarded.
    """
    n = T.shape[0]
    for _ in range(steps):
        try:
            y = np.linalg.solve(T - lam * np.eye(n), x)
        except np.linalg.LinAlgError:
            break
        s = phi @ y
        if not np.isfinite(s) or s == 0:
            break
        y = y / s
        if not cone_contains(C, y / np.sum(np.abs(y)), 1e-12):
            break
        ty = T @ y
        ly = float(phi @ ty)
        ry = float(np.sum(np.abs(ty - ly * y)) / np.sum(np.abs(y)))
        if ry > res:
            break
        x, lam, res = y, ly, ry
    return x, lam, res


def _squaring(T, x, lam, phi, tol, project):
    n = T.shape[0]
    m = lam * np.eye(n) + T
    m /= np.abs(m).max()
    for _ in range(60):
        m = m @ m
        top = np.abs(m).max()
        if top == 0 or not np.isfinite(top):
            return None
        m /= top
        z = m @ x
        if project is not None:
            z = project @ z
        s = phi @ z
        if not s > 0:
            return None
        z = z / s
        y = T @ z
        lz = float(phi @ y)
        if np.sum(np.abs(y - lz * z)) / np.sum(np.abs(z)) <= tol * max(1.0, abs(lz)):
            return z
    return z

