"""Positive eigenvectors of cone-preserving operators with irrational
peripheral rotations.

When the spectral radius (normalized to 1) carries a peripheral eigenvalue
``e^{i theta}`` with ``theta / pi`` irrational, powers ``A^p`` with ``p theta``
close to 0 mod ``2 pi`` are perturbed by a small rank-one positive operator so
that each perturbed power has a cone eigenvector ``w_k`` whose eigenvalue is
pushed toward 1. The non-peripheral part of ``w_k`` decays geometrically and
the limit is a positive eigenvector of ``A`` for eigenvalue 1.

All vectors are normalized in the 1-norm.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
import scipy.linalg

from .cones import (
    ConvexCone,
    cone_contains,
    cone_eigenvector_finite,
    decompose,
    preserves,
    rank_one_B,
    separating_functional,
)
from .errors import ConeError, ConvergenceError, HarnessError, InputError, PreconditionError
from .matrix import norm1_op

log = logging.getLogger(__name__)

NEAR_RATIONAL_QUOTIENT = 10**6
MAX_ROOT_ORDER = 64


def _norm1(x):
    return float(np.sum(np.abs(x)))


# -- rotation approximants ---------------------------------------------------


@dataclass(frozen=True)
class Approximants:
    """Pairs ``(p, eps)`` with ``p theta = eps mod 2 pi``, ``eps`` shrinking.

    Iterates like the underlying list of pairs.
    """

    entries: tuple
    exhausted: bool = False
    near_rational: bool = False

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]


def rotation_approximants(theta, K, max_p=10**12):
    """First ``K`` powers ``p`` with small positive residue ``p theta mod 2 pi``.

    Candidates are the denominators of the continued-fraction convergents of
    ``theta / (2 pi)``, evaluated in 50-digit arithmetic; those whose residue
    lands just above 0 are kept. The list is cut short (``exhausted``) when
    the residue sinks to the level where double-precision ``theta`` no longer
    determines it, or ``p`` exceeds ``max_p``. A partial quotient above
    ``1e6`` means ``theta / (2 pi)`` is within rounding of a rational and sets
    ``near_rational``.
    """
    K = int(K)
    if K < 1:
        raise InputError("K must be >= 1")
    theta = float(theta)
    if not math.isfinite(theta):
        raise InputError("theta must be finite")
    entries = []
    exhausted = near_rational = False
    with mpmath.workdps(50):
        two_pi = 2 * mpmath.pi
        x = mpmath.mpf(theta) / two_pi
        x -= mpmath.floor(x)
        h2, h1 = mpmath.mpf(0), mpmath.mpf(1)
        q2, q1 = mpmath.mpf(1), mpmath.mpf(0)
        frac = x
        first = True
        while len(entries) < K:
            a = mpmath.floor(frac)
            if not first and a > NEAR_RATIONAL_QUOTIENT:
                near_rational = True
            first = False
            h = a * h1 + h2
            q = a * q1 + q2
            if q > max_p:
                exhausted = True
                break
            resid = two_pi * (q * x - h)
            floor = 16 * float(q) * 2.0**-52 * max(1.0, abs(theta))
            if abs(resid) <= floor:
                exhausted = True
                break
            if resid > 0 and (not entries or int(q) > entries[-1][0]):
                entries.append((int(q), float(resid)))
            h2, h1, q2, q1 = h1, h, q1, q
            rest = frac - a
            if rest == 0:
                exhausted = True
                break
            frac = 1 / rest
    if near_rational:
        log.warning("theta/(2 pi) is numerically close to a rational; residues plateau")
    return Approximants(tuple(entries), exhausted, near_rational)


# -- spectral splitting -----------------------------------------------------


@dataclass(frozen=True)
class SpectralSplit:
    peripheral_dim: int
    P_prime: np.ndarray
    P_doubleprime: np.ndarray
    r_prime: float
    peripheral_eigenvalues: np.ndarray
    largest_nonperipheral: float


def spectral_split(A, gap_hint=1e-3, peripheral_tol=1e-8):
    """Spectral projection onto the eigenvalues of modulus 1.

    A real Schur form is reordered so the peripheral eigenvalues come first;
    a Sylvester equation then decouples the two diagonal blocks, giving the
    projection ``P'`` that commutes with ``A``. ``r_prime`` is the midpoint
    between the largest remaining modulus and 1. Fails when some eigenvalue
    sits in ``(1 - gap_hint, 1 - peripheral_tol)``, too close to the unit
    circle for a reliable split.
    """
    a = np.asarray(A, dtype=float)
    n = a.shape[0]
    moduli = np.abs(np.linalg.eigvals(a))
    if abs(moduli.max() - 1.0) > peripheral_tol:
        raise PreconditionError(f"spectral radius {moduli.max():.12g} is not 1")
    T, Z, k = scipy.linalg.schur(
        a, output="real", sort=lambda re, im: math.hypot(re, im) >= 1 - peripheral_tol
    )
    diag = scipy.linalg.eigvals(T)
    inner = np.abs(diag[k:])
    largest = float(inner.max()) if inner.size else 0.0
    if largest > 1 - gap_hint:
        raise PreconditionError(
            f"no spectral gap: non-peripheral modulus {largest:.12g} exceeds 1 - {gap_hint:g}"
        )
    P = np.eye(n)
    if k < n:
        Y = scipy.linalg.solve_sylvester(T[:k, :k], -T[k:, k:], -T[:k, k:])
        Ps = np.zeros((n, n))
        Ps[:k, :k] = np.eye(k)
        Ps[:k, k:] = -Y
        P = Z @ Ps @ Z.T
    return SpectralSplit(
        peripheral_dim=int(k),
        P_prime=P,
        P_doubleprime=np.eye(n) - P,
        r_prime=(largest + 1.0) / 2.0,
        peripheral_eigenvalues=diag[:k],
        largest_nonperipheral=largest,
    )


# -- nearly-eigenvector sequence --------------------------------------------


@dataclass(frozen=True)
class HarnessEntry:
    """One term: ``(A^p + sin(eps) B) w = lam w`` with ``z = lam w - A^p w``."""

    p: int
    eps: float
    w: np.ndarray
    lam: float
    z: np.ndarray
    Ap_w: np.ndarray
    sin_eps: float
    cos_eps: float
    residual: float
    method: str


@dataclass(frozen=True)
class NearlyEigenSequence:
    entries: tuple
    B: np.ndarray
    f: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    theta: float
    checks: dict
    approximants: Approximants
    metadata: dict = field(default_factory=dict)

    @property
    def B_norm1(self):
        return norm1_op(self.B)


def harness_entry(A, B, C, p, eps, tol=1e-10, start=None, project=None):
    """Solve the perturbed cone eigenproblem for one power ``p``.

    ``eps`` is the residue of ``p theta`` mod ``2 pi``; ``eps = 0`` is allowed
    and reduces to a cone eigenvector of ``A^p``.
    """
    a = np.asarray(A, dtype=float)
    Ap = np.linalg.matrix_power(a, int(p))
    s, c = math.sin(eps), math.cos(eps)
    pair = cone_eigenvector_finite(Ap + s * B, C, tol=tol, start=start, project=project)
    w = pair.vector
    Ap_w = Ap @ w
    z = pair.eigenvalue * w - Ap_w
    return HarnessEntry(int(p), float(eps), w, pair.eigenvalue, z, Ap_w, s, c, pair.residual, pair.method)


def _check_eigen_input(a, u, v, theta, tol=1e-8):
    z = u + 1j * v
    if not np.any(z):
        raise PreconditionError("u + i v must be nonzero")
    lhs = a @ z
    rhs = np.exp(1j * theta) * z
    if np.sum(np.abs(lhs - rhs)) > tol * max(1.0, _norm1(np.abs(z))):
        raise PreconditionError("u + i v is not an eigenvector for e^{i theta}")
    rho = np.abs(np.linalg.eigvals(a)).max()
    if abs(rho - 1.0) > tol:
        raise PreconditionError(f"spectral radius {rho:.12g} is not 1")


def nearly_eigenvector_sequence(A, C, theta, u, v, K, tol=1e-10):
    """Perturbed eigenvectors ``w_k`` of ``A^{p_k} + sin(eps_k) B``.

    ``u + i v`` must be an eigenvector of ``A`` for ``e^{i theta}`` and ``u``
    must not lie in ``-C``. ``B = v_plus f^T / f(u)`` is built from a
    separating positive form ``f`` and the decomposition ``v = v_plus -
    v_minus``. Only powers with ``eps_k`` in ``(0, pi/2)`` are used.

    ``checks`` records, per entry, the identity ``z_k = sin(eps_k) B w_k``
    (a failure here raises), the bound ``||z_k|| <= eps_k ||B||``, the bound
    ``lam_k >= cos(eps_k)``, and membership of
    ``(A^p + sin(eps) B) u - cos(eps) u`` in the cone.
    """
    a = np.asarray(A, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if a.shape != (C.dim, C.dim) or u.size != C.dim or v.size != C.dim:
        raise InputError("dimension mismatch between operator, cone and vectors")
    _check_eigen_input(a, u, v, theta)
    if not preserves(a, C):
        raise ConeError("operator does not map the cone into itself")
    f = separating_functional(C, u)
    v_plus, v_minus = decompose(C, v)
    B = rank_one_B(f, u, v_plus)
    nB = norm1_op(B)

    request = int(K)
    while True:
        approx = rotation_approximants(theta, request + 8)
        usable = [(p, e) for p, e in approx if 0 < e < math.pi / 2]
        if len(usable) >= K or approx.exhausted:
            break
        request *= 2
    usable = usable[: int(K)]
    if not usable:
        raise ConvergenceError("no usable rotation approximants")

    entries = []
    checks = {k: [] for k in ("residual_identity", "residual_bound", "eigenvalue_bound", "lift_in_cone")}
    meta = {}
    for p, eps in usable:
        e = harness_entry(a, B, C, p, eps, tol=tol)
        gap = _norm1(e.z - e.sin_eps * (B @ e.w))
        if gap > 1e-8:
            raise ConvergenceError(f"perturbed eigenpair residual {gap:.3g} at p={p}")
        Ap = np.linalg.matrix_power(a, p)
        lift = (Ap + e.sin_eps * B) @ u - e.cos_eps * u
        checks["residual_identity"].append(gap)
        checks["residual_bound"].append(_norm1(e.z) <= eps * nB * (1 + 1e-9))
        checks["eigenvalue_bound"].append(e.lam >= e.cos_eps - 1e-9)
        checks["lift_in_cone"].append(cone_contains(C, lift, 1e-8 * max(1.0, _norm1(u))))
        meta[p] = {"x_p": e.w, "mu_p": e.lam}
        entries.append(e)
    return NearlyEigenSequence(
        entries=tuple(entries),
        B=B,
        f=f.coefficients,
        v_plus=v_plus,
        v_minus=v_minus,
        theta=float(theta),
        checks=checks,
        approximants=approx,
        metadata=meta,
    )


# -- decay of the non-peripheral part ----------------------------------------


@dataclass(frozen=True)
class DecayReport:
    norms: tuple
    mapped_norms: tuple
    bounds: tuple
    holds: tuple
    threshold_index: int
    rounding_floor: float


def peripheral_decay(split, seq):
    """``||P'' w_k||`` and ``||P'' A^{p_k} w_k||`` against ``r'^{p_k} ||P''||``.

    The mapped norm is the quantity the geometric bound controls; the bound is
    compared with a floor of a few ulps times ``||P''||`` so that rounding in
    ``P''`` itself does not count as a violation. ``threshold_index`` is the
    first ``k`` from which the bound holds for every later term (``None`` if
    the last term fails).
    """
    Pdd = split.P_doubleprime
    nP = norm1_op(Pdd)
    floor = float(64 * np.finfo(float).eps * max(nP, 1.0))
    norms, mapped, bounds, holds = [], [], [], []
    for e in seq.entries:
        nw = _norm1(Pdd @ e.w)
        nm = _norm1(Pdd @ e.Ap_w)
        b = split.r_prime**e.p * nP
        norms.append(nw)
        mapped.append(nm)
        bounds.append(b)
        holds.append(bool(nm <= b + floor))
    threshold = None
    for k in range(len(holds) - 1, -1, -1):
        if not holds[k]:
            break
        threshold = k
    return DecayReport(tuple(norms), tuple(mapped), tuple(bounds), tuple(holds), threshold, floor)


# -- driver -----------------------------------------------------------------


@dataclass(frozen=True)
class ConeSpectralResult:
    """Either ``kind == "ZERO_RADIUS"`` or an eigenpair ``(rho, vector)``."""

    kind: str
    rho: float
    vector: np.ndarray = None
    branch: str = None
    evidence: dict = field(default_factory=dict)
    sequence: NearlyEigenSequence = None
    split: SpectralSplit = None
    decay: DecayReport = None


def _root_of_unity_order(angle, max_order=MAX_ROOT_ORDER, tol=1e-9):
    """Smallest ``q`` with ``q * angle`` a multiple of ``2 pi``, or ``None``."""
    frac = Fraction(angle / (2 * math.pi)).limit_denominator(max_order)
    if abs(float(frac) * 2 * math.pi - angle) <= tol:
        return frac.denominator
    return None


def _oracle_fallback(a, C):
    lam, V = np.linalg.eig(a)
    for k in np.argsort(-np.abs(lam)):
        if abs(lam[k].imag) > 1e-9 * max(1.0, abs(lam[k])):
            continue
        x = V[:, k].real
        for sign in (1.0, -1.0):
            y = sign * x / _norm1(x)
            if cone_contains(C, y, 1e-9):
                return float(lam[k].real), y
    return None


def _finish(a, C, rho, w, tol=1e-8):
    w = w / _norm1(w)
    res = _norm1(a @ w - rho * w)
    if res > tol * rho or not cone_contains(C, w, 1e-9):
        raise HarnessError(
            f"eigenpair check failed (residual {res:.3g})", best=_oracle_fallback(a, C)
        )
    return w, res


def positive_eigenvector_compact(A, C, K=6, gap_hint=1e-3):
    """Either certify spectral radius 0 or return ``(rho, w)`` with ``w`` in
    ``C`` and ``A w = rho w``.

    After scaling to spectral radius 1, peripheral eigenvalues that are all
    roots of unity of order ``q`` are removed by passing to ``A^(2q)``, whose
    cone eigenvector is lifted back by a geometric sum. Otherwise an
    irrational peripheral rotation is handled by the nearly-eigenvector
    sequence, the spectral split and a polished limit.
    """
    a = np.asarray(A, dtype=float)
    n = C.dim
    if a.shape != (n, n):
        raise InputError("operator and cone dimensions differ")
    if not preserves(a, C):
        raise ConeError("operator does not map the cone into itself")
    lam = np.linalg.eigvals(a)
    rho = float(np.abs(lam).max())
    power_norm = norm1_op(np.linalg.matrix_power(a, n))
    if rho < 1e-12 or power_norm <= 1e-12 * max(1.0, norm1_op(a)) ** n:
        return ConeSpectralResult(
            "ZERO_RADIUS", 0.0,
            evidence={"max_eigenvalue_modulus": rho, "norm_A_power_n": power_norm},
        )
    ahat = a / rho
    mu = lam / rho
    peripheral = mu[np.abs(np.abs(mu) - 1) <= 1e-8]
    angles = [float(np.angle(z)) for z in peripheral if abs(np.angle(z)) > 1e-9]
    orders = [_root_of_unity_order(t) for t in angles]
    evidence = {"oracle_rho": rho, "peripheral_angles": sorted(angles)}

    if all(q is not None for q in orders):
        q = math.lcm(*orders) if orders else 1
        p = 2 * q
        pair = cone_eigenvector_finite(np.linalg.matrix_power(ahat, p), C)
        nu = pair.eigenvalue
        if nu <= 0:
            raise HarnessError("power eigenvalue vanished", best=_oracle_fallback(a, C))
        # w = sum_i nu^{(p-1-i)/p} A^i x satisfies A w = nu^{1/p} w
        r = nu ** (1.0 / p)
        w = np.zeros(n)
        y = pair.vector.copy()
        for i in range(p):
            w += r ** (p - 1 - i) * y
            y = ahat @ y
        mu1 = r
        w, res = _finish(a, C, rho * mu1, w)
        evidence.update(power=p, power_eigenvalue=nu)
        return ConeSpectralResult("EIGENPAIR", rho * mu1, w, "power-trick", evidence)

    k = next(i for i, q in enumerate(orders) if q is None)
    theta = abs(angles[k])
    _, V = np.linalg.eig(ahat)
    idx = int(np.argmin(np.abs(np.linalg.eigvals(ahat) - np.exp(1j * theta))))
    z = V[:, idx]
    z = z / np.abs(z).max()
    u, v = z.real, z.imag
    if _norm1(u) < 1e-8:
        u, v = -v, u
    if cone_contains(C, -u, 0.0):
        u, v = -u, -v
    seq = nearly_eigenvector_sequence(ahat, C, theta, u, v, K)
    split = spectral_split(ahat, gap_hint)
    decay = peripheral_decay(split, seq)
    w0 = split.P_prime @ seq.entries[-1].w
    if not cone_contains(C, w0, 1e-8 * _norm1(w0)):
        w0 = seq.entries[-1].w
    try:
        pair = cone_eigenvector_finite(ahat, C, start=w0, project=split.P_prime)
    except (ConvergenceError, PreconditionError) as exc:
        raise HarnessError(f"limit polishing failed: {exc}", best=_oracle_fallback(a, C)) from exc
    if pair.oracle_assisted or abs(pair.eigenvalue - 1.0) > 1e-8:
        raise HarnessError(
            f"limit eigenvalue {pair.eigenvalue:.12g} is not 1", best=_oracle_fallback(a, C)
        )
    w, res = _finish(a, C, rho * pair.eigenvalue, pair.vector)
    evidence.update(theta=theta, limit_method=pair.method)
    return ConeSpectralResult(
        "EIGENPAIR", rho * pair.eigenvalue, w, "harness", evidence, seq, split, decay
    )


# -- built-in scenarios -----------------------------------------------------


def rotation_block(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Scenario:
    name: str
    A: np.ndarray
    cone: ConvexCone
    u: np.ndarray = None
    v: np.ndarray = None
    theta: float = None


def lorentz_rotation(theta=1.0):
    """Rotation by ``theta`` about the axis of the 3-dimensional Lorentz cone."""
    A = np.eye(3)
    A[:2, :2] = rotation_block(theta)
    return Scenario("lorentz-rotation", A, ConvexCone.lorentz(3, axis=2),
                    np.array([1.0, 0.0, 0.0]), np.array([0.0, -1.0, 0.0]), float(theta))


def lorentz_split(theta=1.0, damping=0.5):
    """Rotation by ``theta`` plus a coordinate contracted by ``damping``,
    acting on the 4-dimensional Lorentz cone with the axis fixed."""
    A = np.diag([1.0, 1.0, damping, 1.0])
    A[:2, :2] = rotation_block(theta)
    return Scenario("lorentz-split", A, ConvexCone.lorentz(4, axis=3),
                    np.array([1.0, 0.0, 0.0, 0.0]), np.array([0.0, -1.0, 0.0, 0.0]), float(theta))


def orthant_cycle():
    return Scenario("orthant-cycle", np.array([[0.0, 1.0], [1.0, 0.0]]), ConvexCone.orthant(2))


def nilpotent():
    return Scenario("nilpotent", np.triu(np.ones((3, 3)), 1), ConvexCone.orthant(3))


SCENARIOS = {
    "lorentz-rotation": lorentz_rotation,
    "lorentz-split": lorentz_split,
    "orthant-cycle": orthant_cycle,
    "nilpotent": nilpotent,
}
