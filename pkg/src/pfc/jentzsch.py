"""Positive integral kernels on [0, 1] by Nystrom discretization.

The operator ``(K f)(s) = int_0^1 k(s, t) f(t) dt`` becomes the matrix
``K_ij = k(s_i, t_j) w_j`` for a quadrature rule with nodes ``s_i`` and
weights ``w_j``. The matrix is deliberately left nonsymmetric.

Kernel positivity can only be checked at the sampled nodes; a positive
verdict here says nothing about the kernel between them.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError, KernelError
from .matrix import NonnegativeMatrix
from .perron import perron_irreducible
from .structure import is_irreducible


@dataclass(frozen=True)
class Kernel:
    """Kernel ``k(s, t) >= 0`` evaluated elementwise on broadcast arrays."""

    evaluator: Callable
    strictly_positive_claimed: bool = True
    description: str = ""

    def __call__(self, s, t):
        return np.broadcast_to(np.asarray(self.evaluator(s, t), dtype=float), np.broadcast(s, t).shape)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float).reshape(-1)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if nodes.size == 0 or nodes.shape != weights.shape:
            raise InputError("nodes and weights must be nonempty and of equal length")
        if np.any(nodes < 0) or np.any(nodes > 1):
            raise InputError("nodes must lie in [0, 1]")
        if np.any(np.diff(nodes) <= 0):
            raise InputError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise InputError("weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InputError(f"weights sum to {float(weights.sum())!r}, not 1")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self):
        return self.nodes.size


@dataclass(frozen=True)
class JentzschReport:
    rho: float
    eigenfunction: np.ndarray
    min_eigenfunction: float
    gap_ratio: float
    simple: bool
    nodes: np.ndarray = None


def gauss_legendre(n):
    """Gauss-Legendre rule mapped to [0, 1], weights renormalized to sum 1."""
    if not 1 <= n <= 512:
        raise InputError(f"quadrature size {n} outside [1, 512]")
    x, w = np.polynomial.legendre.leggauss(n)
    w = w / w.sum()
    return QuadratureRule((x + 1) / 2, w)


def const_kernel(c=1.0):
    c = float(c)
    return Kernel(lambda s, t: np.full(np.broadcast(s, t).shape, c), c > 0, f"const:{c:g}")


def poly_kernel(*coeffs):
    """Separable kernel ``sum_k c_k (s t)^k``; ``poly_kernel(1, 1)`` is ``1 + st``."""
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        raise InputError("poly kernel needs at least one coefficient")

    def k(s, t):
        st = np.multiply(s, t)
        return sum(c * st**i for i, c in enumerate(coeffs))

    positive = coeffs[0] > 0 and all(c >= 0 for c in coeffs)
    return Kernel(k, positive, "poly:" + ",".join(f"{c:g}" for c in coeffs))


def exp_kernel(a=1.0):
    """``exp(a s t)``."""
    a = float(a)
    return Kernel(lambda s, t: np.exp(a * np.multiply(s, t)), True, f"exp:{a:g}")


def _samples(kernel, rule):
    s = rule.nodes[:, None]
    t = rule.nodes[None, :]
    return np.array(kernel(s, t), dtype=float)


def discretize(kernel, rule):
    """Nystrom matrix ``k(s_i, t_j) w_j``; negative samples are rejected."""
    vals = _samples(kernel, rule)
    neg = vals < 0
    if neg.any():
        i, j = np.argwhere(neg)[0]
        point = (float(rule.nodes[i]), float(rule.nodes[j]))
        raise KernelError(f"kernel is negative at (s, t) = {point}", point=point)
    return NonnegativeMatrix(vals * rule.weights[None, :])


def jentzsch_analyze(kernel, rule):
    """Dominant eigenvalue, node-wise eigenfunction, simplicity and the
    peripheral gap ``|lambda_2| / rho`` of a strictly positive kernel.

    The eigenfunction is scaled to unit mean with respect to the rule.
    """
    vals = _samples(kernel, rule)
    if not np.all(vals > 0):
        i, j = np.argwhere(~(vals > 0))[0]
        point = (float(rule.nodes[i]), float(rule.nodes[j]))
        raise KernelError(f"kernel is not strictly positive at (s, t) = {point}", point=point)
    K = discretize(kernel, rule)
    cert = perron_irreducible(K)
    moduli = np.sort(np.abs(np.linalg.eigvals(K.entries)))[::-1]
    gap = float(moduli[1] / moduli[0]) if moduli.size > 1 else 0.0
    f = cert.vector.coords / float(cert.vector.coords @ rule.weights)
    return JentzschReport(
        rho=cert.rho,
        eigenfunction=f,
        min_eigenfunction=float(f.min()),
        gap_ratio=gap,
        simple=bool(cert.simplicity.simple),
        nodes=rule.nodes,
    )


@dataclass(frozen=True)
class SchaeferVerdict:
    irreducible: bool
    violating_split: frozenset = None


def schaefer_check(A):
    """Discrete Schaefer condition: every nontrivial split ``S`` carries
    positive mass ``sum_{i not in S, j in S} a_ij``.

    This is exactly strong connectivity of the support digraph. A violating
    ``S`` is the set of indices that can reach index 0, or when that is
    everything, the complement of what index 0 reaches.
    """
    M = NonnegativeMatrix(A)
    if is_irreducible(M).irreducible:
        return SchaeferVerdict(True, None)
    s = M.entries > 0
    n = M.n
    back = np.zeros(n, dtype=bool)
    back[0] = True
    frontier = [0]
    while frontier:
        j = frontier.pop()
        for i in np.flatnonzero(s[:, j] & ~back):
            back[i] = True
            frontier.append(int(i))
    if back.all():
        fwd = np.zeros(n, dtype=bool)
        fwd[0] = True
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for j in np.flatnonzero(s[i] & ~fwd):
                fwd[j] = True
                frontier.append(int(j))
        back = ~fwd
    return SchaeferVerdict(False, frozenset(int(i) for i in np.flatnonzero(back)))


@dataclass(frozen=True)
class RefinementStudy:
    levels: tuple
    differences: tuple
    monotone: bool


def refine_study(kernel, sizes):
    """``rho`` under Gauss-Legendre refinement, with successive differences."""
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise InputError("sizes must be nonempty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InputError("sizes must be strictly increasing")
    levels = tuple((n, jentzsch_analyze(kernel, gauss_legendre(n)).rho) for n in sizes)
    diffs = tuple(abs(b[1] - a[1]) for a, b in zip(levels, levels[1:]))
    monotone = all(d2 <= d1 for d1, d2 in zip(diffs, diffs[1:]))
    return RefinementStudy(levels, diffs, monotone)
