"""Combinatorial structure of nonnegative matrices.

All verdicts depend only on the zero pattern ``a_ij > 0`` of the stored
entries, read as the digraph with an edge ``i -> j`` whenever ``a_ij > 0``.
"""

from collections import deque
from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import IrreducibleError, ReducibleError
from .matrix import NonnegativeMatrix


@dataclass(frozen=True)
class IrreducibilityReport:
    irreducible: bool
    method_agreement: bool
    support_growth: tuple
    witness: frozenset


@dataclass(frozen=True)
class CyclicStructure:
    period: int
    classes: tuple
    permutation: tuple


def _support(A):
    return NonnegativeMatrix(A).entries > 0


def _reach(adj, start):
    """Indices reachable from ``start`` (inclusive) along ``adj``."""
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    frontier = seen
    while frontier.any():
        frontier = adj[frontier].any(axis=0) & ~seen
        seen |= frontier
    return seen


def _bool_mul(a, b):
    # 0/1 operands keep float sums exact well past n = 512
    return (a.astype(float) @ b.astype(float)) > 0


def _bool_power(a, k):
    n = a.shape[0]
    result = np.eye(n, dtype=bool)
    base = a.copy()
    while k:
        if k & 1:
            result = _bool_mul(result, base)
        k >>= 1
        if k:
            base = _bool_mul(base, base)
    return result


def boolean_power_test(A):
    """``(I + A)^(n-1) > 0`` evaluated in saturating boolean arithmetic."""
    return _power_test(_support(A))


def _power_test(s):
    # with I on the diagonal the support of (I + A)^k only grows and is
    # stable from k = n - 1 on, so squaring past n - 1 gives the same answer
    n = s.shape[0]
    m = (s | np.eye(n, dtype=bool)).astype(float)
    k = 1
    while k < n - 1:
        m = ((m @ m) > 0).astype(float)
        k *= 2
    return bool(np.all(m > 0))


def _row_masks(s):
    """Rows of a boolean matrix as Python int bitsets (bit ``j`` = column ``j``)."""
    packed = np.packbits(s, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask_reach(masks, start):
    seen = frontier = 1 << start
    while frontier:
        nxt = 0
        for i in _bits(frontier):
            nxt |= masks[i]
        frontier = nxt & ~seen
        seen |= frontier
    return seen


def _support_growth(in_masks, n):
    # (I + A) x: coordinate i lights up when some a_ij > 0 with x_j > 0
    x = 1
    sizes = [1]
    for _ in range(n - 1):
        for j in _bits(x):
            x |= in_masks[j]
        sizes.append(x.bit_count())
    return tuple(sizes)


def is_irreducible(A):
    """Strong connectivity of the support digraph, cross-checked against
    the boolean test ``(I + A)^(n-1) > 0``.

    For a reducible matrix the witness is a proper nonempty index set ``S``
    closed under the digraph, i.e. ``a_ij = 0`` for every ``i`` in ``S`` and
    ``j`` outside it.
    """
    s = _support(A)
    n = s.shape[0]
    full = (1 << n) - 1
    out_masks, in_masks = _row_masks(s), _row_masks(s.T)
    fwd = _mask_reach(out_masks, 0)
    witness = frozenset()
    if fwd != full:
        witness = frozenset(_bits(fwd))
    else:
        bwd = _mask_reach(in_masks, 0)
        if bwd != full:
            witness = frozenset(_bits(full & ~bwd))
    irreducible = not witness
    return IrreducibilityReport(
        irreducible=irreducible,
        method_agreement=irreducible == _power_test(s),
        support_growth=_support_growth(in_masks, n),
        witness=witness,
    )


def _levels(s):
    n = s.shape[0]
    level = np.full(n, -1)
    level[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(s[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
    return level


def _require_irreducible(A):
    if not is_irreducible(A).irreducible:
        raise ReducibleError("matrix is reducible")


def period(A):
    """Period of an irreducible matrix: gcd of ``level(u) + 1 - level(v)``
    over all edges ``u -> v``, with BFS levels measured from index 0.

    The 1x1 zero matrix has no cycles at all; it is assigned period 1.
    """
    _require_irreducible(A)
    s = _support(A)
    level = _levels(s)
    g = 0
    for u, v in zip(*np.nonzero(s)):
        g = gcd(g, abs(int(level[u]) + 1 - int(level[v])))
    return g or 1


def cyclic_normal_form(A):
    """Frobenius cyclic classes of an irreducible matrix.

    Class ``j`` holds the indices whose BFS level is ``j mod m``. Permuting
    rows and columns by the concatenated classes leaves nonzero entries only
    in the blocks ``(j, j+1 mod m)``.
    """
    m = period(A)
    s = _support(A)
    n = s.shape[0]
    if m == 1:
        return CyclicStructure(1, (tuple(range(n)),), tuple(range(n)))
    cls = _levels(s) % m
    classes = tuple(tuple(int(i) for i in np.flatnonzero(cls == j)) for j in range(m))
    perm = tuple(i for c in classes for i in c)
    for u, v in zip(*np.nonzero(s)):
        if cls[v] != (cls[u] + 1) % m:
            raise AssertionError("cyclic block property violated")
    return CyclicStructure(m, classes, perm)


def strongly_connected_components(s):
    """Tarjan's algorithm on a boolean adjacency matrix (iterative)."""
    n = s.shape[0]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack, comps = [], []
    counter = 0
    succ = [list(map(int, np.flatnonzero(s[u]))) for u in range(n)]
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            u, i = work.pop()
            if i == 0:
                index[u] = low[u] = counter
                counter += 1
                stack.append(u)
                on_stack[u] = True
            recurse = False
            while i < len(succ[u]):
                v = succ[u][i]
                i += 1
                if index[v] < 0:
                    work.append((u, i))
                    work.append((v, 0))
                    recurse = True
                    break
                if on_stack[v]:
                    low[u] = min(low[u], index[v])
            if recurse:
                continue
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == u:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
    return comps


def reducible_block_form(A):
    """Permutation to block upper-triangular form with irreducible diagonal
    blocks, plus the block sizes in order.

    Components of the condensation are laid out in a topological order
    (ties broken by smallest index), so every edge runs from an earlier
    block to the same or a later one and the lower-left part is zero.
    """
    s = _support(A)
    n = s.shape[0]
    if n < 2 or is_irreducible(A).irreducible:
        raise IrreducibleError("matrix is irreducible; no reducible block form")
    comps = strongly_connected_components(s)
    label = np.empty(n, dtype=int)
    for c, members in enumerate(comps):
        label[members] = c
    k = len(comps)
    indeg = [0] * k
    out = [set() for _ in range(k)]
    for u, v in zip(*np.nonzero(s)):
        a, b = label[u], label[v]
        if a != b and b not in out[a]:
            out[a].add(b)
            indeg[b] += 1
    ready = sorted((comps[c][0], c) for c in range(k) if indeg[c] == 0)
    order = []
    while ready:
        _, c = ready.pop(0)
        order.append(c)
        for d in out[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append((comps[d][0], d))
                ready.sort()
    perm = tuple(i for c in order for i in comps[c])
    sizes = tuple(len(comps[c]) for c in order)
    return perm, sizes


def is_primitive(A):
    """Return ``(primitive, exponent)`` with the least ``k`` making
    ``A^k > 0``, or ``(False, None)``.

    The search stops at Wielandt's bound ``n^2 - 2n + 2``.
    """
    s = _support(A)
    n = s.shape[0]
    if n == 1:
        return (True, 1) if s[0, 0] else (False, None)
    if not is_irreducible(A).irreducible or period(A) != 1:
        return False, None
    bound = n * n - 2 * n + 2
    p = s.copy()
    for k in range(1, bound + 1):
        if p.all():
            return True, k
        p = _bool_mul(p, s)
    return False, None
