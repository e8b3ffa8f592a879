import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import leibniz_det, spectral_radius, strongly_connected
from pfc.errors import ConvergenceError, InputError, PreconditionError, ReducibleError
from pfc.perron import (
    DOMINATED_EQ_RADIUS,
    DOMINATED_STRICT,
    NOT_DOMINATED,
    collatz_wielandt,
    dominance_compare,
    improve_bound,
    is_nilpotent,
    krein_rutman_lower,
    perron_fixed_point,
    perron_irreducible,
    simplicity_check,
)

CYCLE2 = np.array([[0.0, 1.0], [1.0, 0.0]])
ONES = np.ones((2, 2))
SWAP_SCALED = np.array([[0.0, 2.0], [3.0, 0.0]])


def random_nonneg(draw_n=st.integers(1, 7)):
    return draw_n.flatmap(
        lambda n: hnp.arrays(float, (n, n), elements=st.one_of(st.just(0.0), st.floats(0.01, 5)))
    )


class TestCollatzWielandt:
    @pytest.mark.parametrize(
        "a, x, expected",
        [
            (ONES, (0.5, 0.5), (2, 2)),
            (CYCLE2, (0.25, 0.75), (1 / 3, 3)),
            (np.eye(3), (0.2, 0.3, 0.5), (1, 1)),
        ],
    )
    def test_examples(self, a, x, expected):
        assert collatz_wielandt(a, x) == pytest.approx(expected)

    def test_zero_coordinate_with_mass_is_infinite(self):
        assert collatz_wielandt(CYCLE2, (1, 0)) == (0.0, math.inf)

    def test_zero_zero_coordinate_skipped(self):
        assert collatz_wielandt(np.diag([2.0, 0.0]), (1, 0)) == (2.0, 2.0)

    def test_zero_vector(self):
        with pytest.raises(InputError):
            collatz_wielandt(ONES, (0, 0))

    @settings(max_examples=80)
    @given(random_nonneg().filter(strongly_connected), st.data())
    def test_sandwich(self, a, data):
        x = data.draw(hnp.arrays(float, a.shape[0], elements=st.floats(0.01, 1)))
        lo, hi = collatz_wielandt(a, x)
        rho = spectral_radius(a)
        assert lo <= rho * (1 + 1e-10) + 1e-12 and rho <= hi * (1 + 1e-10) + 1e-12


class TestFixedPoint:
    def test_nilpotent(self):
        c = perron_fixed_point([[0, 1], [0, 0]])
        assert c.rho == 0 and c.nilpotent
        assert np.allclose(np.array([[0, 1], [0, 0]]) @ c.vector.coords, 0)

    def test_scaled_swap(self):
        c = perron_fixed_point(SWAP_SCALED)
        assert c.rho == pytest.approx(math.sqrt(6), abs=1e-9)
        assert np.allclose(c.vector.coords, (0.44949, 0.55051), atol=1e-5)

    def test_ones(self):
        c = perron_fixed_point(ONES)
        assert c.rho == pytest.approx(2) and np.allclose(c.vector.coords, 0.5)

    def test_budget_exhaustion_flagged(self):
        c = perron_fixed_point([[0, 1], [1, 1]], tol=1e-300, max_iter=3)
        assert not c.converged and c.iterations == 3

    @settings(max_examples=120)
    @given(random_nonneg())
    def test_certificate(self, a):
        c = perron_fixed_point(a)
        rho = spectral_radius(a)
        assert c.converged
        assert c.residual <= 1e-10
        assert abs(c.rho - rho) <= 1e-8 * max(1, rho)
        assert np.all(c.vector.coords >= 0) and c.vector.norm1 == pytest.approx(1)
        assert c.cw_lower <= c.rho + 1e-12 * max(1, c.rho) and c.rho <= c.cw_upper + 1e-12 * max(1, c.rho)

    def test_defective_root(self):
        # Jordan block at 1: plain iteration converges like 1/k
        a = np.zeros((4, 4))
        a[:2, :2] = [[1, 1], [0, 1]]
        c = perron_fixed_point(a)
        assert c.rho == pytest.approx(1, abs=1e-12) and c.residual <= 1e-10

    @settings(max_examples=60)
    @given(random_nonneg(), st.data())
    def test_monotone_in_matrix(self, a1, data):
        extra = data.draw(hnp.arrays(float, a1.shape, elements=st.floats(0, 2)))
        r1 = perron_fixed_point(a1).rho
        r2 = perron_fixed_point(a1 + extra).rho
        assert r1 <= r2 + 1e-10 * max(1, r2)


class TestIsNilpotent:
    @pytest.mark.parametrize(
        "a, expected", [(np.triu(np.ones((3, 3)), 1), True), (CYCLE2, False), ([[0]], True)]
    )
    def test_examples(self, a, expected):
        assert is_nilpotent(a) == expected


class TestImproveBound:
    def test_cycle(self):
        y, r = improve_bound(CYCLE2, (1, 0), 0)
        assert np.allclose(y.coords, 0.5) and r == pytest.approx(1)

    def test_ones(self):
        # (I + A) x = (2, 1); ratios of A y = (1, 1) over y = (2/3, 1/3)
        y, r = improve_bound(ONES, (1, 0), 1)
        assert np.allclose(y.coords, (2 / 3, 1 / 3)) and r == pytest.approx(1.5)

    def test_scaled_swap(self):
        _, r = improve_bound(SWAP_SCALED, (1, 0), 0)
        assert r > 0

    def test_eigenvector_rejected(self):
        with pytest.raises(PreconditionError):
            improve_bound(ONES, (0.5, 0.5), 2)

    def test_violated_inequality(self):
        with pytest.raises(PreconditionError):
            improve_bound(ONES, (1, 0), 5)

    def test_reducible(self):
        with pytest.raises(ReducibleError):
            improve_bound(np.eye(2), (1, 0), 0)

    @settings(max_examples=50)
    @given(random_nonneg(st.integers(2, 6)).filter(strongly_connected), st.data())
    def test_monotone_chain(self, a, data):
        x = data.draw(hnp.arrays(float, a.shape[0], elements=st.floats(0.01, 1)))
        r = collatz_wielandt(a, x)[0]
        rho = spectral_radius(a)
        for _ in range(4):
            try:
                y, r_new = improve_bound(a, x, r)
            except PreconditionError:
                break  # reached the eigenvector up to rounding
            assert r < r_new <= rho * (1 + 1e-9)
            x, r = y.coords, r_new


class TestIrreducible:
    @pytest.mark.parametrize(
        "a, rho, vec",
        [
            (CYCLE2, 1.0, (0.5, 0.5)),
            (np.roll(np.eye(3), 1, axis=1), 1.0, (1 / 3,) * 3),
            ([[0, 1], [1, 1]], (1 + math.sqrt(5)) / 2, None),
        ],
    )
    def test_examples(self, a, rho, vec):
        c = perron_irreducible(a)
        assert c.rho == pytest.approx(rho, abs=1e-10)
        if vec is not None:
            assert np.allclose(c.vector.coords, vec)
        assert c.strictly_positive and c.simplicity.simple

    def test_reducible(self):
        with pytest.raises(ReducibleError):
            perron_irreducible(np.eye(2))

    def test_positivity_failure_is_convergence_error(self):
        # an irreducible matrix whose Perron vector has a coordinate ~1e-15
        a = np.array([[1.0, 1e-15], [1e-30, 1e-30]])
        with pytest.raises(ConvergenceError) as exc:
            perron_irreducible(a)
        assert exc.value.best is not None


class TestSimplicity:
    @pytest.mark.parametrize(
        "a, rho, summands, simple",
        [(ONES, 2, (1, 1), True), (np.eye(2), 1, (0, 0), False), (CYCLE2, 1, (1, 1), True)],
    )
    def test_examples(self, a, rho, summands, simple):
        r = simplicity_check(a, rho)
        assert r.summand_values == pytest.approx(summands)
        assert r.derivative_value == pytest.approx(sum(summands))
        assert r.simple == simple

    def test_negative_rho(self):
        with pytest.raises(PreconditionError):
            simplicity_check(ONES, -1)

    @settings(max_examples=60)
    @given(random_nonneg(st.integers(1, 6)))
    def test_summands_match_expansion(self, a):
        rho = spectral_radius(a)
        r = simplicity_check(a, rho)
        n = a.shape[0]
        for j in range(n):
            sub = np.delete(np.delete(a, j, 0), j, 1)
            ref = leibniz_det(rho * np.eye(n - 1) - sub)
            assert r.summand_values[j] == pytest.approx(ref, rel=1e-8, abs=1e-8 * max(1, rho) ** n)
        assert r.derivative_value == pytest.approx(sum(r.summand_values), rel=1e-9, abs=1e-12)


class TestDominance:
    def test_rotation_equal_radius(self):
        r = dominance_compare([[0, 1], [-1, 0]], CYCLE2)
        assert r.verdict == DOMINATED_EQ_RADIUS and r.abs_equals_M and r.peripheral_vectors_ok

    @pytest.mark.parametrize("b", [np.zeros((2, 2)), 0.5 * CYCLE2])
    def test_strict(self, b):
        assert dominance_compare(b, CYCLE2).verdict == DOMINATED_STRICT

    def test_not_dominated(self):
        assert dominance_compare(2 * CYCLE2, CYCLE2).verdict == NOT_DOMINATED

    def test_reducible_m(self):
        with pytest.raises(ReducibleError):
            dominance_compare(np.eye(2), np.eye(2))


class TestKreinRutmanLower:
    def test_cycle_power_two(self):
        mu, w = krein_rutman_lower(CYCLE2, (0.5, 0.5), 2, 1.0)
        assert mu == pytest.approx(1) and np.allclose(w.coords, 0.5)

    def test_eigenvector_start(self):
        mu, _ = krein_rutman_lower(ONES, (0.5, 0.5), 1, 2.0)
        assert mu == pytest.approx(2)

    def test_scaled_swap(self):
        x = np.array([2.0, math.sqrt(6)])
        mu, w = krein_rutman_lower(SWAP_SCALED, x / x.sum(), 1, 2.0)
        assert mu == pytest.approx(math.sqrt(6), abs=1e-9) and mu >= 2

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            krein_rutman_lower(CYCLE2, (1, 0), 1, 1.0)

    @settings(max_examples=40)
    @given(random_nonneg(st.integers(1, 5)), st.integers(1, 4))
    def test_eigenpair(self, a, p):
        rho = spectral_radius(a)
        if rho < 1e-6:
            return
        c = perron_fixed_point(a)
        lam = 0.9 * rho
        x = np.asarray(c.vector.coords)
        if np.any(np.linalg.matrix_power(a, p) @ x - lam**p * x < -1e-12):
            return
        mu, w = krein_rutman_lower(a, x, p, lam)
        assert mu >= lam - 1e-9
        assert np.sum(np.abs(a @ w.coords - mu * w.coords)) <= 1e-7 * max(1, mu)
