import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from pfc.cones import (
    ConeKind,
    ConvexCone,
    PositiveFunctional,
    cone_contains,
    cone_eigenvector_finite,
    decompose,
    preserves,
    rank_one_B,
    separating_functional,
)
from pfc.errors import ConeError, DimensionError, PreconditionError

LORENTZ3 = ConvexCone.lorentz(3, axis=2)
ORTHANT2 = ConvexCone.orthant(2)
# 2-d cone spanned by (1,0) and (1,1): inequalities y >= 0 and x - y >= 0
WEDGE = ConvexCone.polyhedral([[1, 0], [1, 1]], [[0, 1], [1, -1]])


def rotation(theta):
    a = np.eye(3)
    c, s = math.cos(theta), math.sin(theta)
    a[:2, :2] = [[c, -s], [s, c]]
    return a


def lorentz_point(rest, slack):
    rest = np.asarray(rest, dtype=float)
    return np.append(rest, np.linalg.norm(rest) + slack)


vec3 = hnp.arrays(float, 3, elements=st.floats(-5, 5))
cones = st.sampled_from([LORENTZ3, ConvexCone.orthant(3), ConvexCone.lorentz(3, axis=0)])


def cone_points(C, data, k):
    # nonnegative combinations of sample points are members by convexity
    pts = C.sample_points(count=8)
    coef = data.draw(hnp.arrays(float, (k, len(pts)), elements=st.floats(0, 2)))
    return coef @ pts


class TestConstruction:
    def test_polyhedral_consistency(self):
        with pytest.raises(ConeError):
            ConvexCone.polyhedral([[1, 0], [0, 1]], [[1, -1], [0, 1]])

    def test_polyhedral_not_generating(self):
        with pytest.raises(ConeError):
            ConvexCone.polyhedral([[1, 0]], [[1, 0], [0, 1]])

    def test_polyhedral_not_proper(self):
        with pytest.raises(ConeError):
            ConvexCone.polyhedral([[1, 0], [0, 1], [0, -1]], [[1, 0]])

    def test_bad_axis(self):
        with pytest.raises(ConeError):
            ConvexCone.lorentz(3, axis=3)

    def test_orthant_data(self):
        c = ConvexCone.orthant(3)
        assert c.kind is ConeKind.ORTHANT and np.array_equal(c.generators, np.eye(3))

    @pytest.mark.parametrize("C", [LORENTZ3, ORTHANT2, WEDGE])
    def test_interior_point_is_member(self, C):
        assert cone_contains(C, C.interior_point())


class TestMembership:
    @pytest.mark.parametrize(
        "C, x, inside",
        [
            (LORENTZ3, (0, 0, 1), True),
            (LORENTZ3, (1, 0, 0.5), False),
            (ORTHANT2, (0, 0), True),
            (ORTHANT2, (1, -1e-3), False),
            (WEDGE, (2, 1), True),
            (WEDGE, (1, 2), False),
        ],
    )
    def test_examples(self, C, x, inside):
        assert cone_contains(C, x) is inside

    def test_dimension(self):
        with pytest.raises(DimensionError):
            cone_contains(LORENTZ3, (1, 2))

    @settings(max_examples=60)
    @given(cones, st.data(), st.floats(0, 10))
    def test_axioms(self, C, data, t):
        x, y = cone_points(C, data, 2)
        assert cone_contains(C, x + y, 1e-9)
        assert cone_contains(C, t * x, 1e-9)
        if cone_contains(C, -x, 0.0):
            assert np.allclose(x, 0)


class TestDecompose:
    @pytest.mark.parametrize(
        "C, x, plus, minus",
        [
            (ORTHANT2, (1, -2), (1, 0), (0, 2)),
            (LORENTZ3, (0, 1, 0), (0, 1, 1), (0, 0, 1)),
            (LORENTZ3, (0, 0, 0), (0, 0, 0), (0, 0, 0)),
            (WEDGE, (0, 0), (0, 0), (0, 0)),
        ],
    )
    def test_examples(self, C, x, plus, minus):
        p, m = decompose(C, x)
        assert np.allclose(p, plus) and np.allclose(m, minus)

    @settings(max_examples=80)
    @given(st.sampled_from([LORENTZ3, ConvexCone.orthant(3), ConvexCone.lorentz(3, axis=0)]), vec3)
    def test_round_trip(self, C, x):
        p, m = decompose(C, x)
        assert np.allclose(p - m, x, atol=1e-10)
        assert cone_contains(C, p, 1e-9 * (1 + np.abs(x).max())) and cone_contains(C, m, 1e-12)

    @given(hnp.arrays(float, 2, elements=st.floats(-5, 5)))
    def test_polyhedral_round_trip(self, x):
        p, m = decompose(WEDGE, x)
        assert np.allclose(p - m, x, atol=1e-10)
        assert cone_contains(WEDGE, p, 1e-9) and cone_contains(WEDGE, m, 1e-12)


class TestSeparating:
    def test_orthant(self):
        f = separating_functional(ORTHANT2, (1, 0))
        assert np.allclose(f.coefficients, (1, 0)) and f((1, 0)) == 1

    def test_lorentz(self):
        f = separating_functional(LORENTZ3, (1, 0, 0))
        assert f((1, 0, 0)) > 0
        # dual feasibility on the self-dual cone
        assert f.coefficients[2] >= np.linalg.norm(f.coefficients[:2]) - 1e-12

    def test_in_negative_cone(self):
        with pytest.raises(PreconditionError):
            separating_functional(ORTHANT2, (-1, -1))

    def test_functional_validation(self):
        PositiveFunctional((1, 0, 2), LORENTZ3)
        with pytest.raises(ConeError):
            PositiveFunctional((1, 0, 0.5), LORENTZ3)

    @settings(max_examples=80)
    @given(cones, vec3, st.data())
    def test_positive_on_cone(self, C, u, data):
        if cone_contains(C, -u, 0.0):
            return
        f = separating_functional(C, u)
        assert f(u) > 0
        for x in cone_points(C, data, 4):
            assert f(x) >= -1e-9 * (1 + np.abs(x).max())

    @given(hnp.arrays(float, 2, elements=st.floats(-5, 5)))
    def test_polyhedral(self, u):
        if cone_contains(WEDGE, -u, 0.0):
            return
        f = separating_functional(WEDGE, u)
        assert f(u) > 0 and np.all(WEDGE.generators @ f.coefficients >= -1e-12)


class TestRankOne:
    def test_lorentz_example(self):
        f = PositiveFunctional((1, 0, 2), LORENTZ3)
        B = rank_one_B(f, (1, 0, 0), (0, -1, 1))
        assert np.allclose(B, [[0, 0, 0], [-1, 0, -2], [1, 0, 2]])
        assert np.allclose(B @ (1, 0, 0), (0, -1, 1))

    def test_zero_v(self):
        f = PositiveFunctional((1, 0, 2), LORENTZ3)
        assert not rank_one_B(f, (1, 0, 0), (0, 0, 0)).any()

    def test_orthant_example(self):
        B = rank_one_B(PositiveFunctional((1, 1), ORTHANT2), (1, 1), (1, 0))
        assert np.allclose(B, 0.5 * np.array([[1, 1], [0, 0]]))

    def test_nonpositive_f_u(self):
        with pytest.raises(PreconditionError):
            rank_one_B(PositiveFunctional((1, 0), ORTHANT2), (0, 1), (1, 0))

    def test_v_plus_outside_cone(self):
        with pytest.raises(PreconditionError):
            rank_one_B(PositiveFunctional((1, 0), ORTHANT2), (1, 0), (-1, 0))

    @settings(max_examples=40)
    @given(st.data())
    def test_positivity(self, data):
        C = LORENTZ3
        u = data.draw(vec3.filter(lambda u: not cone_contains(C, -u, 0.0)))
        f = separating_functional(C, u)
        v_plus = cone_points(C, data, 1)[0]
        B = rank_one_B(f, u, v_plus)
        for c in cone_points(C, data, 4):
            assert cone_contains(C, B @ c, 1e-9 * (1 + np.abs(B @ c).max()))
        assert preserves(B, C)


class TestConeEigenvector:
    def test_positive_matrix(self):
        p = cone_eigenvector_finite(np.ones((2, 2)), ORTHANT2)
        assert p.eigenvalue == pytest.approx(2) and np.allclose(p.vector, 0.5)

    def test_identity_lorentz(self):
        p = cone_eigenvector_finite(np.eye(3), LORENTZ3)
        assert p.eigenvalue == pytest.approx(1) and np.allclose(p.vector, (0, 0, 1))

    @pytest.mark.parametrize("start", [None, (0.5, 0.3, 1.0), (-0.9, 0.1, 1.0)])
    def test_rotation_fixes_axis(self, start):
        p = cone_eigenvector_finite(rotation(1.0), LORENTZ3, start=start)
        assert p.eigenvalue == pytest.approx(1, abs=1e-10)
        assert np.allclose(p.vector, (0, 0, 1), atol=1e-8) and not p.oracle_assisted

    def test_kernel_vector(self):
        p = cone_eigenvector_finite(np.triu(np.ones((3, 3)), 1), ConvexCone.orthant(3))
        assert p.eigenvalue == 0 and p.method == "kernel"
        assert np.allclose(np.triu(np.ones((3, 3)), 1) @ p.vector, 0)

    def test_lorentz_kernel_vector(self):
        # projection onto the boundary ray (0, 1, 1) annihilates (0, -1, 1)
        T = 0.5 * np.outer((0, 1, 1), (0, 1, 1))
        p = cone_eigenvector_finite(T, LORENTZ3)
        assert cone_contains(LORENTZ3, p.vector, 1e-9)
        assert np.allclose(T @ p.vector, p.eigenvalue * p.vector, atol=1e-10)

    def test_not_preserving(self):
        with pytest.raises(ConeError):
            cone_eigenvector_finite(-np.eye(2), ORTHANT2)

    def test_cycle_orbit(self):
        p = cone_eigenvector_finite(np.array([[0.0, 1.0], [1.0, 0.0]]), ORTHANT2, start=(1, 0))
        assert p.eigenvalue == pytest.approx(1) and np.allclose(p.vector, 0.5)

    def test_polyhedral(self):
        T = np.array([[1.0, 0.5], [0.0, 0.5]])  # maps (1,0)->(1,0), (1,1)->(1.5,0.5)
        p = cone_eigenvector_finite(T, WEDGE)
        assert cone_contains(WEDGE, p.vector, 1e-9)
        assert p.eigenvalue == pytest.approx(1) and np.allclose(p.vector, (1, 0), atol=1e-8)

    @settings(max_examples=60)
    @given(st.integers(1, 6).flatmap(lambda n: hnp.arrays(float, (n, n), elements=st.floats(0, 3))))
    def test_orthant_random(self, a):
        n = a.shape[0]
        p = cone_eigenvector_finite(a, ConvexCone.orthant(n))
        rho = float(np.max(np.abs(np.linalg.eigvals(a))))
        assert np.all(p.vector >= -1e-12)
        assert np.sum(np.abs(a @ p.vector - p.eigenvalue * p.vector)) <= 1e-8 * max(1, rho)
        assert p.eigenvalue <= rho * (1 + 1e-9) + 1e-12

    @settings(max_examples=40)
    @given(st.floats(0.05, 3.0), st.floats(0.1, 0.9), st.floats(0, 2))
    def test_lorentz_boost_and_rotation(self, theta, damp, boost):
        # a hyperbolic boost preserves the cone; its dominant eigenvector is a boundary ray
        ch, sh = math.cosh(boost), math.sinh(boost)
        L = np.array([[ch, 0, sh], [0, 1, 0], [sh, 0, ch]])
        T = L @ np.diag([damp, damp, 1.0])
        if not preserves(T, LORENTZ3):
            return
        p = cone_eigenvector_finite(T, LORENTZ3)
        assert cone_contains(LORENTZ3, p.vector, 1e-8)
        assert np.sum(np.abs(T @ p.vector - p.eigenvalue * p.vector)) <= 1e-8 * max(1, p.eigenvalue)


class TestPreserves:
    def test_rotation(self):
        assert preserves(rotation(0.7), LORENTZ3)

    def test_reflection_of_axis(self):
        assert not preserves(np.diag([1, 1, -1]), LORENTZ3)

    def test_polyhedral_exact(self):
        assert preserves(np.eye(2), WEDGE)
        assert not preserves(np.array([[0, 1], [1, 0]]), WEDGE)
