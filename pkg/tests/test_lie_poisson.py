import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import CIRCULAR, ELLIPTIC, HYPERBOLIC
from superkepler.kepler import hamiltonian
from superkepler.lie_poisson import (DarbouxPoint, angle_distance, casimir, casimir_observable,
                                     coadjoint_fields, darboux_forward, darboux_inverse, lie_poisson_bracket,
                                     momentum_map, momentum_map_array, quadratic_casimir,
                                     verify_darboux_bracket, x1, x2, x3)
from superkepler.phase import DomainError, poisson_bracket
from superkepler.structure import StructureConstants, generators

SO3, SO21 = StructureConstants.of("so3"), StructureConstants.of("so21")
coord = st.floats(-3, 3, allow_nan=False)


class TestBracketExamples:
    def test_so3_coordinates(self):
        assert lie_poisson_bracket(SO3, x1, x2, np.array([0.0, 0.0, -1.0])) == -1.0

    def test_so21_coordinates(self):
        assert lie_poisson_bracket(SO21, x1, x2, np.array([0.0, 2.0, 1.0])) == -1.0

    @given(coord, coord, coord)
    def test_quadratic_casimir_is_central(self, a, b, c):
        x = np.array([a, b, c])
        for alg, cst in (("so3", SO3), ("so21", SO21)):
            for g in (x1, x2, x3):
                assert abs(lie_poisson_bracket(cst, quadratic_casimir(alg), g, x)) <= 1e-12 * (1 + x @ x)


class TestCasimir:
    def test_examples(self):
        assert casimir("so3", [0.0, 0.0, -1.0]) == -0.5
        assert casimir("so3", [0.0, 0.0, 3.0]) == pytest.approx(-1 / 18)
        assert casimir("so21", [0.0, 2.0, math.sqrt(3.0)]) == pytest.approx(0.5)

    @pytest.mark.parametrize("alg, cst, fixture", [("so3", SO3, "so3_points"), ("so21", SO21, "so21_points")])
    def test_casimir_brackets_vanish_at_samples(self, alg, cst, fixture, request):
        xs = momentum_map_array(alg, request.getfixturevalue(fixture))
        c = casimir_observable(alg)
        for g in (x1, x2, x3):
            assert np.abs(lie_poisson_bracket(cst, c, g, xs)).max() <= 1e-9

    @pytest.mark.parametrize("alg, fixture", [("so3", "so3_points"), ("so21", "so21_points")])
    def test_coadjoint_fields_preserve_casimir(self, alg, fixture, request):
        xs = momentum_map_array(alg, request.getfixturevalue(fixture))
        c = casimir_observable(alg)
        for x in xs[:300]:
            derivs = coadjoint_fields(alg, x) @ c.grad(x)
            assert np.abs(derivs).max() <= 1e-9


class TestMomentumMap:
    def test_circular(self):
        x = momentum_map("so3", CIRCULAR)
        np.testing.assert_allclose(x.array, [0, 0, -1], atol=1e-15)
        assert casimir("so3", x.array) == pytest.approx(-0.5)

    def test_hyperbolic(self):
        x = momentum_map("so21", HYPERBOLIC)
        np.testing.assert_allclose(x.array, [-3 / math.sqrt(2), 0, -2], atol=1e-14)
        assert casimir("so21", x.array) == pytest.approx(1.0)

    def test_elliptic(self):
        x = momentum_map("so3", ELLIPTIC)
        np.testing.assert_allclose(x.array, [0.57735026918962573, 0, -1], atol=1e-14)
        assert casimir("so3", x.array) == pytest.approx(-0.375)

    @pytest.mark.parametrize("alg, fixture", [("so3", "so3_points"), ("so21", "so21_points")])
    def test_casimir_pulls_back_to_hamiltonian(self, alg, fixture, request):
        z = request.getfixturevalue(fixture)
        diff = casimir(alg, momentum_map_array(alg, z)) - hamiltonian()(z)
        assert np.abs(diff).max() <= 1e-10

    @pytest.mark.parametrize("alg, fixture", [("so3", "so3_points"), ("so21", "so21_points")])
    def test_poisson_morphism(self, alg, fixture, request):
        z = request.getfixturevalue(fixture)
        fs = generators(alg)
        xs = momentum_map_array(alg, z)
        cst = StructureConstants.of(alg)
        coords = (x1, x2, x3)
        for i in range(3):
            for j in range(3):
                lhs = poisson_bracket(fs[i], fs[j], z)
                rhs = lie_poisson_bracket(cst, coords[i], coords[j], xs)
                assert np.abs(lhs - rhs).max() <= 1e-9

    def test_wrong_region(self):
        with pytest.raises(DomainError):
            momentum_map("so3", HYPERBOLIC)

    def test_components_are_tracked(self):
        assert momentum_map("so3", CIRCULAR).component == -1
        assert momentum_map("so3", CIRCULAR * np.array([1, 1, 1, -1])).component == 1


class TestDarbouxChart:
    def test_so3_forward(self):
        d = darboux_forward("so3", [0.0, 0.0, -1.0])
        assert (d.I, d.x1) == (-0.5, 0.0)
        assert d.angle == pytest.approx(math.pi)

    def test_so3_boundary_rejected(self):
        with pytest.raises(DomainError):
            darboux_forward("so3", [0.0, 1.0, 0.0])
        with pytest.raises(DomainError):
            DarbouxPoint("so3", -0.5, 0.0, math.pi / 2)

    def test_so21_forward(self):
        d = darboux_forward("so21", [0.0, 2.0, math.sqrt(3.0)])
        assert d.I == pytest.approx(0.5)
        assert d.angle == pytest.approx(math.asinh(math.sqrt(3.0)), abs=1e-14)
        assert d.angle == pytest.approx(1.31696, abs=1e-5)
        assert d.branch == 1

    def test_so21_outside_chart(self):
        with pytest.raises(DomainError):
            darboux_forward("so21", [0.0, 1.0, 2.0])

    def test_inverse_examples(self):
        np.testing.assert_allclose(darboux_inverse(DarbouxPoint("so3", -0.5, 0.0, math.pi)).array, [0, 0, -1],
                                   atol=1e-15)
        np.testing.assert_allclose(darboux_inverse(DarbouxPoint("so3", -0.5, 0.0, 0.0)).array, [0, 0, 1])
        d = DarbouxPoint("so21", 0.5, 0.0, math.asinh(math.sqrt(3.0)), 1)
        np.testing.assert_allclose(darboux_inverse(d).array, [0, 2, math.sqrt(3.0)], atol=1e-14)

    @given(st.floats(-2, -0.05), st.floats(-0.95, 0.95), st.floats(0, 2 * math.pi))
    def test_so3_roundtrip_from_chart(self, I, frac, gamma):
        assume(min(angle_distance(gamma, math.pi / 2), angle_distance(gamma, 3 * math.pi / 2)) > 1e-3)
        bound = math.sqrt(-0.5 / I)
        d = DarbouxPoint("so3", I, frac * bound, gamma)
        back = darboux_forward("so3", darboux_inverse(d))
        assert abs(back.I - I) <= 1e-10 * (1 + abs(I))
        assert abs(back.x1 - d.x1) <= 1e-10
        assert angle_distance(back.angle, gamma) <= 1e-10

    @given(st.floats(0.05, 2), st.floats(-0.95, 0.95), st.floats(-3, 3), st.sampled_from([1, -1]))
    def test_so21_roundtrip_from_chart(self, I, frac, lam, branch):
        assume(abs(lam) > 1e-3)
        d = DarbouxPoint("so21", I, frac * math.sqrt(0.5 / I), lam, branch)
        back = darboux_forward("so21", darboux_inverse(d))
        assert abs(back.I - I) <= 1e-10 * (1 + abs(I))
        assert abs(back.x1 - d.x1) <= 1e-10
        assert abs(back.angle - lam) <= 1e-10 and back.branch == branch

    @pytest.mark.parametrize("alg, fixture", [("so3", "so3_points"), ("so21", "so21_points")])
    def test_roundtrip_from_coalgebra(self, alg, fixture, request):
        xs = momentum_map_array(alg, request.getfixturevalue(fixture))
        checked = 0
        for x in xs:
            if alg == "so21" and abs(x[1]) <= abs(x[2]):
                continue
            back = darboux_inverse(darboux_forward(alg, x)).array
            assert np.abs(back - x).max() <= 1e-10 * (1 + np.abs(x).max())
            checked += 1
        assert checked > 100


class TestDarbouxBrackets:
    @pytest.mark.parametrize("alg, x", [("so3", [0.3, 0.4, -0.5]), ("so3", [0.0, 0.0, -1.0]),
                                        ("so21", [0.2, 1.5, 0.8])])
    def test_examples(self, alg, x):
        report = verify_darboux_bracket(alg, np.array(x), tol=1e-6)
        assert report.passed, report.residuals

    def test_so3_bracket_is_analytically_one(self):
        x = np.array([0.3, 0.4, -0.5])
        rho2 = x[1] ** 2 + x[2] ** 2
        grad_gamma = np.array([0.0, x[2], -x[1]]) / rho2
        w = SO3.bivector(x)
        assert np.array([1.0, 0, 0]) @ w @ grad_gamma == pytest.approx(1.0, abs=1e-15)

    def test_near_boundary_is_refused(self):
        with pytest.raises(DomainError):
            verify_darboux_bracket("so3", np.array([0.1, 1.0, 0.01]))
