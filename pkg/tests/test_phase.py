import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import CIRCULAR
from superkepler.kepler import angular_momentum, hamiltonian, runge_lenz
from superkepler.phase import (BRACKET_SIGN, DomainError, PhasePoint, bracket, calibrate_bracket_sign,
                               compose, fd_gradient, gradient_check, jacobian, jacobian_rank, numerical_rank,
                               p1, p2, poisson_bracket, product, q1, q2, reciprocal)

H, M, A1, A2 = hamiltonian(), angular_momentum(), runge_lenz(1), runge_lenz(2)

coord = st.floats(-3, 3, allow_nan=False)
points = st.tuples(coord, coord, coord, coord).filter(lambda z: np.hypot(z[0], z[1]) > 0.3).map(np.array)


def test_phase_point_rejects_origin():
    with pytest.raises(DomainError):
        PhasePoint(0.0, 0.0, 1.0, 0.0)
    z = PhasePoint(3.0, 4.0, 0.0, 1.0)
    assert z.r == 5.0
    assert np.array_equal(PhasePoint.from_array(z.array).array, z.array)


class TestBracketExamples:
    def test_self_bracket_vanishes(self):
        assert poisson_bracket(q1, q1, np.array([0.3, 1.0, -2.0, 0.5])) == 0.0

    def test_canonical_pair_follows_calibrated_sign(self):
        assert calibrate_bracket_sign() == BRACKET_SIGN == -1.0
        assert poisson_bracket(q1, p1, CIRCULAR) == pytest.approx(-1.0, abs=0)
        assert poisson_bracket(q2, p2, CIRCULAR) == -1.0
        assert poisson_bracket(q1, p2, CIRCULAR) == 0.0

    def test_calibration_relation(self):
        z = np.array([1.3, -0.4, 0.2, 0.9])
        assert poisson_bracket(M, A2, z) == pytest.approx(A1(z), abs=1e-13)

    def test_angular_momentum_with_runge_lenz_on_circle(self):
        assert abs(poisson_bracket(M, A1, CIRCULAR)) <= 1e-15
        assert poisson_bracket(M, A1, CIRCULAR) == pytest.approx(-A2(CIRCULAR), abs=1e-15)

    def test_matches_symbolic_oracle(self, u_points):
        z = u_points[:50]
        for f, g, fs, gs in [(M, A1, oracles.M12, oracles.A1), (A1, A2, oracles.A1, oracles.A2),
                             (H, A2, oracles.H, oracles.A2), (M, H, oracles.M12, oracles.H)]:
            ref = oracles.lambdify(oracles.sym_bracket(fs, gs))(z)
            np.testing.assert_allclose(poisson_bracket(f, g, z), ref, atol=1e-11)


class TestBracketProperties:
    @given(points)
    def test_antisymmetry_is_exact(self, z):
        for f, g in [(M, A1), (A1, A2), (H, q1), (p2, A2)]:
            assert poisson_bracket(f, g, z) == -poisson_bracket(g, f, z)

    @given(points)
    def test_leibniz(self, z):
        for f, g, h in [(A1, M, A2), (H, q1, p2), (M, A2, H)]:
            lhs = poisson_bracket(f, product(g, h), z)
            rhs = poisson_bracket(f, g, z) * h(z) + g(z) * poisson_bracket(f, h, z)
            assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs) + abs(rhs))

    def test_jacobi_identity_on_integrals(self, u_points):
        z = u_points[:100]
        total = (bracket(M, bracket(A1, A2))(z) + bracket(A1, bracket(A2, M))(z)
                 + bracket(A2, bracket(M, A1))(z))
        assert np.abs(total).max() <= 1e-8

    def test_jacobi_identity_generic_triple(self, u_points):
        z = u_points[:100]
        f, g, h = product(q1, p2), H, product(A1, q2)
        total = bracket(f, bracket(g, h))(z) + bracket(g, bracket(h, f))(z) + bracket(h, bracket(f, g))(z)
        assert np.abs(total).max() <= 1e-8

    def test_nested_bracket_gradient(self, u_points):
        nested = bracket(A1, A2)
        for z in u_points[:20]:
            assert gradient_check(nested, z) <= 1e-6


class TestObservableAlgebra:
    def test_product_and_compose_gradients(self, u_points):
        obs = [product(H, M), compose(np.exp, np.exp, np.exp, H, "exp H"), reciprocal(M),
               H + 2.0 * A1, A1 - A2, -M]
        for f in obs:
            for z in u_points[:20]:
                assert gradient_check(f, z) <= 1e-6, f.label

    @pytest.mark.parametrize("name", ["H", "M12", "A1", "A2"])
    def test_hessians_match_finite_differences(self, name, u_points):
        f = {"H": H, "M12": M, "A1": A1, "A2": A2}[name]
        for z in u_points[:20]:
            fd = fd_gradient(f.grad, z, h=1e-5, order=4)
            np.testing.assert_allclose(f.hess(z), fd, atol=1e-6)
            np.testing.assert_allclose(f.hess(z), f.hess(z).T, atol=1e-12)

    def test_vectorised_evaluation_matches_pointwise(self, u_points):
        z = u_points[:10]
        np.testing.assert_array_equal(A1(z), [A1(row) for row in z])
        assert A1.grad(z).shape == (10, 4)


class TestGradientCheck:
    def test_bilinear_is_exact(self):
        assert gradient_check(M, CIRCULAR, 1e-5) <= 1e-10

    def test_hamiltonian(self):
        assert gradient_check(H, CIRCULAR, 1e-5) <= 1e-6

    def test_runge_lenz(self):
        assert gradient_check(A1, np.array([2.0, 0.0, 0.0, 0.5]), 1e-5) <= 1e-6

    def test_detects_wrong_gradient(self):
        from superkepler.phase import Observable
        bad = Observable("bad", M.value, lambda z: 1.01 * M.gradient(z))
        assert gradient_check(bad, np.array([1.0, 0.5, 0.3, 1.0])) > 1e-3


class TestRank:
    @given(points)
    def test_coordinates_have_full_rank(self, z):
        assert jacobian_rank([q1, q2, p1, p2], z, 1e-10) == 4

    def test_integrals_rank_three(self):
        assert jacobian_rank([M, A1, A2], CIRCULAR, 1e-10) == 3

    def test_hamiltonian_is_dependent(self):
        assert jacobian_rank([H, M, A1, A2], CIRCULAR, 1e-8) == 3

    def test_matches_svd_oracle(self, u_points):
        for z in u_points[:50]:
            assert jacobian_rank([H, M, A1, A2], z) == oracles.svd_rank(jacobian([H, M, A1, A2], z)) == 3

    def test_numerical_rank_edge_cases(self):
        assert numerical_rank(np.zeros((3, 3))) == 0
        assert numerical_rank(np.diag([1.0, 1e-12, 0.0])) == 1
