import math

import numpy as np
import pytest

from jensen_order.errors import NonConvergence
from jensen_order.instances import feasible_pair, ginibre, random_contraction, random_psd, z_pair
from jensen_order.linalg import frobenius, operator_norm, polar
from jensen_order.witness import (
    AffineSylvesterSet,
    find_contraction,
    project_unit_ball,
    solve_hermitian_quadratic,
    sylvester_residual,
    verify_witness,
    witness_from_factorization,
)

SQRT2 = math.sqrt(2.0)
U_EXACT = np.array([[4 * SQRT2, 2], [-2, 4 * SQRT2]]) / 6


class TestVerify:
    def test_exact_unitary_witness(self, ex):
        w = verify_witness(U_EXACT, ex.A, ex.B)
        assert w.equation_residual <= 1e-12
        assert w.norm_excess <= 1e-12
        assert w.accepted
        assert w.chain_slack >= -1e-12

    def test_identity_for_equal_pair(self):
        B = random_psd(3, 1, 0.1, 2.0)
        assert verify_witness(np.eye(3), B, B).accepted

    def test_rejects_non_contraction(self, ex):
        w = verify_witness(2 * U_EXACT, 2 * ex.A, ex.B)
        assert w.equation_residual <= 1e-12
        assert w.norm_excess == pytest.approx(1.0, abs=1e-12)
        assert not w.accepted

    def test_rejects_wrong_equation(self, ex):
        assert not verify_witness(np.eye(2), ex.A, ex.B).accepted


class TestProjections:
    def test_unit_ball_clips(self):
        for s in range(10):
            X = 3 * ginibre(4, s)
            P = project_unit_ball(X)
            assert operator_norm(P) <= 1 + 1e-12
            np.testing.assert_allclose(project_unit_ball(P), P, atol=1e-12)
            # variational inequality against points of the ball
            for k in range(5):
                Y = random_contraction(4, 100 * s + k)
                assert np.real(np.vdot(X - P, Y - P)) <= 1e-9

    def test_unit_ball_keeps_contractions(self):
        C = random_contraction(3, 0)
        assert project_unit_ball(C) is C

    def test_affine_projection(self):
        A, B, C0 = feasible_pair(3, 5)
        aff = AffineSylvesterSet(A, B)
        X = ginibre(3, 9)
        P = aff.project(X)
        assert sylvester_residual(P, A, B) <= 1e-10
        np.testing.assert_allclose(aff.project(P), P, atol=1e-10)
        # X - P is orthogonal to the direction between two solutions
        assert abs(np.real(np.vdot(X - P, C0 - P))) <= 1e-9 * frobenius(X)


class TestFindContraction:
    def test_example_pair_needs_polish(self, ex):
        w = find_contraction(ex.A, ex.B)
        assert w.accepted and w.polished
        assert w.equation_residual <= 1e-10
        np.testing.assert_allclose(w.C, U_EXACT, atol=1e-8)

    def test_example_failing_pair(self, ex):
        with pytest.raises(NonConvergence) as info:
            find_contraction(ex.A, ex.C, max_iter=1000)
        best = info.value.best
        assert best is not None and not best.accepted
        assert best.equation_residual > 0.1

    def test_equal_pair_accepts_identity(self):
        B = random_psd(4, 2, 0.5, 2.0)
        w = find_contraction(B, B)
        assert w.accepted and w.iterations == 0

    @pytest.mark.parametrize("s", range(20))
    def test_feasible_pairs(self, s):
        A, B, C0 = feasible_pair(3, s)
        assert verify_witness(C0, A, B).accepted
        w = find_contraction(A, B)
        assert w.accepted
        recomputed = verify_witness(w.C, A, B)
        assert recomputed.accepted
        assert recomputed.chain_slack >= -1e-9


class TestFactorization:
    @pytest.mark.parametrize("s", range(10))
    def test_newton_recovers_k(self, s):
        zp = z_pair(3, s)
        K0 = zp.K + 1e-3 * (ginibre(3, s + 50) + ginibre(3, s + 50).conj().T)
        fd = solve_hermitian_quadratic(zp.A, zp.B, K0)
        assert fd.accepted
        assert frobenius(fd.Z.conj().T @ fd.Z - zp.B @ zp.B) <= 1e-9

    @pytest.mark.parametrize("s", range(10))
    def test_factorization_consistency(self, s):
        # Z = U B, X = B, Y = U*: (X - tY)*(X - tY) = B^2 + t^2 - 2 t Re Z
        zp = z_pair(3, s)
        U, P = polar(zp.Z)
        np.testing.assert_allclose(P, zp.B, atol=1e-10)
        Y = U.conj().T
        for t in (0.1, 0.7, 2.5):
            F = zp.B - t * Y
            lhs = F.conj().T @ F
            rhs = zp.B @ zp.B + t * t * np.eye(3) - 2 * t * zp.A
            assert frobenius(lhs - rhs) <= 1e-9

    def test_witness_from_exact_factorization(self, ex):
        Z = U_EXACT @ ex.B
        fd = solve_hermitian_quadratic(ex.A, ex.B, (Z - Z.conj().T) / 2j)
        w = witness_from_factorization(fd, ex.A, ex.B)
        assert w.accepted
        assert w.equation_residual <= 1e-12
