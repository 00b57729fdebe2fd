import math

import numpy as np
import pytest

from jensen_order.errors import GenerationExhausted
from jensen_order.instances import (
    feasible_pair,
    ginibre,
    haar_unitary,
    paper_example,
    perturbation_margin,
    random_contraction,
    random_psd,
    range_fixed_point_instance,
    real_part_gap,
    z_pair,
)
from jensen_order.linalg import lambda_max, lambda_min, operator_norm
from jensen_order.order import check_order_squared

SQRT2 = math.sqrt(2.0)


class TestExampleMatrices:
    def test_entries(self, ex):
        np.testing.assert_allclose(ex.A, [[SQRT2, 0.5], [0.5, SQRT2]])
        np.testing.assert_allclose(ex.B, np.array([[4, SQRT2], [SQRT2, 5]]) / 3)
        np.testing.assert_allclose(ex.C @ ex.C, ex.Y.conj().T @ ex.Y, atol=1e-14)

    def test_squares(self, ex):
        sq = ex.squares()
        np.testing.assert_allclose(sq["B2"], [[2, SQRT2], [SQRT2, 3]], atol=1e-14)
        assert sq["C2"][0, 0] == pytest.approx(16 / 9, abs=1e-14)
        assert sq["A2"][0, 0] == pytest.approx(2.25, abs=1e-14)

    def test_not_transitive(self, ex):
        assert check_order_squared(ex.A, ex.B).holds
        assert check_order_squared(ex.B, ex.C).holds
        assert check_order_squared(ex.A, ex.C).fails

    @pytest.mark.parametrize("eps", [0.0, 0.3, 1.0])
    def test_shifted_corner_entry(self, ex, eps):
        Bs = ex.B + eps * np.eye(2)
        assert (Bs @ Bs)[0, 0].real == pytest.approx((9 * eps**2 + 24 * eps + 18) / 9, rel=1e-14)


class TestPerturbationMargin:
    def test_linear(self):
        for eps in (0.0, 0.1, 0.5, 1.0, 7.0):
            assert perturbation_margin(eps) == pytest.approx((2 * SQRT2 - 8 / 3) * eps, abs=1e-12)

    def test_value_at_one(self):
        assert perturbation_margin(1.0) == pytest.approx(0.161760, abs=1e-6)

    def test_negative_eps(self):
        with pytest.raises(ValueError):
            perturbation_margin(-0.1)


class TestGenerators:
    def test_deterministic(self):
        for gen in (ginibre, haar_unitary, random_contraction):
            assert np.array_equal(gen(4, 7), gen(4, 7))
            assert not np.array_equal(gen(4, 7), gen(4, 8))
        assert np.array_equal(random_psd(3, 1, 0.2, 2.0), random_psd(3, 1, 0.2, 2.0))
        a = feasible_pair(3, 4)
        b = feasible_pair(3, 4)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_generator_threading(self):
        rng = np.random.default_rng(0)
        first = ginibre(2, rng)
        second = ginibre(2, rng)
        assert not np.array_equal(first, second)

    def test_haar_is_unitary(self):
        U = haar_unitary(5, 3)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(5), atol=1e-13)

    def test_psd_range(self):
        for s in range(20):
            M = random_psd(4, s, 0.2, 2.0)
            assert 0.2 - 1e-12 <= lambda_min(M) and lambda_max(M) <= 2.0 + 1e-12

    def test_contraction(self):
        for s in range(20):
            assert operator_norm(random_contraction(3, s, shift=s % 3)) <= 1 + 1e-12

    def test_feasible_pair(self):
        for s in range(20):
            A, B, C0 = feasible_pair(3, s)
            assert lambda_min(A) >= -1e-12
            assert operator_norm(C0) <= 1 + 1e-12
            np.testing.assert_allclose(C0 @ B + B @ C0.conj().T, 2 * A, atol=1e-12)

    def test_exhaustion(self):
        with pytest.raises(GenerationExhausted):
            feasible_pair(8, 0, shift=0.0, max_retries=1)

    def test_z_pair(self):
        zp = z_pair(3, 2)
        np.testing.assert_allclose(zp.A + 1j * zp.K, zp.Z, atol=1e-14)
        R = zp.K @ zp.K + 1j * (zp.A @ zp.K - zp.K @ zp.A)
        np.testing.assert_allclose(R, zp.B @ zp.B - zp.A @ zp.A, atol=1e-10)

    def test_range_fixed_point_instance(self):
        A, Cm, P = range_fixed_point_instance(5, 1, rank=2)
        np.testing.assert_allclose(P @ P, P, atol=1e-13)
        np.testing.assert_allclose(Cm @ A, A, atol=1e-12)
        assert round(np.trace(P).real) == 2
        assert operator_norm(Cm) <= 1 + 1e-12


class TestRealPartGap:
    def test_nonnegative(self):
        worst = math.inf
        for s in range(100):
            X = ginibre(1 + s % 4, s)
            for t in np.geomspace(0.05, 20, 10):
                worst = min(worst, real_part_gap(X, t))
        assert worst >= -1e-12

    def test_zero_for_unitary_at_one(self):
        U = haar_unitary(3, 5)
        # |U|^2/2 + 1/2 - Re U = I - Re U has minimum eigenvalue 1 - max Re spectrum
        assert real_part_gap(U, 1.0) >= -1e-12
        assert real_part_gap(np.eye(3), 1.0) == pytest.approx(0.0, abs=1e-14)
