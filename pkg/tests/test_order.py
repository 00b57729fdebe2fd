import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from jensen_order.errors import DomainError, NotPositiveSemidefinite
from jensen_order.instances import ginibre, random_psd
from jensen_order.linalg import lambda_min
from jensen_order.order import (
    DecisionConfig,
    FailsCertificate,
    HoldsCertificate,
    Outcome,
    Verdict,
    brute_force_order,
    certificate_value,
    check_order,
    check_order_squared,
    min_halfline,
    recheck,
)

SQRT2 = math.sqrt(2.0)


class TestCommutingPairs:
    # for commuting diagonal pairs the relation reduces to a_i <= b_i

    def test_strict_holds_with_lipschitz_margin(self):
        v = check_order(np.diag([1.0, 4.0]), np.diag([2.0, 5.0]))
        assert v.outcome is Outcome.HOLDS
        assert v.certificate.kind == "lipschitz"
        assert v.certificate.lower_bound > 0

    def test_fails_on_one_eigenvalue(self):
        A, B = np.diag([1.0, 4.0]), np.diag([2.0, 3.0])
        v = check_order(A, B)
        assert v.fails
        assert v.certificate.value < 0
        assert abs(abs(v.certificate.xi[1]) - 1.0) < 1e-6
        assert recheck(v, A, B)

    def test_scalar_equal_is_point_holds(self):
        v = check_order(np.array([[2.0]]), np.array([[2.0]]))
        assert v.holds and v.certificate.kind == "point"

    def test_scalar_fails(self):
        v = check_order(np.array([[2.0]]), np.array([[1.0]]))
        assert v.fails
        # min over t of 1 - 2 t sqrt2 + t^2 is 1 - 2 = -1 at t = sqrt2
        assert v.certificate.value == pytest.approx(-1.0, abs=1e-12)
        assert v.certificate.t == pytest.approx(SQRT2, abs=1e-12)

    def test_zero_a(self):
        assert check_order(np.zeros((2, 2)), np.eye(2)).holds
        assert check_order(np.zeros((2, 2)), np.zeros((2, 2))).holds


class TestExamplePairs:
    def test_squared_matches_unsquared_on_squares(self, ex):
        sq = ex.squares()
        for a, b in (("A", "B"), ("B", "C"), ("A", "C")):
            v1 = check_order_squared(getattr(ex, a), getattr(ex, b))
            v2 = check_order(sq[a + "2"], sq[b + "2"])
            assert v1.outcome is v2.outcome

    def test_boundary_pairs_certified_by_concavity(self, ex):
        v = check_order_squared(ex.A, ex.B)
        assert v.holds and v.certificate.kind == "concave"
        assert v.certificate.g_min <= 1e-6  # the pair touches the boundary

    def test_fails_certificate_rechecks(self, ex):
        v = check_order_squared(ex.A, ex.C)
        assert v.fails
        assert recheck(v, ex.A, ex.C)
        assert certificate_value(ex.A, ex.C, v.certificate.t, v.certificate.xi, squared=True) < -0.2

    def test_example_certificate_value(self, ex):
        e1 = np.array([1.0, 0.0])
        val = certificate_value(ex.A, ex.C, 4.0 / 3.0, e1, squared=True)
        assert val == pytest.approx(32.0 / 9.0 - 8.0 / 3.0 * SQRT2, abs=1e-12)


class TestSmallExamples:
    def test_identity_pair(self):
        assert check_order(np.eye(3), np.eye(3)).holds
        assert brute_force_order(np.eye(3), np.eye(3)).outcome is Outcome.UNDECIDED

    def test_scalar_four_one(self):
        A, B = np.array([[4.0]]), np.array([[1.0]])
        assert check_order(A, B).fails
        brute = brute_force_order(A, B, samples=1)
        assert brute.fails and recheck(brute, A, B)

    def test_brute_force_refutes_example_pair(self, ex):
        sq = ex.squares()
        v = brute_force_order(sq["A2"], sq["C2"], samples=10_000, seed=1)
        assert v.fails and recheck(v, sq["A2"], sq["C2"])

    def test_brute_force_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            brute_force_order(np.eye(2), np.eye(2), samples=0)


class TestRecheck:
    def test_rejects_tampered_fails(self, ex):
        v = check_order_squared(ex.A, ex.C)
        c = v.certificate
        fake = Verdict(Outcome.FAILS, FailsCertificate(c.t, np.array([0.0, 1.0]), c.value), squared=True)
        assert not recheck(fake, ex.A, ex.C)
        unnormalized = Verdict(Outcome.FAILS, FailsCertificate(c.t, 2 * c.xi, c.value), squared=True)
        assert not recheck(unnormalized, ex.A, ex.C)

    def test_holds_certificate_not_transferable(self, ex):
        v = check_order_squared(ex.A, ex.B)
        assert recheck(v, ex.A, ex.B)
        assert not recheck(v, ex.A, ex.C)

    def test_dict_round_trip(self, ex):
        for b in (ex.B, ex.C):
            v = check_order_squared(ex.A, b)
            w = Verdict.from_dict(v.to_dict())
            assert w.outcome is v.outcome and w.squared
            assert recheck(w, ex.A, b)


class TestValidation:
    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveSemidefinite):
            check_order(np.diag([1.0, -1.0]), np.eye(2))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            DecisionConfig(grid_points=2)
        with pytest.raises(ValueError):
            DecisionConfig(refine_factor=1)

    def test_off_grid_dip_is_undecided_then_refuted(self):
        # S = diag(1, 1.37, 2): g dips to -delta at t = 1.37, between coarse grid points
        delta = 1e-6
        A = np.diag([1.0, 1.37**2, 4.0])
        B = np.diag([1.0, 1.37**2 - delta, 4.0])
        coarse = check_order(A, B, DecisionConfig(grid_points=3, max_refinements=0))
        assert coarse.outcome is Outcome.UNDECIDED
        assert coarse.certificate.margin < 0
        fine = check_order(A, B)
        assert fine.fails
        assert fine.certificate.value == pytest.approx(-delta, rel=1e-3)
        assert recheck(fine, A, B)


def _pair(seed, n):
    A = random_psd(n, seed, 0.0, 2.0)
    B = random_psd(n, seed + 10_000, 0.0, 2.0)
    return A, B


class TestProperties:
    @pytest.mark.parametrize("s", range(40))
    def test_loewner_implies_jensen(self, s):
        n = 2 + s % 4
        A = random_psd(n, s, 0.0, 2.0)
        B = A + random_psd(n, s + 500, 0.0, 0.5)
        v = check_order(A, B)
        assert not v.fails
        if v.holds:
            assert lambda_min(B) >= lambda_min(A) - 1e-8

    @pytest.mark.parametrize("s", range(40))
    def test_reflexive(self, s):
        A = random_psd(1 + s % 6, s, 0.0, 3.0)
        for v in (check_order(A, A), check_order_squared(A, A)):
            assert v.holds
            assert recheck(v, A, A)

    @pytest.mark.parametrize("s", range(30))
    def test_agrees_with_sampling(self, s):
        A, B = _pair(s, 1 + s % 4)
        v = check_order(A, B)
        brute = brute_force_order(A, B, samples=5000, seed=s)
        assert not (brute.fails and v.holds)
        if v.fails:
            assert recheck(v, A, B)
        if brute.fails:
            assert recheck(brute, A, B)

    @pytest.mark.parametrize("s", range(30))
    def test_no_two_sided_squared_relation(self, s):
        A = random_psd(3, s, 0.2, 2.0)
        B = random_psd(3, s + 777, 0.2, 2.0)
        assert np.linalg.norm(A - B, 2) >= 0.1
        assert not (check_order_squared(A, B).holds and check_order_squared(B, A).holds)

    def test_unitary_invariance(self):
        A, B = _pair(3, 3)
        Q, _ = np.linalg.qr(ginibre(3, 4))
        v1 = check_order(A, B)
        v2 = check_order(Q @ A @ Q.conj().T, Q @ B @ Q.conj().T)
        assert v1.outcome is v2.outcome

    @seed(11)
    @settings(max_examples=40, deadline=None)
    @given(a=st.floats(0.0, 10.0), b=st.floats(0.0, 10.0))
    def test_scalar_oracle(self, a, b):
        v = check_order(np.array([[a]]), np.array([[b]]))
        if a <= b:
            assert v.holds
        elif a - b > 1e-8:
            assert v.fails


class TestMinHalfline:
    @pytest.mark.parametrize("q", [16 / 9, 1.0, 2.0, 1e-6, 1e6])
    def test_am_gm(self, q):
        r = min_halfline(q)
        assert r.value == pytest.approx(math.sqrt(q), rel=1e-15)
        assert r.t_star == pytest.approx(math.sqrt(q), rel=1e-15)
        ts = np.linspace(r.t_star * 0.5, r.t_star * 2, 1001)
        assert np.all(q / (2 * ts) + ts / 2 >= r.value - 1e-12 * max(1.0, r.value))

    @pytest.mark.parametrize("eps", [0.1, 0.5, 1.0])
    def test_shifted_corner(self, eps):
        q = (9 * eps**2 + 24 * eps + 18) / 9
        assert min_halfline(q).value == pytest.approx(math.sqrt(9 * eps**2 + 24 * eps + 18) / 3, rel=1e-15)

    def test_zero_is_not_attained(self):
        r = min_halfline(0.0)
        assert r.value == 0.0 and not r.attained

    def test_negative(self):
        with pytest.raises(DomainError):
            min_halfline(-1e-3)
