"""
Numerical replication of the spectral-partition argument behind antisymmetry.

Given ``A`` with spectrum in ``[c+eps, 2c]`` and ``B`` sandwiched as

    (2tA - t^2)^{1/2} <= B <= A^2/(2t) + t/2     for t in [c+eps, 2c],

the argument splits ``[c+eps, 2c]`` into ``n`` windows with spectral
projections ``P_i`` and left anchors ``t_i``, bounds the off-diagonal
pieces ``P_i^perp B P_i`` through a Schur-complement identity, and ends
with

    ||A - B|| <= (d/2)((c-eps)/n)^2 + (d ||B|| (c-eps)^2 / n)^{1/2}.

The sandwich forces ``A = B``, so on genuine instances everything here
is exact; on perturbed instances the reports are diagnostics only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PremiseViolated, SingularBlock, SpectrumOutOfWindow
from .linalg import (
    EDGE_TOL,
    SpectralWindow,
    _window_from_decomposition,
    as_general,
    check_psd,
    eig_hermitian,
    frobenius,
    inv_hermitian,
    lambda_min,
    operator_norm,
    orthonormal_range,
    psd_sqrt,
    range_projection,
)

PSD_SLACK = 1e-9
SPECTRUM_TOL = 1e-12


def _restricted_inverse(M: np.ndarray, W: np.ndarray, what: str) -> np.ndarray:
    """Inverse of ``M`` compressed to ``range(W)``, returned as an n x n matrix."""
    if W.shape[1] == 0:
        return np.zeros_like(M)
    block = W.conj().T @ M @ W
    w = eig_hermitian(block).eigenvalues
    if abs(w[0]) <= 1e-12 * max(1.0, abs(w[-1])):
        raise SingularBlock(f"{what} is singular on its subspace (eigenvalue {w[0]:.3e})")
    return W @ inv_hermitian(block) @ W.conj().T


def schur_identity_check(B, P) -> float:
    """Frobenius norm of ``[PBP - (PB^{-1}P)^{-1}] - PBP^perp (P^perp B P^perp)^{-1} P^perp BP``.

    Inverses of compressions are taken on the respective subspaces.
    """
    B = check_psd(B, "B")
    P = P.projection if isinstance(P, SpectralWindow) else np.asarray(P, dtype=complex)
    n = B.shape[0]
    if lambda_min(B) < 1e-8:
        raise SingularBlock("B must be invertible (lambda_min >= 1e-8)")
    Pp = np.eye(n) - P
    W = orthonormal_range(P)
    Wp = orthonormal_range(Pp)
    B_inv = inv_hermitian(B)
    lhs = P @ B @ P - _restricted_inverse(B_inv, W, "P B^-1 P")
    rhs = P @ B @ Pp @ _restricted_inverse(B, Wp, "P^perp B P^perp") @ Pp @ B @ P
    return frobenius(lhs - rhs)


def schur_tolerance(B) -> float:
    B = np.asarray(B, dtype=complex)
    return 1e-9 * max(1.0, frobenius(B) ** 2 * frobenius(inv_hermitian(B)))


def _check_spectrum(A: np.ndarray, c: float, eps: float) -> np.ndarray:
    w = eig_hermitian(A).eigenvalues
    lo, hi = c + eps, 2.0 * c
    tol = SPECTRUM_TOL * hi
    if w[0] < lo - tol or w[-1] > hi + tol:
        raise SpectrumOutOfWindow(f"spectrum [{w[0]:.6g}, {w[-1]:.6g}] not inside [{lo}, {hi}]")
    return w


@dataclass(frozen=True)
class SandwichStatus:
    passed: bool
    t: float | None = None
    side: str | None = None
    deficit: float | None = None
    checked: int = 0


def sandwich_check(A, B, c: float, eps: float, t_grid) -> SandwichStatus:
    """Check ``(2tA - t^2)^{1/2} <= B <= A^2/(2t) + t/2`` on each grid point.

    Sides are ``"root"`` (``2tA - t^2`` not PSD), ``"lower"`` and
    ``"upper"``; ``deficit`` is lambda_min of the failing difference.
    """
    A = check_psd(A, "A")
    B = check_psd(B, "B")
    _check_spectrum(A, c, eps)
    n = A.shape[0]
    eye = np.eye(n)
    A2 = A @ A
    for k, t in enumerate(np.asarray(t_grid, dtype=float)):
        if not (c + eps - SPECTRUM_TOL <= t <= 2 * c + SPECTRUM_TOL):
            raise ValueError(f"t = {t} outside [{c + eps}, {2 * c}]")
        D = 2.0 * t * A - t * t * eye
        m = lambda_min(D)
        if m < -PSD_SLACK:
            return SandwichStatus(False, float(t), "root", m, k)
        m = lambda_min(B - psd_sqrt(D))
        if m < -PSD_SLACK:
            return SandwichStatus(False, float(t), "lower", m, k)
        m = lambda_min(A2 / (2.0 * t) + t / 2.0 * eye - B)
        if m < -PSD_SLACK:
            return SandwichStatus(False, float(t), "upper", m, k)
    return SandwichStatus(True, checked=len(np.atleast_1d(t_grid)))


def partition_anchors(c: float, eps: float, n: int) -> np.ndarray:
    """``t_i = c + eps + (i - 1)(c - eps)/n`` for ``i = 1..n``, then ``2c`` as the closing edge."""
    i = np.arange(n + 1)
    edges = c + eps + i * (c - eps) / n
    edges[-1] = 2.0 * c
    return edges


def final_bound(d: float, norm_b: float, c: float, eps: float, n: int) -> float:
    w = (c - eps) / n
    return 0.5 * d * w * w + math.sqrt(d * norm_b * (c - eps) ** 2 / n)


@dataclass
class PartitionReport:
    n: int
    c: float
    eps: float
    d: float
    t_values: np.ndarray
    ranks: list[int]
    anchor_residuals: np.ndarray  # ||t_i P_i - A P_i||
    anchor_bound: float  # (c - eps)/n
    offdiag_sq: np.ndarray  # ||P_i^perp B P_i||^2
    offdiag_bounds: np.ndarray  # d ||B|| ||t_i P_i - A P_i||^2
    diag_residuals: np.ndarray  # ||A P_i - P_i B P_i||
    diag_bounds: np.ndarray  # (d/2) ||t_i P_i - A P_i||^2
    aggregate_sq: float  # ||sum_i P_i^perp B P_i||^2
    aggregate_sum: float  # sum_i ||P_i^perp B P_i||^2
    aggregate_bound: float  # d ||B|| (c - eps)^2 / n
    norm_b: float
    bound: float
    actual: float  # ||A - B||
    premise: SandwichStatus
    projections: list[np.ndarray] = field(repr=False, default_factory=list)

    @property
    def anchor_slack(self) -> float:
        return self.anchor_bound - float(np.max(self.anchor_residuals))

    @property
    def anchors_ok(self) -> bool:
        return self.anchor_slack >= -1e-12

    @property
    def offdiag_ok(self) -> bool:
        return bool(np.all(self.offdiag_sq <= self.offdiag_bounds + 1e-12))

    @property
    def diag_ok(self) -> bool:
        return bool(np.all(self.diag_residuals <= self.diag_bounds + 1e-12))

    @property
    def aggregate_ok(self) -> bool:
        return self.aggregate_sq <= self.aggregate_bound + 1e-12

    @property
    def orthogonality_ok(self) -> bool:
        return self.aggregate_sq <= self.aggregate_sum + 1e-9

    @property
    def bound_ok(self) -> bool:
        return self.bound >= self.actual - 1e-8

    @property
    def all_ok(self) -> bool:
        return all(
            (self.anchors_ok, self.offdiag_ok, self.diag_ok, self.aggregate_ok, self.orthogonality_ok, self.bound_ok)
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "c": self.c,
            "eps": self.eps,
            "d": self.d,
            "t_values": self.t_values.tolist(),
            "ranks": list(self.ranks),
            "anchor_residuals": self.anchor_residuals.tolist(),
            "anchor_bound": self.anchor_bound,
            "offdiag_sq": self.offdiag_sq.tolist(),
            "offdiag_bounds": self.offdiag_bounds.tolist(),
            "diag_residuals": self.diag_residuals.tolist(),
            "diag_bounds": self.diag_bounds.tolist(),
            "aggregate_sq": self.aggregate_sq,
            "aggregate_sum": self.aggregate_sum,
            "aggregate_bound": self.aggregate_bound,
            "norm_b": self.norm_b,
            "bound": self.bound,
            "actual": self.actual,
            "premise": {
                "passed": self.premise.passed,
                "t": self.premise.t,
                "side": self.premise.side,
                "deficit": self.premise.deficit,
            },
            "status": {
                "anchors": self.anchors_ok,
                "offdiag": self.offdiag_ok,
                "diag": self.diag_ok,
                "aggregate": self.aggregate_ok,
                "orthogonality": self.orthogonality_ok,
                "bound": self.bound_ok,
            },
        }

    def recheck(self, A, B, tol: float = 1e-10) -> bool:
        """Re-evaluate every stored per-index quantity from the projections."""
        A = np.asarray(A, dtype=complex)
        B = np.asarray(B, dtype=complex)
        eye = np.eye(A.shape[0])
        total = np.zeros_like(B)
        for i, P in enumerate(self.projections):
            Pp = eye - P
            checks = (
                (operator_norm(self.t_values[i] * P - A @ P), self.anchor_residuals[i]),
                (operator_norm(Pp @ B @ P) ** 2, self.offdiag_sq[i]),
                (operator_norm(A @ P - P @ B @ P), self.diag_residuals[i]),
            )
            if any(abs(x - y) > tol for x, y in checks):
                return False
            total = total + Pp @ B @ P
        return abs(operator_norm(total) ** 2 - self.aggregate_sq) <= tol and abs(
            operator_norm(A - B) - self.actual
        ) <= tol


def partition_pipeline(A, B, c: float, eps: float, n: int, d: float) -> PartitionReport:
    """Evaluate every quantity of the partition argument for one ``n``.

    Windows are ``[t_i, t_{i+1})`` with ``t_{n+1} = 2c``. Every eigenvalue
    must sit more than 1e-8 from every edge, outer ones included, so the
    half-open windows cover the spectrum; otherwise EigenvalueOnBoundary.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    A = check_psd(A, "A")
    B = check_psd(B, "B")
    if lambda_min(B) <= 0:
        raise SingularBlock("B must be invertible")
    _check_spectrum(A, c, eps)
    dec = eig_hermitian(A)
    dim = A.shape[0]
    eye = np.eye(dim)
    edges = partition_anchors(c, eps, n)
    projections = [_window_from_decomposition(dec, edges[i], edges[i + 1], EDGE_TOL).projection for i in range(n)]

    t = edges[:-1]
    norm_b = operator_norm(B)
    anchor_res = np.array([operator_norm(t[i] * P - A @ P) for i, P in enumerate(projections)])
    offdiag_sq = np.array([operator_norm((eye - P) @ B @ P) ** 2 for P in projections])
    diag_res = np.array([operator_norm(A @ P - P @ B @ P) for P in projections])
    agg = sum(((eye - P) @ B @ P for P in projections), np.zeros_like(B))
    premise = sandwich_check(A, B, c, eps, edges)
    return PartitionReport(
        n=n,
        c=c,
        eps=eps,
        d=d,
        t_values=t.copy(),
        ranks=[int(round(np.trace(P).real)) for P in projections],
        anchor_residuals=anchor_res,
        anchor_bound=(c - eps) / n,
        offdiag_sq=offdiag_sq,
        offdiag_bounds=d * norm_b * anchor_res**2,
        diag_residuals=diag_res,
        diag_bounds=0.5 * d * anchor_res**2,
        aggregate_sq=operator_norm(agg) ** 2,
        aggregate_sum=float(offdiag_sq.sum()),
        aggregate_bound=d * norm_b * (c - eps) ** 2 / n,
        norm_b=norm_b,
        bound=final_bound(d, norm_b, c, eps, n),
        actual=operator_norm(A - B),
        premise=premise,
        projections=projections,
    )


@dataclass(frozen=True)
class DecayPoint:
    n: int
    bound: float
    report: PartitionReport = field(repr=False)


def bound_decay_study(A, B, c: float, eps: float, d: float, n_list) -> list[DecayPoint]:
    return [DecayPoint(n, r.bound, r) for n in n_list for r in [partition_pipeline(A, B, c, eps, n, d)]]


def range_fixed_point_check(C, A, rank_cutoff: float = 1e-9) -> tuple[float, float]:
    """For a contraction with ``CA + AC* = 2A``, return ``(||CP - P||_F, ||(C - I)A||_F)``.

    Both vanish in exact arithmetic, ``P`` being the range projection of
    ``A``. Premises are checked first and raise PremiseViolated.
    """
    C = as_general(C)
    A = check_psd(A, "A")
    excess = operator_norm(C) - 1.0
    if excess > 1e-10:
        raise PremiseViolated(f"C is not a contraction: ||C|| - 1 = {excess:.3e}")
    res = frobenius(C @ A + A @ C.conj().T - 2.0 * A)
    if res > 1e-8 * max(1.0, frobenius(A)):
        raise PremiseViolated(f"CA + AC* != 2A (residual {res:.3e})")
    P = range_projection(A, rank_cutoff)
    eye = np.eye(A.shape[0])
    return frobenius(C @ P - P), frobenius((C - eye) @ A)
