"""
Contraction witnesses for ``A^2 ⊴ B^2``.

``A^2 ⊴ B^2`` holds exactly when some contraction ``C`` solves
``C B + B C* = 2A``. ``find_contraction`` searches for one with Dykstra's
alternating projections between the operator-norm unit ball and the
real-affine solution set of that equation. ``solve_hermitian_quadratic``
approaches the same question through the factorization
``B^2 + t^2 - 2tA = (X - tY)*(X - tY)``: with ``Z = Y*X = A + iK`` it
reduces to ``K^2 + i(AK - KA) = B^2 - A^2`` for Hermitian ``K``, which
is solved by Newton's method.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence
from .linalg import as_general, as_hermitian, check_psd, eig_hermitian, frobenius, lambda_min, operator_norm, polar

log = logging.getLogger(__name__)

NORM_EXCESS_TOL = 1e-8


@dataclass(frozen=True)
class ContractionWitness:
    C: np.ndarray
    equation_residual: float
    norm_excess: float
    iterations: int
    tol: float = 1e-7
    scale: float = 1.0
    chain_slack: float | None = None
    polished: bool = False

    @property
    def accepted(self) -> bool:
        return self.equation_residual <= self.tol * self.scale and self.norm_excess <= NORM_EXCESS_TOL


@dataclass(frozen=True)
class FactorizationData:
    Z: np.ndarray
    hermitian_part_residual: float
    modulus_residual: float
    iterations: int = 0
    tol: float = 1e-7
    scale: float = 1.0

    @property
    def accepted(self) -> bool:
        limit = self.tol * self.scale
        return self.hermitian_part_residual <= limit and self.modulus_residual <= limit

    @property
    def K(self) -> np.ndarray:
        return (self.Z - self.Z.conj().T) / 2.0j


def sylvester_residual(C, A, B) -> float:
    """Frobenius norm of ``C B + B C* - 2A``."""
    return frobenius(C @ B + B @ C.conj().T - 2.0 * A)


def verify_witness(C, A, B, tol: float = 1e-7) -> ContractionWitness:
    """Recompute residuals for a candidate ``C``.

    Also evaluates ``lambda_min(B^2 + t^2 - 2tA)`` at the extreme
    eigenvalues of ``A``; an accepted witness implies it is nonnegative
    there, up to rounding.
    """
    C = as_general(C)
    A = check_psd(A, "A")
    B = check_psd(B, "B")
    n = A.shape[0]
    w = eig_hermitian(A).eigenvalues
    chain = min(
        lambda_min(B @ B + t * t * np.eye(n) - 2.0 * t * A) for t in (float(w[0]), float(w[-1]))
    )
    return ContractionWitness(
        C=C,
        equation_residual=sylvester_residual(C, A, B),
        norm_excess=max(0.0, operator_norm(C) - 1.0),
        iterations=0,
        tol=tol,
        scale=max(1.0, frobenius(A)),
        chain_slack=chain,
    )


def _hermitian_coords(H: np.ndarray) -> np.ndarray:
    """Coordinates of Hermitian ``H`` in an orthonormal basis (real Frobenius inner product)."""
    n = H.shape[0]
    iu = np.triu_indices(n, 1)
    r2 = np.sqrt(2.0)
    return np.concatenate([np.real(np.diag(H)), r2 * H[iu].real, r2 * H[iu].imag])


def _from_hermitian_coords(h: np.ndarray, n: int) -> np.ndarray:
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    H = np.zeros((n, n), dtype=complex)
    H[np.diag_indices(n)] = h[:n]
    upper = (h[n : n + m] + 1j * h[n + m :]) / np.sqrt(2.0)
    H[iu] = upper
    H[(iu[1], iu[0])] = upper.conj()
    return H


def _pinv_via_normal(M: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    """Pseudo-inverse ``M^T (M M^T)^+`` with eigenvalue cutoff relative to the largest."""
    dec = eig_hermitian(M @ M.T)
    w = dec.eigenvalues
    top = float(w[-1]) if w.size else 0.0
    keep = w > cutoff * top if top > 0 else np.zeros_like(w, dtype=bool)
    V = np.real(dec.eigenvectors[:, keep])
    return M.T @ (V / w[keep]) @ V.T


class AffineSylvesterSet:
    """Projection onto ``{C : C B + B C* = 2A}`` in the Frobenius metric.

    The real-linear map ``C -> C B + B C*`` is assembled once as a real
    ``n^2 x 2n^2`` matrix (inputs: real and imaginary parts of ``C``;
    outputs: Hermitian coordinates). Rank deficiency, from singular ``B``,
    is handled by the pseudo-inverse, which then projects onto the
    least-squares solution set.
    """

    def __init__(self, A: np.ndarray, B: np.ndarray):
        n = A.shape[0]
        self.n = n
        self.B = B
        cols = []
        for part in (1.0, 1.0j):
            for i in range(n):
                for j in range(n):
                    E = np.zeros((n, n), dtype=complex)
                    E[i, j] = part
                    cols.append(_hermitian_coords(E @ B + B @ E.conj().T))
        self.M = np.column_stack(cols)
        self.target = _hermitian_coords(2.0 * A)
        self.pinv = _pinv_via_normal(self.M)

    def project(self, C: np.ndarray) -> np.ndarray:
        x = np.concatenate([C.real.ravel(), C.imag.ravel()])
        x = x - self.pinv @ (self.M @ x - self.target)
        n2 = self.n * self.n
        return (x[:n2] + 1j * x[n2:]).reshape(self.n, self.n)


def project_unit_ball(C: np.ndarray) -> np.ndarray:
    """Clip singular values at 1: ``C - sum_{s_i > 1} (s_i - 1) u_i v_i*``."""
    dec = eig_hermitian(C.conj().T @ C)
    big = dec.eigenvalues > 1.0
    if not np.any(big):
        return C
    V = dec.eigenvectors[:, big]
    s = np.sqrt(dec.eigenvalues[big])
    U = (C @ V) / s
    return C - (U * (s - 1.0)) @ V.conj().T


def _newton_polish(C, A, B, tol):
    """Seed the factorization solver with ``Z = C B`` and return the polar witness, or None."""
    Z = C @ B
    try:
        fd = solve_hermitian_quadratic(A, B, (Z - Z.conj().T) / 2.0j)
    except NonConvergence:
        return None
    cand = witness_from_factorization(fd, A, B, tol)
    return cand if cand.accepted else None


def find_contraction(
    A, B, max_iter: int = 5000, tol: float = 1e-7, stall_window: int = 250, polish: bool = True
) -> ContractionWitness:
    """Dykstra search for a contraction ``C`` with ``C B + B C* = 2A``.

    When the pair sits on the boundary of the relation the solution set
    touches the unit sphere tangentially and the projections crawl. Every
    ``stall_window`` iterations without the best residual halving, the
    best iterate seeds ``solve_hermitian_quadratic``; an exact
    factorization ``Z = U B`` yields the witness ``U``.

    Raises NonConvergence (``best`` holds the iterate with the smallest
    equation residual) when no acceptable witness appears within
    ``max_iter`` iterations. That suggests, but does not prove, that
    ``A^2 ⊴ B^2`` fails.
    """
    A = check_psd(A, "A")
    B = check_psd(B, "B")
    n = A.shape[0]
    scale = max(1.0, frobenius(A))
    affine = AffineSylvesterSet(A, B)

    def witness(C, it, polished=False):
        return ContractionWitness(
            C, sylvester_residual(C, A, B), max(0.0, operator_norm(C) - 1.0), it, tol, scale, polished=polished
        )

    if operator_norm(A - B) <= 0.1 * operator_norm(B):
        x = np.eye(n, dtype=complex)
    else:
        x = affine.project(np.zeros((n, n), dtype=complex))
    x = project_unit_ball(x)
    first = witness(x, 0)
    if first.accepted:
        return first

    best = first
    checkpoint = best.equation_residual
    polished_at = None
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for it in range(1, max_iter + 1):
        y = affine.project(x + p)
        p = x + p - y
        x_new = project_unit_ball(y + q)
        q = y + q - x_new
        x = x_new
        res = sylvester_residual(x, A, B)
        if res < best.equation_residual:
            best = ContractionWitness(x, res, 0.0, it, tol, scale)
            if res <= tol * scale:
                cand = witness(x, it)
                if cand.accepted:
                    log.debug("witness accepted after %d iterations", it)
                    return cand
        if polish and it % stall_window == 0:
            if best.equation_residual > 0.5 * checkpoint and polished_at is not best:
                polished_at = best
                cand = _newton_polish(best.C, A, B, tol)
                if cand is not None:
                    log.debug("witness polished after %d iterations", it)
                    return ContractionWitness(
                        cand.C, cand.equation_residual, cand.norm_excess, it, tol, scale, polished=True
                    )
            checkpoint = best.equation_residual
    best = witness(best.C, best.iterations)
    raise NonConvergence(
        f"no contraction witness after {max_iter} iterations (best residual {best.equation_residual:.3e})",
        best=best,
        iterations=max_iter,
        residual=best.equation_residual,
    )


def _commutator_term(A: np.ndarray, H: np.ndarray) -> np.ndarray:
    return 1j * (A @ H - H @ A)


def _quadratic_residual(A, K, rhs):
    return K @ K + _commutator_term(A, K) - rhs


def solve_hermitian_quadratic(A, B, K0, max_iter: int = 50, tol: float = 1e-10) -> FactorizationData:
    """Newton's method for Hermitian ``K`` with ``(A + iK)*(A + iK) = B^2``.

    The Jacobian ``H -> KH + HK + i(AH - HA)`` maps Hermitian matrices to
    Hermitian matrices; it is assembled over the ``n^2`` real Hermitian
    coordinates and solved in the least-squares sense. Steps are damped
    by Armijo backtracking on ``||F||_F``. Convergence is local only.
    """
    A = as_hermitian(A)
    B = check_psd(B, "B")
    K = as_hermitian(K0)
    n = A.shape[0]
    rhs = B @ B - A @ A
    scale = max(1.0, frobenius(B) ** 2)

    def data(K, it):
        Z = A + 1j * K
        herm = frobenius((Z + Z.conj().T) / 2.0 - A)
        mod = frobenius(Z.conj().T @ Z - B @ B)
        return FactorizationData(Z, herm, mod, it, tol, scale)

    F = _quadratic_residual(A, K, rhs)
    fnorm = frobenius(F)
    basis = [_from_hermitian_coords(e, n) for e in np.eye(n * n)]
    for it in range(max_iter + 1):
        if fnorm <= tol * scale:
            out = data(K, it)
            if out.accepted:
                return out
        if it == max_iter:
            break
        J = np.column_stack([_hermitian_coords(K @ E + E @ K + _commutator_term(A, E)) for E in basis])
        step, *_ = np.linalg.lstsq(J, -_hermitian_coords(F), rcond=None)
        H = _from_hermitian_coords(step, n)
        alpha = 1.0
        while True:
            K_try = K + alpha * H
            F_try = _quadratic_residual(A, K_try, rhs)
            f_try = frobenius(F_try)
            if f_try <= (1.0 - 1e-4 * alpha) * fnorm or alpha < 1e-8:
                break
            alpha *= 0.5
        if f_try >= fnorm:
            break
        K, F, fnorm = 0.5 * (K_try + K_try.conj().T), F_try, f_try
    best = data(K, it)
    raise NonConvergence(
        f"Newton iteration stalled at ||F|| = {fnorm:.3e}", best=best, iterations=it, residual=fnorm
    )


def witness_from_factorization(fd: FactorizationData, A, B, tol: float = 1e-7) -> ContractionWitness:
    """With ``Z = U|Z| = U B`` (polar), ``U B + B U* = Z + Z* = 2A``, so ``U`` is a witness."""
    U, _ = polar(fd.Z)
    return verify_witness(U, A, B, tol)
