"""
Dense Hermitian linear algebra for small matrices.

Matrices are plain complex ``numpy`` arrays. ``as_hermitian`` and
``as_general`` are the validating constructors; everything else accepts
anything they accept.

The eigensolver is a cyclic complex Jacobi method, vectorized over a
stack of matrices so that a parameter scan can diagonalize hundreds of
small matrices in one call. SVD, polar decomposition, square roots and
spectral projections are all assembled from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenvalueOnBoundary, NonConvergence, NotHermitian, NotPositiveSemidefinite

HERMITIAN_REJECT_TOL = 1e-8
PSD_CLAMP_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
NEGLIGIBLE = 1e-30
EDGE_TOL = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


@dataclass(frozen=True)
class SpectralWindow:
    """Half-open interval ``[lower, upper)`` and the spectral projection it cuts out."""

    lower: float
    upper: float
    projection: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projection).real))


def as_general(M) -> np.ndarray:
    X = np.array(M, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {X.shape}")
    return X


def as_hermitian(M, tol: float = HERMITIAN_REJECT_TOL) -> np.ndarray:
    """Validate and symmetrize. Asymmetry above ``tol`` (scaled by the
    largest entry when that exceeds 1) is rejected."""
    X = as_general(M)
    asym = np.max(np.abs(X - X.conj().T))
    scale = max(1.0, float(np.max(np.abs(X))))
    if asym > tol * scale:
        raise NotHermitian(f"matrix is not Hermitian: max |M - M*| = {asym:.3e}")
    return 0.5 * (X + X.conj().T)


def frobenius(X) -> float:
    return float(np.linalg.norm(X))


def _offdiag_norms(A: np.ndarray) -> np.ndarray:
    n = A.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(A[:, mask]) ** 2, axis=1))


def eig_hermitian_batch(stack, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi on a ``(k, n, n)`` stack of Hermitian matrices.

    Returns ``(eigenvalues, eigenvectors)`` of shapes ``(k, n)`` and
    ``(k, n, n)``, eigenvalues ascending. Every matrix in the stack is
    rotated by the same pivot sequence, so results are independent of
    how the stack is assembled.
    """
    A = np.array(stack, dtype=complex)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError(f"expected a (k, n, n) stack, got {A.shape}")
    k, n, _ = A.shape
    V = np.zeros_like(A)
    V[:, np.arange(n), np.arange(n)] = 1.0
    scale = np.linalg.norm(A.reshape(k, -1), axis=1)
    threshold = tol * scale
    # entries this small are zeroed instead of rotated; dividing by a
    # subnormal modulus overflows
    negligible = np.maximum(NEGLIGIBLE * scale, np.finfo(float).tiny)

    converged = False
    for _ in range(max_sweeps):
        off = _offdiag_norms(A) if n > 1 else np.zeros(k)
        if np.all(off <= threshold):
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                r = np.abs(apq)
                active = r > negligible
                if not np.any(active):
                    A[:, p, q] = 0.0
                    A[:, q, p] = 0.0
                    continue
                safe_r = np.where(active, r, 1.0)
                phase = np.where(active, apq / safe_r, 1.0)
                theta = (A[:, q, q].real - A[:, p, p].real) / (2.0 * safe_r)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                w = phase.conj()
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                G = np.empty((k, 2, 2), dtype=complex)
                G[:, 0, 0] = c
                G[:, 0, 1] = s
                G[:, 1, 0] = -s * w
                G[:, 1, 1] = c * w
                idx = [p, q]
                A[:, :, idx] = A[:, :, idx] @ G
                A[:, idx, :] = np.conj(np.swapaxes(G, 1, 2)) @ A[:, idx, :]
                V[:, :, idx] = V[:, :, idx] @ G
                A[:, p, q] = 0.0
                A[:, q, p] = 0.0
                A[:, p, p] = A[:, p, p].real
                A[:, q, q] = A[:, q, q].real
    if not converged:
        off = _offdiag_norms(A)
        if not np.all(off <= threshold):
            worst = float(np.max(off))
            raise NonConvergence(
                f"Jacobi did not converge in {max_sweeps} sweeps; off-diagonal norm {worst:.3e}",
                iterations=max_sweeps,
                residual=worst,
            )

    w = np.real(np.diagonal(A, axis1=1, axis2=2))
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    return w, V


def eig_hermitian(M) -> EigenDecomposition:
    H = as_hermitian(M)
    w, V = eig_hermitian_batch(H[None])
    return EigenDecomposition(w[0], V[0])


def eigvalsh(M) -> np.ndarray:
    return eig_hermitian(M).eigenvalues


def lambda_min(M) -> float:
    return float(eigvalsh(M)[0])


def lambda_max(M) -> float:
    return float(eigvalsh(M)[-1])


def _checked_psd_eig(M, what: str = "matrix") -> EigenDecomposition:
    dec = eig_hermitian(M)
    lo = float(dec.eigenvalues[0])
    if lo < -PSD_CLAMP_TOL:
        raise NotPositiveSemidefinite(f"{what} has eigenvalue {lo:.3e} < -{PSD_CLAMP_TOL:g}", lo)
    return EigenDecomposition(np.maximum(dec.eigenvalues, 0.0), dec.eigenvectors)


def check_psd(M, what: str = "matrix") -> np.ndarray:
    """Return the Hermitian part of ``M`` or raise NotPositiveSemidefinite."""
    H = as_hermitian(M)
    _checked_psd_eig(H, what)
    return H


def psd_function(M, f, what: str = "matrix") -> np.ndarray:
    """Apply a scalar function to the (clamped) spectrum of a PSD matrix."""
    dec = _checked_psd_eig(M, what)
    V = dec.eigenvectors
    return (V * f(dec.eigenvalues)) @ V.conj().T


def psd_sqrt(M) -> np.ndarray:
    R = psd_function(M, np.sqrt)
    return 0.5 * (R + R.conj().T)


def inv_hermitian(M, cutoff: float = 0.0) -> np.ndarray:
    """Inverse (or pseudo-inverse below ``cutoff``) through the eigendecomposition."""
    dec = eig_hermitian(M)
    w = dec.eigenvalues
    keep = np.abs(w) > cutoff
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    V = dec.eigenvectors
    R = (V * inv) @ V.conj().T
    return 0.5 * (R + R.conj().T)


def _gram_schmidt(cols: np.ndarray) -> np.ndarray:
    Q = np.array(cols, dtype=complex)
    for j in range(Q.shape[1]):
        for _ in range(2):
            Q[:, j] -= Q[:, :j] @ (Q[:, :j].conj().T @ Q[:, j])
        Q[:, j] /= np.linalg.norm(Q[:, j])
    return Q


def _complete_basis(Q: np.ndarray, n: int) -> np.ndarray:
    """Extend orthonormal columns ``Q`` (n x r) to a unitary n x n matrix."""
    cols = [Q[:, j] for j in range(Q.shape[1])]
    for e in np.eye(n, dtype=complex):
        if len(cols) == n:
            break
        v = e.copy()
        for _ in range(2):
            for c in cols:
                v -= c * (c.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            cols.append(v / nv)
    return np.column_stack(cols) if cols else np.zeros((n, 0), dtype=complex)


def _right_singular(X: np.ndarray, rank_tol: float):
    """Right singular data from the eigendecomposition of X*X.

    Returns ``(s_eig, V, kept, U_kept)`` with singular values in descending
    order. ``s_eig`` comes from the Gram eigenvalues; kept left vectors are
    X v / ||X v|| re-orthonormalized.
    """
    dec = eig_hermitian(X.conj().T @ X)
    lam = np.maximum(dec.eigenvalues[::-1], 0.0)
    V = dec.eigenvectors[:, ::-1]
    s_eig = np.sqrt(lam)
    XV = X @ V
    s_col = np.linalg.norm(XV, axis=0)
    smax = s_col.max() if s_col.size else 0.0
    kept = s_col > rank_tol * smax if smax > 0 else np.zeros_like(s_col, dtype=bool)
    U_kept = _gram_schmidt(XV[:, kept] / s_col[kept]) if np.any(kept) else np.zeros((X.shape[0], 0), complex)
    return s_eig, V, kept, U_kept


def svd(X, rank_tol: float = 1e-8):
    """Full SVD ``X = U diag(s) Vh`` with ``s`` descending.

    Left vectors for numerically null singular values are completed by
    orthonormalization against the computed range.
    """
    X = as_general(X)
    n = X.shape[0]
    s_eig, V, kept, U_kept = _right_singular(X, rank_tol)
    U = _complete_basis(U_kept, n)
    s = np.where(kept, s_eig, 0.0)
    return U, s, V.conj().T


def polar(X, rank_tol: float = 1e-8):
    """Polar decomposition ``X = U P`` with ``P = |X|`` and ``U`` a partial isometry.

    ``U*U`` is the projection onto the numerical range of ``P``; ``U`` is
    unitary when X has full numerical rank.
    """
    X = as_general(X)
    s_eig, V, kept, U_kept = _right_singular(X, rank_tol)
    U = U_kept @ V[:, kept].conj().T
    P = (V * s_eig) @ V.conj().T
    return U, 0.5 * (P + P.conj().T)


def absolute_value(X) -> np.ndarray:
    X = as_general(X)
    return psd_sqrt(X.conj().T @ X)


def operator_norm(X) -> float:
    X = as_general(X)
    return float(np.sqrt(max(lambda_max(X.conj().T @ X), 0.0)))


def spectral_projection(M, lower: float, upper: float, edge_tol: float = EDGE_TOL) -> SpectralWindow:
    """Spectral projection of ``M`` onto eigenvalues in ``[lower, upper)``.

    Eigenvalues closer than ``edge_tol`` to either edge raise
    EigenvalueOnBoundary instead of being assigned to a side.
    """
    if not (np.isfinite(lower) and np.isfinite(upper)) or not lower < upper:
        raise ValueError(f"invalid window [{lower}, {upper})")
    dec = eig_hermitian(M)
    return _window_from_decomposition(dec, lower, upper, edge_tol)


def _window_from_decomposition(dec: EigenDecomposition, lower: float, upper: float, edge_tol: float) -> SpectralWindow:
    w = dec.eigenvalues
    for edge in (lower, upper):
        hit = np.abs(w - edge) <= edge_tol
        if np.any(hit):
            lam = float(w[hit][0])
            raise EigenvalueOnBoundary(
                f"eigenvalue {lam!r} within {edge_tol:g} of window edge {edge!r}", lam, edge
            )
    inside = (w >= lower) & (w < upper)
    Vs = dec.eigenvectors[:, inside]
    P = Vs @ Vs.conj().T
    return SpectralWindow(float(lower), float(upper), 0.5 * (P + P.conj().T))


def range_projection(M, rel_cutoff: float = 1e-9) -> np.ndarray:
    """Projection onto the span of eigenvectors with eigenvalue > rel_cutoff * lambda_max."""
    dec = eig_hermitian(M)
    top = float(dec.eigenvalues[-1])
    if top <= 0:
        return np.zeros_like(dec.eigenvectors)
    Vs = dec.eigenvectors[:, dec.eigenvalues > rel_cutoff * top]
    return Vs @ Vs.conj().T


def orthonormal_range(P: np.ndarray, tol: float = 0.5) -> np.ndarray:
    """Orthonormal basis (columns) of the range of an orthogonal projection."""
    dec = eig_hermitian(P)
    return dec.eigenvectors[:, dec.eigenvalues > tol]
