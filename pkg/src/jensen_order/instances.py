"""Exact 2x2 matrices from the non-transitivity example and seeded generators.

Every generator takes ``seed``, which may be an int or a
``numpy.random.Generator``; passing a Generator threads one stream through
several draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationExhausted
from . import linalg as la
from .linalg import absolute_value, as_hermitian, operator_norm, psd_sqrt

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PaperExample:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    X: np.ndarray
    Y: np.ndarray

    def squares(self) -> dict[str, np.ndarray]:
        return {name + "2": M @ M for name, M in (("A", self.A), ("B", self.B), ("C", self.C))}


def paper_example(check: bool = True) -> PaperExample:
    """``A = Re X``, ``B = |X|``, ``C = |Y|`` with ``Re Y = B``.

    ``A^2 ⊴ B^2`` and ``B^2 ⊴ C^2`` hold while ``A^2 ⊴ C^2`` fails.
    """
    X = np.array([[SQRT2, 1.0], [0.0, SQRT2]], dtype=complex)
    Y = np.array([[4.0, 2.0 * SQRT2], [0.0, 5.0]], dtype=complex) / 3.0
    A = np.array([[SQRT2, 0.5], [0.5, SQRT2]], dtype=complex)
    B = np.array([[4.0, SQRT2], [SQRT2, 5.0]], dtype=complex) / 3.0
    C = psd_sqrt(Y.conj().T @ Y)
    ex = PaperExample(A, B, C, X, Y)
    if check:
        tol = 1e-12
        assert np.max(np.abs((X + X.conj().T) / 2 - A)) <= tol
        assert np.max(np.abs(B @ B - X.conj().T @ X)) <= tol
        assert np.max(np.abs((Y + Y.conj().T) / 2 - B)) <= tol
        assert abs((C @ C)[0, 0] - 16.0 / 9.0) <= tol
    return ex


def perturbation_margin(eps: float) -> float:
    """How far ``(sqrt2 + eps)^2 <= eps^2 + (8/3) eps + 2`` is violated.

    That inequality is necessary for ``(A+eps)^2 ⊴ (B+eps)^2``; the
    margin is ``(2 sqrt2 - 8/3) eps``, positive for every eps > 0.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return (SQRT2 + eps) ** 2 - (eps * eps + 8.0 / 3.0 * eps + 2.0)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def ginibre(n: int, seed) -> np.ndarray:
    rng = _rng(seed)
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def haar_unitary(n: int, seed) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(n, seed))
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_psd(n: int, seed, lambda_min: float = 0.0, lambda_max: float = 1.0) -> np.ndarray:
    if not 0.0 <= lambda_min <= lambda_max:
        raise ValueError(f"invalid eigenvalue range [{lambda_min}, {lambda_max}]")
    rng = _rng(seed)
    w = rng.uniform(lambda_min, lambda_max, size=n)
    U = haar_unitary(n, rng)
    return as_hermitian((U * w) @ U.conj().T)


def random_contraction(n: int, seed, shift: float = 0.0) -> np.ndarray:
    """``G + shift*I`` (G Ginibre) rescaled to operator norm uniform on (0, 1]."""
    rng = _rng(seed)
    G = ginibre(n, rng) + shift * np.eye(n)
    r = 1.0 - rng.random()
    return G * (r / operator_norm(G))


def feasible_pair(
    n: int,
    seed,
    lambda_min: float = 0.0,
    lambda_max: float = 2.0,
    shift: float = 2.0,
    max_retries: int = 1000,
):
    """Draw ``(A, B, C0)`` with ``C0 B + B C0* = 2A``, ``||C0|| <= 1`` and ``A >= 0``.

    Draws are rejected (never repaired) until ``A`` is PSD, so ``C0`` stays
    an exact witness for ``A^2 ⊴ B^2``. With an unshifted Ginibre
    contraction only ~0.1% of 3x3 draws give a PSD ``A``; ``shift``
    biases ``C0`` toward positive multiples of the identity.
    """
    rng = _rng(seed)
    for _ in range(max_retries):
        B = random_psd(n, rng, lambda_min, lambda_max)
        C0 = random_contraction(n, rng, shift)
        A = as_hermitian((C0 @ B + B @ C0.conj().T) / 2.0)
        if la.lambda_min(A) >= -1e-12:
            return A, B, C0
    raise GenerationExhausted(f"no PSD draw in {max_retries} attempts")


@dataclass(frozen=True)
class ZPair:
    A: np.ndarray
    B: np.ndarray
    K: np.ndarray
    Z: np.ndarray
    a_is_psd: bool


def z_pair(n: int, seed, Z=None) -> ZPair:
    """Split a random ``Z`` as ``A + iK`` (Hermitian parts) with ``B = |Z|``.

    ``K`` solves ``K^2 + i(AK - KA) = B^2 - A^2`` exactly by construction.
    """
    Z = ginibre(n, seed) if Z is None else np.array(Z, dtype=complex)
    A = as_hermitian((Z + Z.conj().T) / 2.0)
    K = as_hermitian((Z - Z.conj().T) / 2.0j)
    B = absolute_value(Z)
    return ZPair(A, B, K, Z, la.lambda_min(A) >= -1e-12)


def range_fixed_point_instance(n: int, seed, rank: int | None = None):
    """Singular PSD ``A`` and ``C = P + (I-P) D (I-P)`` with ``P`` its range projection.

    ``D`` is a random contraction, so ``||C|| <= 1`` and ``CA = A``.
    Returns ``(A, C, P)``.
    """
    rng = _rng(seed)
    if rank is None:
        rank = int(rng.integers(1, n)) if n > 1 else 1
    U = haar_unitary(n, rng)
    w = np.zeros(n)
    w[:rank] = rng.uniform(0.2, 2.0, size=rank)
    A = as_hermitian((U * w) @ U.conj().T)
    Ur = U[:, :rank]
    P = Ur @ Ur.conj().T
    Q = np.eye(n) - P
    D = random_contraction(n, rng)
    C = P + Q @ D @ Q
    return A, C, P


def real_part_gap(X, t: float) -> float:
    """``lambda_min(|X|^2 / (2t) + t/2 - Re X)``, nonnegative for every t > 0."""
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    M = X.conj().T @ X / (2.0 * t) + t / 2.0 * np.eye(n) - (X + X.conj().T) / 2.0
    return la.lambda_min(M)
