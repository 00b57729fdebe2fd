"""
Two-variable scalar bounds on the box ``[c+eps, 2c]^2``.

The gap ``lam^2/(2t) + t/2 - sqrt(2 t lam - t^2)`` is nonnegative on the
box and vanishes to second order on the diagonal, so it is dominated by
``(d/2)(t - lam)^2`` for some ``d > 0``. ``find_d`` certifies such a
``d`` on a lattice.

All evaluations use the cancellation-free form (with ``s = t - lam``)

    gap = s^2 / (2t) + s^2 / (lam + sqrt(lam^2 - s^2)),

which follows from ``lam^2/(2t) + t/2 - lam = s^2/(2t)`` and
``2 t lam - t^2 = lam^2 - s^2``. It is exactly zero on the diagonal and
makes ``2 gap / s^2`` well defined there (limit ``2/lam``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInterval

K_FLOOR = -1e-12
BOX_TOL = 1e-12


@dataclass(frozen=True)
class ScalarBoundParams:
    c: float
    eps: float
    d: float

    def __post_init__(self):
        _check_interval(self.c, self.eps)
        if not self.d > 0:
            raise ValueError(f"d must be positive, got {self.d}")

    @property
    def box(self) -> tuple[float, float]:
        return self.c + self.eps, 2.0 * self.c


def _check_interval(c: float, eps: float) -> None:
    if not (c > 0 and 0 < eps < c):
        raise InvalidInterval(f"need 0 < eps < c, got c={c}, eps={eps}")


def positivity_term(t, lam):
    """``2 t lam - t^2``."""
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    return t * (2.0 * lam - t)


def _gap_unchecked(t, lam):
    s = t - lam
    return s * s / (2.0 * t) + s * s / (lam + np.sqrt(lam * lam - s * s))


def gap(t, lam):
    """``lam^2/(2t) + t/2 - sqrt(2 t lam - t^2)``; requires ``2 t lam - t^2 > 0``."""
    t_arr = np.asarray(t, dtype=float)
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(positivity_term(t_arr, lam_arr) <= 0) or np.any(t_arr <= 0):
        raise DomainError("gap requires t > 0 and 2*t*lam - t^2 > 0")
    out = _gap_unchecked(t_arr, lam_arr)
    return float(out) if out.ndim == 0 else out


def gap_ratio(t, lam):
    """``2 gap / (t - lam)^2``, continuous across the diagonal."""
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    s = t - lam
    out = 1.0 / t + 2.0 / (lam + np.sqrt(lam * lam - s * s))
    return float(out) if out.ndim == 0 else out


def _in_box(t, lam, params: ScalarBoundParams) -> bool:
    lo, hi = params.box
    tol = BOX_TOL * hi
    t = np.asarray(t)
    lam = np.asarray(lam)
    return bool(np.all((t >= lo - tol) & (t <= hi + tol) & (lam >= lo - tol) & (lam <= hi + tol)))


def k_function(t, lam, params: ScalarBoundParams):
    """``(d/2)(t - lam)^2 - gap(t, lam)`` on the box; DomainError outside it."""
    if not _in_box(t, lam, params):
        raise DomainError(f"(t, lam) outside [{params.box[0]}, {params.box[1]}]^2")
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    out = 0.5 * params.d * (t - lam) ** 2 - _gap_unchecked(t, lam)
    return float(out) if out.ndim == 0 else out


def lattice(c: float, eps: float, points: int):
    axis = np.linspace(c + eps, 2.0 * c, points)
    T, L = np.meshgrid(axis, axis, indexing="ij")
    return T, L


def lattice_min_k(c: float, eps: float, d: float, points: int) -> float:
    T, L = lattice(c, eps, points)
    return float(np.min(0.5 * d * (T - L) ** 2 - _gap_unchecked(T, L)))


def positivity_floor(c: float, eps: float, points: int = 1025) -> float:
    """Lattice minimum of ``2 t lam - t^2``; at least ``2 (c + eps) eps``."""
    _check_interval(c, eps)
    T, L = lattice(c, eps, points)
    return float(np.min(positivity_term(T, L)))


def find_d(c: float, eps: float, grid_points: int = 257, rel_resolution: float = 1e-4, inflate: float = 1.1):
    """Smallest lattice-valid ``d`` by bisection, inflated as off-lattice margin.

    Bisection stops at relative width ``rel_resolution``; the upper end is
    inflated by ``inflate`` and checked on a lattice 4x finer per axis,
    re-inflating until that check passes.
    """
    _check_interval(c, eps)
    if grid_points < 64:
        raise ValueError("grid_points must be >= 64")

    def ok(d, points):
        return lattice_min_k(c, eps, d, points) >= K_FLOOR

    hi = 1.0
    while not ok(hi, grid_points):
        hi *= 2.0
    lo = 0.0
    while hi - lo > rel_resolution * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid, grid_points):
            hi = mid
        else:
            lo = mid

    d = hi * inflate
    fine = 4 * (grid_points - 1) + 1
    while not ok(d, fine):
        d *= inflate
    return ScalarBoundParams(c, eps, d)
