"""
Certified decisions for the Jensen square-root relation.

``A ⊴ B`` means ``<A^{1/2} x, x> <= <B x, x>^{1/2}`` for every unit vector
``x``. With ``S = A^{1/2}`` this is equivalent to the one-parameter family
of Loewner inequalities

    Q(t) = B - 2 t S + t^2 I  >=  0      for all t > 0,

and for each fixed ``x`` the scalar quadratic ``<Q(t) x, x>`` is minimized
at ``t = <S x, x>``, which lies in ``[lambda_min(S), lambda_max(S)]``.
So it suffices to certify ``g(t) = lambda_min(Q(t)) >= 0`` on that
interval.

Two sound ways of bounding ``g`` between grid points are used:

* Lipschitz: ``g`` is ``4 ||S||``-Lipschitz on the interval, so a grid
  minimum above ``L h / 2`` certifies strict positivity.
* Concavity: ``g(t) - t^2 = lambda_min(B - 2 t S)`` is concave, so on a
  segment ``[a, b]`` we have
  ``g(t) >= interp(g)(t) - (t - a)(b - t)``. This is what certifies pairs
  sitting on the boundary of the relation (``A = B``, the pairs built
  from ``Re X`` and ``|X|``), up to the configured PSD slack.

A negative grid value gives an explicit violating ``(t, x)`` instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError
from .linalg import check_psd, eig_hermitian, eig_hermitian_batch, psd_sqrt


@dataclass(frozen=True)
class DecisionConfig:
    grid_points: int = 257
    refine_factor: int = 4
    max_refinements: int = 6
    psd_slack: float = 1e-9

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        if self.refine_factor < 2:
            raise ValueError("refine_factor must be >= 2")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be >= 0")
        if not self.psd_slack >= 0:
            raise ValueError("psd_slack must be >= 0")


class Outcome(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class HoldsCertificate:
    """Grid data certifying ``Q(t) >= -lower_bound_slack`` on the scan interval.

    ``kind`` is ``"lipschitz"`` when ``g_min >= lipschitz * step / 2 > 0``
    (strict), ``"concave"`` when the segment-wise concavity bound is
    ``>= -slack``, ``"point"`` when the interval degenerates to one point.
    """

    kind: str
    step: float
    lipschitz: float
    g_min: float
    lower_bound: float
    slack: float
    grid: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class FailsCertificate:
    t: float
    xi: np.ndarray
    value: float


@dataclass(frozen=True)
class UndecidedCertificate:
    margin: float
    step: float


Certificate = Union[HoldsCertificate, FailsCertificate, UndecidedCertificate]


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    certificate: Certificate
    squared: bool = False

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS

    @property
    def fails(self) -> bool:
        return self.outcome is Outcome.FAILS

    def to_dict(self) -> dict:
        cert = self.certificate
        out: dict = {"outcome": self.outcome.value, "squared": self.squared}
        if isinstance(cert, HoldsCertificate):
            out["certificate"] = {
                "kind": cert.kind,
                "step": cert.step,
                "lipschitz": cert.lipschitz,
                "g_min": cert.g_min,
                "lower_bound": cert.lower_bound,
                "slack": cert.slack,
                "grid": cert.grid.tolist(),
            }
        elif isinstance(cert, FailsCertificate):
            out["certificate"] = {
                "t": cert.t,
                "xi_re": cert.xi.real.tolist(),
                "xi_im": cert.xi.imag.tolist(),
                "value": cert.value,
            }
        else:
            out["certificate"] = {"margin": cert.margin, "step": cert.step}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        outcome = Outcome(data["outcome"])
        c = data["certificate"]
        if outcome is Outcome.HOLDS:
            cert: Certificate = HoldsCertificate(
                c["kind"], c["step"], c["lipschitz"], c["g_min"], c["lower_bound"], c["slack"],
                np.asarray(c["grid"], dtype=float),
            )
        elif outcome is Outcome.FAILS:
            xi = np.asarray(c["xi_re"], dtype=float) + 1j * np.asarray(c["xi_im"], dtype=float)
            cert = FailsCertificate(c["t"], xi, c["value"])
        else:
            cert = UndecidedCertificate(c["margin"], c["step"])
        return cls(outcome, cert, bool(data.get("squared", False)))


def _pencil(A, B, squared: bool):
    """Return ``(S, Bq)`` with ``Q(t) = Bq - 2 t S + t^2 I``."""
    A = check_psd(A, "A")
    B = check_psd(B, "B")
    if squared:
        return A, B @ B
    return psd_sqrt(A), B


def quadratic_form(S, Bq, t: float, xi) -> float:
    """``<(Bq + t^2 I - 2 t S) xi, xi>`` evaluated directly."""
    xi = np.asarray(xi, dtype=complex)
    return float(np.real(np.vdot(xi, Bq @ xi) + t * t * np.vdot(xi, xi) - 2.0 * t * np.vdot(xi, S @ xi)))


def certificate_value(A, B, t: float, xi, squared: bool = False) -> float:
    """Re-evaluate a violation certificate from the original pair."""
    S, Bq = _pencil(A, B, squared)
    return quadratic_form(S, Bq, t, xi)


def _lambda_min_on(S: np.ndarray, Bq: np.ndarray, ts: np.ndarray):
    n = S.shape[0]
    eye = np.eye(n)
    stack = Bq[None] - 2.0 * ts[:, None, None] * S[None] + (ts**2)[:, None, None] * eye[None]
    w, V = eig_hermitian_batch(stack)
    return w[:, 0], V[:, :, 0]


def _concave_segment_bounds(ts: np.ndarray, g: np.ndarray) -> np.ndarray:
    a = ts[:-1]
    h = ts[1:] - a
    ga, gb = g[:-1], g[1:]
    m = np.divide(gb - ga, h, out=np.zeros_like(h), where=h > 0)
    u = np.clip((h - m) / 2.0, 0.0, h)
    return ga + (m - h) * u + u * u


def _polish(S, Bq, t0: float, xi0: np.ndarray):
    """One Newton step on t for the fiber quadratic, then keep the best pair."""
    best = (t0, xi0, quadratic_form(S, Bq, t0, xi0))
    t1 = float(np.real(np.vdot(xi0, S @ xi0)))
    candidates = [(t1, xi0)]
    g1, v1 = _lambda_min_on(S, Bq, np.array([t1]))
    candidates.append((t1, v1[0]))
    for t, xi in candidates:
        xi = xi / np.linalg.norm(xi)
        val = quadratic_form(S, Bq, t, xi)
        if val < best[2]:
            best = (t, xi, val)
    t, xi, _ = best
    xi = xi / np.linalg.norm(xi)
    return t, xi, quadratic_form(S, Bq, t, xi)


def _scan(S: np.ndarray, Bq: np.ndarray, cfg: DecisionConfig, squared: bool) -> Verdict:
    w = eig_hermitian(S).eigenvalues
    lo, hi = float(w[0]), float(w[-1])
    L = 4.0 * max(abs(lo), abs(hi))
    slack = cfg.psd_slack

    if hi - lo <= 0.0:
        ts = np.array([lo])
        g, vecs = _lambda_min_on(S, Bq, ts)
        if g[0] < -slack:
            t, xi, val = _polish(S, Bq, lo, vecs[0])
            return Verdict(Outcome.FAILS, FailsCertificate(t, xi, val), squared)
        return Verdict(
            Outcome.HOLDS, HoldsCertificate("point", 0.0, L, float(g[0]), float(g[0]), slack, ts), squared
        )

    ts = np.linspace(lo, hi, cfg.grid_points)
    g, vecs = _lambda_min_on(S, Bq, ts)
    for level in range(cfg.max_refinements + 1):
        k = int(np.argmin(g))
        if g[k] < -slack:
            t, xi, val = _polish(S, Bq, float(ts[k]), vecs[k])
            return Verdict(Outcome.FAILS, FailsCertificate(t, xi, val), squared)

        steps = np.diff(ts)
        h = float(steps.max())
        g_min = float(g[k])
        if g_min > 0 and g_min >= L * h / 2.0:
            return Verdict(
                Outcome.HOLDS,
                HoldsCertificate("lipschitz", h, L, g_min, g_min - L * h / 2.0, slack, ts.copy()),
                squared,
            )
        bounds = _concave_segment_bounds(ts, g)
        if float(bounds.min()) >= -slack:
            return Verdict(
                Outcome.HOLDS,
                HoldsCertificate("concave", h, L, g_min, float(bounds.min()), slack, ts.copy()),
                squared,
            )
        if level == cfg.max_refinements:
            bad = bounds < -slack
            return Verdict(
                Outcome.UNDECIDED,
                UndecidedCertificate(float(bounds.min()), float(steps[bad].min())),
                squared,
            )

        bad = np.flatnonzero(bounds < -slack)
        fr = np.arange(1, cfg.refine_factor) / cfg.refine_factor
        new_t = (ts[bad, None] + steps[bad, None] * fr[None, :]).ravel()
        new_g, new_v = _lambda_min_on(S, Bq, new_t)
        ts = np.concatenate([ts, new_t])
        g = np.concatenate([g, new_g])
        vecs = np.concatenate([vecs, new_v])
        order = np.argsort(ts, kind="stable")
        ts, g, vecs = ts[order], g[order], vecs[order]

    raise AssertionError("unreachable")


def check_order(A, B, cfg: DecisionConfig | None = None) -> Verdict:
    """Decide ``A ⊴ B`` for PSD ``A``, ``B``."""
    S, Bq = _pencil(A, B, squared=False)
    return _scan(S, Bq, cfg or DecisionConfig(), squared=False)


def check_order_squared(A, B, cfg: DecisionConfig | None = None) -> Verdict:
    """Decide ``A^2 ⊴ B^2``, i.e. ``2 t A <= B^2 + t^2`` for all t > 0."""
    S, Bq = _pencil(A, B, squared=True)
    return _scan(S, Bq, cfg or DecisionConfig(), squared=True)


def brute_force_order(A, B, samples: int = 10_000, seed=0, squared: bool = False, tol: float = 1e-9) -> Verdict:
    """Refutation by sampling unit vectors; never returns HOLDS.

    Besides ``samples`` random complex unit vectors, every eigenvector of
    ``S``, ``A`` and ``B`` is tried. A vector counts as violating when
    ``<S x, x>^2 - <B x, x> > tol``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    S, Bq = _pencil(A, B, squared)
    A = check_psd(A)
    B = check_psd(B)
    n = S.shape[0]
    rng = np.random.default_rng(seed)

    fixed = [eig_hermitian(M).eigenvectors.T for M in (S, A, B)]
    best_val, best_xi = math.inf, None
    remaining = samples
    chunk_id = 0
    while remaining > 0 or chunk_id == 0:
        if chunk_id == 0:
            X = np.concatenate(fixed)
        else:
            m = min(remaining, 20_000)
            remaining -= m
            X = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        X = X / np.linalg.norm(X, axis=1, keepdims=True)
        s = np.real(np.einsum("ki,ij,kj->k", X.conj(), S, X))
        b = np.real(np.einsum("ki,ij,kj->k", X.conj(), Bq, X))
        vals = b - s * s
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_xi = float(vals[j]), X[j]
        chunk_id += 1

    if best_val < -tol:
        t = float(np.real(np.vdot(best_xi, S @ best_xi)))
        return Verdict(Outcome.FAILS, FailsCertificate(t, best_xi, quadratic_form(S, Bq, t, best_xi)), squared)
    return Verdict(Outcome.UNDECIDED, UndecidedCertificate(best_val, 0.0), squared)


def recheck(verdict: Verdict, A, B) -> bool:
    """Re-validate a verdict's certificate against the input pair.

    FAILS: the quadratic form at ``(t, xi)`` is negative beyond the slack
    floor of 1e-12. HOLDS: grid values are recomputed and the stated
    bound re-derived. UNDECIDED carries nothing to check.
    """
    S, Bq = _pencil(A, B, verdict.squared)
    cert = verdict.certificate
    if isinstance(cert, FailsCertificate):
        if abs(np.linalg.norm(cert.xi) - 1.0) > 1e-12:
            return False
        return quadratic_form(S, Bq, cert.t, cert.xi) < -1e-12
    if isinstance(cert, HoldsCertificate):
        w = eig_hermitian(S).eigenvalues
        ts = np.asarray(cert.grid, dtype=float)
        tol = 1e-9 * max(1.0, float(w[-1]))
        if abs(ts[0] - w[0]) > tol or abs(ts[-1] - w[-1]) > tol:
            return False
        g, _ = _lambda_min_on(S, Bq, ts)
        if cert.kind == "point":
            return bool(g[0] >= -cert.slack)
        if cert.kind == "lipschitz":
            h = float(np.diff(ts).max())
            L = 4.0 * max(abs(w[0]), abs(w[-1]))
            return bool(g.min() > 0 and g.min() >= L * h / 2.0)
        return bool(_concave_segment_bounds(ts, g).min() >= -cert.slack)
    return True


@dataclass(frozen=True)
class HalflineMin:
    t_star: float
    value: float
    attained: bool


def min_halfline(q: float) -> HalflineMin:
    """Minimize ``q / (2t) + t / 2`` over ``t > 0``.

    By AM-GM the minimum is ``sqrt(q)`` at ``t = sqrt(q)``; for ``q = 0``
    the infimum 0 is only approached as ``t -> 0``.
    """
    if q < 0:
        raise DomainError(f"q must be >= 0, got {q}")
    r = math.sqrt(q)
    return HalflineMin(r, r, q > 0)
