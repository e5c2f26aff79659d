"""Secrecy rate evaluation and convex closure of rate points.

All rates are in bits per channel use.  ``sdpc_rates`` evaluates the secret
dirty-paper-coding rates of a general channel for any encoding order; on an
aligned channel with the identity order it coincides with ``gaussian_rates``
(secret superposition coding on a degraded channel).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .channel import SADBC, ChannelInstance, InputConstraint, classify
from .exceptions import DomainError, InvalidInputError
from .linalg import PSD_TOL, as_sym, log_det_batch, min_eig


@dataclass(frozen=True)
class CovarianceSplit:
    """Transmit covariance shares ``B_1 .. B_m``, one per receiver."""

    B: tuple

    def __post_init__(self):
        Bs = tuple(as_sym(b, f"B{k + 1}") for k, b in enumerate(self.B))
        if not Bs:
            raise InvalidInputError("a split needs at least one covariance share")
        if any(b.shape != Bs[0].shape for b in Bs):
            raise InvalidInputError("covariance shares must share one dimension")
        object.__setattr__(self, "B", Bs)

    @classmethod
    def of(cls, *B: ArrayLike) -> "CovarianceSplit":
        return cls(tuple(B))

    @classmethod
    def zeros(cls, t: int, m: int = 2) -> "CovarianceSplit":
        return cls(tuple(np.zeros((t, t)) for _ in range(m)))

    @property
    def B1(self):
        return self.B[0]

    @property
    def B2(self):
        return self.B[1]

    @property
    def total(self) -> NDArray:
        return sum(self.B)

    def violations(self, constraint: InputConstraint, tol: float = PSD_TOL) -> list[str]:
        """Human-readable list of violated feasibility conditions (empty if feasible)."""
        scale = constraint.scale
        out = []
        for k, b in enumerate(self.B):
            lo = min_eig(b)
            if lo < -tol * scale:
                out.append(f"B{k + 1} is not PSD (min eigenvalue {lo:.3g})")
        if constraint.kind == "covariance":
            lo = min_eig(constraint.S - self.total)
            if lo < -tol * scale:
                out.append(f"sum of B_k exceeds S (min eigenvalue of S - sum B = {lo:.3g})")
        else:
            tr = float(np.trace(self.total))
            if tr > constraint.P * (1 + tol):
                out.append(f"trace of sum B_k is {tr:.6g} > P = {constraint.P:.6g}")
        return out

    def check(self, constraint: InputConstraint, tol: float = PSD_TOL) -> None:
        bad = self.violations(constraint, tol)
        if bad:
            raise InvalidInputError("infeasible split: " + "; ".join(bad))


@dataclass(frozen=True)
class RatePair:
    R1: float
    R2: float

    def __iter__(self):
        return iter((self.R1, self.R2))


def validate_permutation(perm: Sequence[int], m: int) -> tuple:
    p = tuple(int(i) for i in perm)
    if sorted(p) != list(range(1, m + 1)):
        raise InvalidInputError(f"{perm} is not a permutation of 1..{m}")
    return p


def _pos(x: float) -> float:
    return max(float(x), 0.0)


def _ld(M: NDArray) -> float:
    return float(log_det_batch(M))


def gaussian_rates(split: CovarianceSplit, ch: ChannelInstance, tol: float = PSD_TOL) -> RatePair:
    """Secret superposition coding rates of a degraded aligned channel.

    ``R1 = 1/2 [log|N1^-1 (B1+N1)| - log|N3^-1 (B1+N3)|]+`` and
    ``R2 = 1/2 [log |B1+B2+N2|/|B1+N2| - log |B1+B2+N3|/|B1+N3|]+``.
    """
    cls = classify(ch, tol)
    if cls.tag != SADBC or ch.m != 2:
        raise InvalidInputError(f"gaussian_rates needs a two-user SADBC, got {cls.tag}")
    split.check(ch.constraint, tol)
    B1, B2 = split.B1, split.B2
    N1, N2, N3 = ch.N1, ch.N2, ch.N3
    I = np.eye(ch.t)
    r1 = _ld(I + np.linalg.solve(N1, B1)) - _ld(I + np.linalg.solve(N3, B1))
    r2 = (_ld(B1 + B2 + N2) - _ld(B1 + N2)) - (_ld(B1 + B2 + N3) - _ld(B1 + N3))
    return RatePair(0.5 * _pos(r1), 0.5 * _pos(r2))


def sdpc_rates(
    perm: Sequence[int], split: CovarianceSplit, ch: ChannelInstance, tol: float = PSD_TOL
) -> NDArray:
    """Per-user secret DPC rates for encoding order ``perm`` (1-based).

    ``perm[i]`` is the user encoded at position ``i + 1``.  User ``k`` treats
    the shares of users at earlier positions as noise; later ones are
    pre-cancelled.  Returns an array whose entry ``k - 1`` is the rate of
    user ``k``.
    """
    if len(split.B) != ch.m:
        raise InvalidInputError(f"split has {len(split.B)} shares for {ch.m} receivers")
    if split.B[0].shape != (ch.t, ch.t):
        raise InvalidInputError(f"shares must be {ch.t}x{ch.t}")
    p = validate_permutation(perm, ch.m)
    split.check(ch.constraint, tol)
    rates = np.zeros(ch.m)
    cum_prev = np.zeros((ch.t, ch.t))
    for user in p:
        k = user - 1
        cum = cum_prev + split.B[k]
        H, N = ch.H[k], ch.N[k]
        legit = _ld(H @ cum @ H.T + N) - _ld(H @ cum_prev @ H.T + N)
        eve = _ld(ch.H3 @ cum @ ch.H3.T + ch.N3) - _ld(ch.H3 @ cum_prev @ ch.H3.T + ch.N3)
        rates[k] = 0.5 * _pos(legit - eve)
        cum_prev = cum
    return rates


def dpc_matrix(B1: ArrayLike, N1: ArrayLike) -> tuple[NDArray, NDArray]:
    """Dirty-paper precoder ``C = B1 (N1 + B1)^-1`` and its complement ``N1 (N1 + B1)^-1``."""
    B1 = as_sym(B1, "B1")
    N1 = as_sym(N1, "N1")
    if B1.shape != N1.shape:
        raise InvalidInputError("B1 and N1 must have the same shape")
    M = N1 + B1
    if np.linalg.cond(M) > 1e14:
        raise DomainError("N1 + B1 is numerically singular")
    # solve from the right: X M = B1  <=>  M X' = B1 (M, B1 symmetric)
    C = np.linalg.solve(M, B1).T
    I_minus_C = np.linalg.solve(M, N1).T
    return C, I_minus_C


# ---------------------------------------------------------------------------
# region assembly


@dataclass(frozen=True)
class RegionPoint:
    rates: RatePair
    provenance: dict = field(default_factory=dict, compare=False)


@dataclass
class RegionPointSet:
    points: list

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_array(self) -> NDArray:
        if not self.points:
            return np.zeros((0, 2))
        return np.array([[p.rates.R1, p.rates.R2] for p in self.points], dtype=float)

    @classmethod
    def from_pairs(cls, pairs: Iterable, provenance: dict | None = None) -> "RegionPointSet":
        return cls([RegionPoint(RatePair(float(a), float(b)), dict(provenance or {})) for a, b in pairs])

    def union(self, other: "RegionPointSet") -> "RegionPointSet":
        return RegionPointSet(list(self.points) + list(other.points))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_closure(points: RegionPointSet) -> RegionPointSet:
    """Upper-right boundary of the convex hull of ``points`` with free rate disposal.

    The region is the hull of the points, the origin and their projections on
    both axes.  Returns its Pareto boundary as vertices sorted by ``R1``
    ascending: it starts on the ``R2`` axis and ends on the ``R1`` axis.
    A region reduced to the origin is returned as the single point (0, 0).
    """
    if len(points) == 0:
        raise InvalidInputError("convex_closure needs at least one point")
    pts = points.as_array()
    if np.any(pts < 0) or not np.all(np.isfinite(pts)):
        raise InvalidInputError("rate points must be finite and non-negative")
    r1max, r2max = pts[:, 0].max(), pts[:, 1].max()
    cand = {}
    for p in points.points:
        cand.setdefault((p.rates.R1, p.rates.R2), p)
    for xy in ((0.0, r2max), (r1max, 0.0), (0.0, 0.0)):
        cand.setdefault(xy, RegionPoint(RatePair(*xy), {"kind": "projection"}))
    # upper hull, monotone chain, left to right; ties in R1 keep the higher R2 last
    order = sorted(cand)
    chain: list = []
    for xy in order:
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], xy) >= 0:
            chain.pop()
        chain.append(xy)
    # drop the chain's lower-left entries below (0, r2max)
    start = chain.index((0.0, r2max)) if (0.0, r2max) in chain else 0
    chain = chain[start:]
    if chain[-1] != (r1max, 0.0):
        chain.append((r1max, 0.0))
    out, seen = [], set()
    for xy in chain:
        if xy not in seen:
            seen.add(xy)
            out.append(cand[xy])
    return RegionPointSet(out)


def hull_contains(hull: RegionPointSet, point: Sequence[float], tol: float = 1e-12) -> bool:
    """Is ``point`` inside the region whose boundary ``convex_closure`` returned?"""
    V = hull.as_array()
    x, y = float(point[0]), float(point[1])
    if x < -tol or y < -tol:
        return False
    if x > V[:, 0].max() + tol or y > V[:, 1].max() + tol:
        return False
    for a, b in zip(V[:-1], V[1:]):
        if _cross(a, b, (x, y)) > tol * max(1.0, np.hypot(*(b - a))):
            return False
    return True
