"""Closed-form secrecy regions for single-antenna receivers (MISOME).

Each user is served along one beam.  For encoding order (1, 2) and power
split ``alpha`` (user 1 gets ``alpha * P``):

    A11 = I + alpha P h1 h1'            B11 = I + alpha P H3'H3
    A22 = I + (1-alpha) P h2 h2' / (1 + alpha P (h2'psi1)^2)
    B22 = I + (1-alpha) P H3' (I + alpha P H3 psi1 psi1' H3')^-1 H3

with ``psi1`` the top generalized eigenvector of (A11, B11).  The rates are
``R_k = 1/2 [log2 lambda]+`` of the matching pencil.  Order (2, 1) swaps the
roles, giving the pencils labelled 21 and 12.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .channel import MisomeChannel
from .exceptions import DomainError, InvalidInputError
from .linalg import GenEigenPair, gen_eigen_max, inv_sym, min_eig
from .regions import (
    CovarianceSplit,
    RatePair,
    RegionPoint,
    RegionPointSet,
    convex_closure,
    validate_permutation,
)

log = logging.getLogger(__name__)

PERMUTATIONS = ((1, 2), (2, 1))


def _check_alpha(alpha: float) -> float:
    a = float(alpha)
    if not 0.0 <= a <= 1.0:
        raise InvalidInputError(f"alpha_split must lie in [0, 1], got {alpha}")
    return a


def _rate(lam: float) -> float:
    return 0.5 * max(math.log2(lam), 0.0)


@dataclass(frozen=True)
class PencilSet:
    """The two cascaded pencils of one encoding order.

    ``pairs`` maps a label (``"11"``, ``"22"`` for order (1, 2); ``"21"``,
    ``"12"`` for order (2, 1)) to its ``(A, B)`` matrices and ``eig`` to the
    top eigenpair.  The label's first digit is the user, the second its
    position in the encoding order.
    """

    perm: tuple
    alpha_split: float
    pairs: dict
    eig: dict

    def rates(self) -> RatePair:
        if self.perm == (1, 2):
            return RatePair(_rate(self.eig["11"].lambda_max), _rate(self.eig["22"].lambda_max))
        return RatePair(_rate(self.eig["12"].lambda_max), _rate(self.eig["21"].lambda_max))


def _first_pencil(h, H3, p):
    return np.eye(h.size) + p * np.outer(h, h), np.eye(h.size) + p * H3.T @ H3


def _second_pencil(h, H3, p_first, psi, p):
    t = h.size
    A = np.eye(t) + (p / (1.0 + p_first * float(h @ psi) ** 2)) * np.outer(h, h)
    g = H3 @ psi
    inner = inv_sym(np.eye(H3.shape[0]) + p_first * np.outer(g, g))
    B = np.eye(t) + p * H3.T @ inner @ H3
    return A, B


def build_pencils(ch: MisomeChannel, alpha_split: float, perm: Sequence[int] = (1, 2)) -> PencilSet:
    a = _check_alpha(alpha_split)
    perm = validate_permutation(perm, 2)
    P, H3 = ch.P, ch.H3
    p1, p2 = a * P, (1.0 - a) * P
    if perm == (1, 2):
        A11, B11 = _first_pencil(ch.h1, H3, p1)
        e11 = gen_eigen_max(A11, B11)
        A22, B22 = _second_pencil(ch.h2, H3, p1, e11.psi_max, p2)
        e22 = gen_eigen_max(A22, B22)
        return PencilSet(perm, a, {"11": (A11, B11), "22": (A22, B22)}, {"11": e11, "22": e22})
    A21, B21 = _first_pencil(ch.h2, H3, p2)
    e21 = gen_eigen_max(A21, B21)
    A12, B12 = _second_pencil(ch.h1, H3, p2, e21.psi_max, p1)
    e12 = gen_eigen_max(A12, B12)
    return PencilSet(perm, a, {"21": (A21, B21), "12": (A12, B12)}, {"21": e21, "12": e12})


def misome_rates(ch: MisomeChannel, alpha_split: float, perm: Sequence[int] = (1, 2)) -> RatePair:
    return build_pencils(ch, alpha_split, perm).rates()


def rank_one_split(ch: MisomeChannel, alpha_split: float, perm: Sequence[int] = (1, 2)) -> CovarianceSplit:
    """Beamformed covariances ``B_k = p_k psi psi'`` that realize :func:`misome_rates`."""
    ps = build_pencils(ch, alpha_split, perm)
    a, P = ps.alpha_split, ch.P
    if ps.perm == (1, 2):
        v1, v2 = ps.eig["11"].psi_max, ps.eig["22"].psi_max
    else:
        v1, v2 = ps.eig["12"].psi_max, ps.eig["21"].psi_max
    return CovarianceSplit((a * P * np.outer(v1, v1), (1.0 - a) * P * np.outer(v2, v2)))


def default_alpha_grid(n: int = 101) -> NDArray:
    if n < 2:
        raise InvalidInputError("an alpha grid needs at least two points")
    return np.linspace(0.0, 1.0, n)


def misome_sweep(
    ch: MisomeChannel,
    alpha_grid: Sequence[float] | None = None,
    perms: Sequence[Sequence[int]] = PERMUTATIONS,
) -> RegionPointSet:
    """Rate pairs for every (order, alpha) combination, in that nesting order."""
    grid = default_alpha_grid() if alpha_grid is None else [float(a) for a in alpha_grid]
    if len(grid) == 0:
        raise InvalidInputError("alpha grid is empty")
    points = []
    for perm in perms:
        perm = validate_permutation(perm, 2)
        for a in grid:
            points.append(RegionPoint(misome_rates(ch, a, perm), {"alpha_split": a, "permutation": perm}))
    return RegionPointSet(points)


def misome_region(
    ch: MisomeChannel,
    alpha_grid: Sequence[float] | None = None,
    perms: Sequence[Sequence[int]] = PERMUTATIONS,
) -> RegionPointSet:
    return convex_closure(misome_sweep(ch, alpha_grid, perms))


# ---------------------------------------------------------------------------
# high SNR


@dataclass
class HighSnrRectangles:
    """Limiting rectangles as P grows, one per encoding order.

    ``corner_12`` bounds (R1, R2) for order (1, 2) and ``corner_21`` for
    order (2, 1).  A zero cross-gain constant makes the matching corner
    infinite; ``diagnostics`` then says why.
    """

    lambda1: float
    lambda2: float
    psi1: NDArray
    psi2: NDArray
    a: float
    b: float
    corner_12: tuple
    corner_21: tuple
    hull: RegionPointSet | None
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "psi1": self.psi1.tolist(),
            "psi2": self.psi2.tolist(),
            "a": self.a,
            "b": self.b,
            "rectangle_12": {"R1_bits": self.corner_12[0], "R2_bits": self.corner_12[1]},
            "rectangle_21": {"R1_bits": self.corner_21[0], "R2_bits": self.corner_21[1]},
            "hull": None if self.hull is None else self.hull.as_array().tolist(),
            "diagnostics": list(self.diagnostics),
        }


def misome_highsnr(ch: MisomeChannel) -> HighSnrRectangles:
    """High-SNR rectangles from the power-free pencils ``(h_i h_i', H3'H3)``.

    With ``b = (h2'psi1)^2 / |H3 psi1|^2`` and ``a = (h1'psi2)^2 / |H3 psi2|^2``:
    order (1, 2) gives ``R1 <= 1/2 [log2 lambda1]+``, ``R2 <= 1/2 [log2 lambda2/b]+``;
    order (2, 1) gives ``R1 <= 1/2 [log2 lambda1/a]+``, ``R2 <= 1/2 [log2 lambda2]+``.
    """
    G = ch.H3.T @ ch.H3
    lo = min_eig(G)
    if lo <= 1e-12 * max(1.0, float(np.linalg.norm(G, 2))):
        raise DomainError(f"H3'H3 is singular (min eigenvalue {lo:.3g}); the high-SNR pencils are undefined")
    e1 = gen_eigen_max(np.outer(ch.h1, ch.h1), G)
    e2 = gen_eigen_max(np.outer(ch.h2, ch.h2), G)
    psi1, psi2 = e1.psi_max, e2.psi_max
    b = float(ch.h2 @ psi1) ** 2 / float(np.sum((ch.H3 @ psi1) ** 2))
    a = float(ch.h1 @ psi2) ** 2 / float(np.sum((ch.H3 @ psi2) ** 2))
    diagnostics = []

    def ratio_rate(lam, c, name):
        if c <= 0.0:
            diagnostics.append(f"{name} = 0: the cross user's beam is orthogonal to the other gain, corner is unbounded")
            return math.inf
        return 0.5 * max(math.log2(lam / c), 0.0)

    c12 = (0.5 * max(math.log2(e1.lambda_max), 0.0), ratio_rate(e2.lambda_max, b, "b"))
    c21 = (ratio_rate(e1.lambda_max, a, "a"), 0.5 * max(math.log2(e2.lambda_max), 0.0))
    for gap, name in ((e1.gap, "psi1"), (e2.gap, "psi2")):
        if gap < 1e-10:
            diagnostics.append(f"top eigenvalue for {name} is repeated; the constants depend on the eigenvector choice")
    hull = None
    if all(math.isfinite(v) for v in (*c12, *c21)):
        hull = convex_closure(RegionPointSet.from_pairs([c12, c21], {"kind": "high-snr corner"}))
    return HighSnrRectangles(e1.lambda_max, e2.lambda_max, psi1, psi2, a, b, c12, c21, hull, diagnostics)


# ---------------------------------------------------------------------------
# m receivers


def _check_simplex(alphas: Sequence[float], m: int) -> NDArray:
    a = np.asarray(alphas, dtype=float).reshape(-1)
    if a.size != m:
        raise InvalidInputError(f"need {m} power shares, got {a.size}")
    if np.any(a < 0) or abs(float(a.sum()) - 1.0) > 1e-9:
        raise InvalidInputError(f"power shares must be non-negative and sum to 1, got {a.tolist()}")
    return a


def misome_beams_m(ch: MisomeChannel, alphas: Sequence[float], perm: Sequence[int]) -> tuple:
    """Top eigenpairs of every user's pencil for encoding order ``perm``.

    Returns ``(pairs, alphas)`` where ``pairs[k]`` is user ``k+1``'s
    :class:`GenEigenPair`.  The accumulator for the user at position ``j``
    is ``sum_{i<j} alpha_pi(i) P psi_pi(i) psi_pi(i)'``.
    """
    m = len(ch.h)
    a = _check_simplex(alphas, m)
    perm = validate_permutation(perm, m)
    t, P, H3 = ch.t, ch.P, ch.H3
    acc = np.zeros((t, t))
    pairs: list[GenEigenPair | None] = [None] * m
    for user in perm:
        k = user - 1
        h, pk = ch.h[k], a[k] * P
        A = np.eye(t) + (pk / (1.0 + float(h @ acc @ h))) * np.outer(h, h)
        inner = inv_sym(np.eye(H3.shape[0]) + H3 @ acc @ H3.T)
        B = np.eye(t) + pk * H3.T @ inner @ H3
        pairs[k] = gen_eigen_max(A, B)
        acc = acc + pk * np.outer(pairs[k].psi_max, pairs[k].psi_max)
    return pairs, a


def misome_rates_m(ch: MisomeChannel, alphas: Sequence[float], perm: Sequence[int]) -> NDArray:
    """Per-user rates ``1/2 [log2 lambda_k]+`` for m single-antenna receivers."""
    pairs, _ = misome_beams_m(ch, alphas, perm)
    return np.array([_rate(p.lambda_max) for p in pairs])


def rank_one_split_m(ch: MisomeChannel, alphas: Sequence[float], perm: Sequence[int]) -> CovarianceSplit:
    pairs, a = misome_beams_m(ch, alphas, perm)
    return CovarianceSplit(tuple(a[k] * ch.P * np.outer(p.psi_max, p.psi_max) for k, p in enumerate(pairs)))
