"""Enhanced degraded channel built from a realizing split and its KKT multipliers.

Given an optimal split (B1*, B2*) of ``R1 + mu R2`` on a degraded aligned
channel and multipliers (O1, O2, O3), the enhanced noises

    N1' = (N1^-1 + O1)^-1
    N2' = ((B1* + N2)^-1 + O2 / mu)^-1 - B1*
    N3' = N3

give a channel that is at least as good for both users, has the same rates
at (B1*, B2*), and satisfies the proportionality identity
``(I - A)(B1* + N1') = alpha A (B1* + N3')`` with ``alpha = 1/(mu - 1)``.
:func:`certify_enhancement` measures each of these facts numerically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .channel import ChannelInstance
from .exceptions import DegenerateEnhancementError, DomainError, InvalidInputError, UnsupportedCaseError
from .linalg import as_sym, inv_sym, min_eig
from .optimizer import KKT_TOL, KktMultipliers, _require_aligned_two_user
from .regions import CovarianceSplit, sdpc_rates

log = logging.getLogger(__name__)

ORDER_TOL = 1e-8
RATE_TOL = 1e-8


@dataclass(frozen=True)
class EnhancedNoise:
    N1p: NDArray
    N2p: NDArray
    N3p: NDArray

    def channel(self, original: ChannelInstance) -> ChannelInstance:
        return ChannelInstance.aligned([self.N1p, self.N2p], self.N3p, original.constraint)


@dataclass(frozen=True)
class ProportionalityCert:
    A: NDArray
    alpha: float
    residual: float
    # condition number of N3' - N1' in the solve for A
    cond: float = math.nan


@dataclass
class EnhancementCertificate:
    enhanced: EnhancedNoise
    prop: ProportionalityCert | None
    rate_gap: tuple
    kkt_enhanced_residual: tuple
    ordering_ok: bool
    mu: float
    ordering_min_eigs: dict = field(default_factory=dict)
    o3_minus_o2_min_eig: float = math.nan
    flags: list = field(default_factory=list)
    # residual of the second condition written with O3 - O2 instead of O3;
    # informational, it is not zero in general
    kkt2_with_o2_residual: float = math.nan

    @property
    def certified(self) -> bool:
        return not self.flags

    def to_dict(self) -> dict:
        p = self.prop
        return {
            "mu": self.mu,
            "certified": self.certified,
            "flags": list(self.flags),
            "N1p": self.enhanced.N1p.tolist(),
            "N2p": self.enhanced.N2p.tolist(),
            "N3p": self.enhanced.N3p.tolist(),
            "ordering_ok": self.ordering_ok,
            "ordering_min_eigs": dict(self.ordering_min_eigs),
            "proportionality": None
            if p is None
            else {"A": p.A.tolist(), "alpha_prop": p.alpha, "residual": p.residual, "cond": p.cond},
            "rate_gap_bits": list(self.rate_gap),
            "kkt_enhanced_residual": list(self.kkt_enhanced_residual),
            "o3_minus_o2_min_eig": self.o3_minus_o2_min_eig,
            "kkt2_with_o2_residual": self.kkt2_with_o2_residual,
        }


def build_enhanced(split: CovarianceSplit, mult: KktMultipliers, ch: ChannelInstance) -> EnhancedNoise:
    _require_aligned_two_user(ch)
    mu = mult.mu
    if not mu > 0:
        raise InvalidInputError(f"mu must be positive, got {mu}")
    B1 = split.B1
    N1p = inv_sym(inv_sym(ch.N1) + mult.O1)
    N2p = as_sym(inv_sym(inv_sym(B1 + ch.N2) + mult.O2 / mu) - B1)
    lo = min_eig(N2p)
    if lo <= 0:
        raise DomainError(f"enhanced N2' is not positive definite (min eigenvalue {lo:.3g}); multipliers are inconsistent")
    return EnhancedNoise(N1p, N2p, ch.N3)


def proportionality(split: CovarianceSplit, enhanced: EnhancedNoise, mu: float) -> ProportionalityCert:
    """Solve ``A (N3' - N1') = N2' - N1'`` and measure the proportionality identity."""
    if mu == 1.0:
        raise UnsupportedCaseError("proportionality needs mu > 1: alpha = 1/(mu - 1) is undefined at mu = 1")
    if mu < 1.0:
        raise UnsupportedCaseError(f"proportionality needs mu > 1, got {mu}")
    D = enhanced.N3p - enhanced.N1p
    cond = float(np.linalg.cond(D))
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateEnhancementError(f"N3' - N1' is singular (condition number {cond:.3g}); A is not unique")
    if cond > 1e8:
        log.info("N3' - N1' is ill-conditioned (condition number %.3g)", cond)
    # A D = E  <=>  D' A' = E'
    A = np.linalg.solve(D.T, (enhanced.N2p - enhanced.N1p).T).T
    alpha = 1.0 / (mu - 1.0)
    X = split.B1 + enhanced.N1p
    Z = split.B1 + enhanced.N3p
    I = np.eye(A.shape[0])
    residual = float(np.linalg.norm((I - A) @ X - alpha * A @ Z) / np.linalg.norm(X))
    return ProportionalityCert(A, alpha, residual, cond)


def certify_enhancement(
    split: CovarianceSplit,
    mult: KktMultipliers,
    ch: ChannelInstance,
    tol: float = KKT_TOL,
    order_tol: float = ORDER_TOL,
    rate_tol: float = RATE_TOL,
) -> EnhancementCertificate:
    """Measure ordering, proportionality, rate preservation and the enhanced KKT identities.

    Mathematical failures never raise; each one adds a message to ``flags``.
    """
    mu = mult.mu
    flags = []
    try:
        enh = build_enhanced(split, mult, ch)
    except DomainError as err:
        nan2 = (math.nan, math.nan)
        N2p = np.full_like(ch.N2, math.nan)
        return EnhancementCertificate(
            EnhancedNoise(inv_sym(inv_sym(ch.N1) + mult.O1), N2p, ch.N3),
            None, nan2, nan2, False, mu, flags=[str(err)],
        )

    scale = max(1.0, float(np.linalg.norm(ch.N3, 2)))
    eigs = {
        "N1 - N1p": min_eig(ch.N1 - enh.N1p),
        "N2 - N2p": min_eig(ch.N2 - enh.N2p),
        "N2p - N1p": min_eig(enh.N2p - enh.N1p),
        "N3p - N2p": min_eig(enh.N3p - enh.N2p),
    }
    ordering_ok = all(v >= -order_tol * scale for v in eigs.values())
    if not ordering_ok:
        bad = ", ".join(f"{k} ({v:.3g})" for k, v in eigs.items() if v < -order_tol * scale)
        flags.append(f"ordering violated: {bad}")
    if enh.N3p is not ch.N3:
        flags.append("eavesdropper noise was modified")

    prop = None
    if mu == 1.0:
        log.debug("proportionality not applicable at mu = 1")
    else:
        try:
            prop = proportionality(split, enh, mu)
            if not prop.residual <= tol:
                flags.append(f"proportionality residual {prop.residual:.3g} > {tol:g}")
        except (DegenerateEnhancementError, UnsupportedCaseError) as err:
            flags.append(str(err))

    r_orig = sdpc_rates((1, 2), split, ch)
    r_enh = sdpc_rates((1, 2), split, enh.channel(ch))
    gap = tuple(float(abs(a - b)) for a, b in zip(r_orig, r_enh))
    if not max(gap) <= rate_tol:
        flags.append(f"rate preservation gap {max(gap):.3g} bits > {rate_tol:g}")

    B1, tot = split.B1, split.total
    lhs = inv_sym(B1 + enh.N1p) + (mu - 1.0) * inv_sym(B1 + enh.N3p)
    rhs = mu * inv_sym(B1 + enh.N2p)
    k1 = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))
    # In the enhanced channel B2 carries no multiplier: since B2* O2 = 0,
    # mu (B* + N2')^-1 = mu (B* + N2)^-1 + O2, so the second condition reads
    # mu (B* + N2')^-1 = mu (B* + N3')^-1 + O3.
    lhs2 = mu * inv_sym(tot + enh.N2p)
    rhs2 = mu * inv_sym(tot + enh.N3p) + mult.O3
    k2 = float(np.linalg.norm(lhs2 - rhs2) / np.linalg.norm(lhs2))
    D = mult.O3 - mult.O2
    literal = float(np.linalg.norm(lhs2 - rhs2 + mult.O2) / np.linalg.norm(lhs2))
    if not max(k1, k2) <= tol:
        flags.append(f"enhanced KKT residuals {k1:.3g}, {k2:.3g} > {tol:g}")
    d_min = min_eig(as_sym(D))
    if d_min < -order_tol * max(1.0, float(np.linalg.norm(D, 2))):
        flags.append(f"O3 - O2 is not PSD (min eigenvalue {d_min:.3g})")
    o3_min = min_eig(mult.O3)
    if o3_min < -order_tol * max(1.0, float(np.linalg.norm(mult.O3, 2))):
        flags.append(f"O3 is not PSD (min eigenvalue {o3_min:.3g})")

    return EnhancementCertificate(
        enh, prop, gap, (k1, k2), ordering_ok, mu, eigs, d_min, flags, kkt2_with_o2_residual=literal
    )
