"""Gaussian MIMO broadcast channel with an external eavesdropper.

A :class:`ChannelInstance` holds ``m`` legitimate receivers (gain ``H_k``,
noise covariance ``N_k``), one eavesdropper (``H3``, ``N3``) and the input
constraint.  Two-receiver channels are the common case and expose the
``H1, H2, N1, N2`` shorthands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DomainError, InvalidInputError
from .linalg import PSD_TOL, as_sym, inv_sqrtm_pd, min_eig, psd_leq

SGMBC = "SGMBC"
SAMBC = "SAMBC"
SADBC = "SADBC"
MISOME = "MISOME"


@dataclass(frozen=True)
class InputConstraint:
    """Either ``E[xx'] <= S`` (kind ``"covariance"``) or ``tr E[xx'] <= P``."""

    kind: str
    S: NDArray | None = None
    P: float | None = None

    def __post_init__(self):
        if self.kind == "covariance":
            if self.S is None:
                raise InvalidInputError("covariance constraint needs S")
            S = as_sym(self.S, "S")
            if min_eig(S) < -PSD_TOL * max(1.0, np.linalg.norm(S, 2)):
                raise InvalidInputError(f"S must be PSD (min eigenvalue {min_eig(S):.6g})")
            object.__setattr__(self, "S", S)
        elif self.kind == "power":
            if self.P is None or not np.isfinite(self.P) or self.P <= 0:
                raise InvalidInputError(f"power constraint needs P > 0, got {self.P}")
            object.__setattr__(self, "P", float(self.P))
        else:
            raise InvalidInputError(f"unknown constraint kind {self.kind!r}")

    @classmethod
    def covariance(cls, S: ArrayLike) -> "InputConstraint":
        return cls("covariance", S=S)

    @classmethod
    def power(cls, P: float) -> "InputConstraint":
        return cls("power", P=P)

    @property
    def scale(self) -> float:
        """Magnitude used for relative tolerances on covariance shares."""
        if self.kind == "covariance":
            return float(max(np.linalg.norm(self.S, 2), 1e-300))
        return self.P


def _gain(H, name):
    A = np.array(H, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    elif A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2 or A.size == 0:
        raise InvalidInputError(f"{name} must be a 2-D gain matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return A


def _noise(N, name, r):
    A = as_sym(N, name)
    if A.shape != (r, r):
        raise InvalidInputError(f"{name} must be {r}x{r} to match its gain matrix, got {A.shape}")
    lo = min_eig(A)
    if lo <= 0:
        raise DomainError(f"{name} must be positive definite (min eigenvalue {lo:.6g})")
    return A


@dataclass(frozen=True)
class ChannelInstance:
    """Legitimate receivers ``y_k = H_k x + n_k`` and eavesdropper ``z = H3 x + n3``."""

    H: tuple
    N: tuple
    H3: NDArray
    N3: NDArray
    constraint: InputConstraint

    def __post_init__(self):
        if len(self.H) != len(self.N) or len(self.H) < 1:
            raise InvalidInputError("need one noise covariance per legitimate receiver")
        Hs = tuple(_gain(H, f"H{k + 1}") for k, H in enumerate(self.H))
        H3 = _gain(self.H3, "H3")
        t = H3.shape[1]
        for k, H in enumerate(Hs):
            if H.shape[1] != t:
                raise InvalidInputError(f"H{k + 1} has {H.shape[1]} columns, H3 has {t}")
        Ns = tuple(_noise(N, f"N{k + 1}", H.shape[0]) for k, (H, N) in enumerate(zip(Hs, self.N)))
        N3 = _noise(self.N3, "N3", H3.shape[0])
        if self.constraint.kind == "covariance" and self.constraint.S.shape != (t, t):
            raise InvalidInputError(f"S must be {t}x{t}, got {self.constraint.S.shape}")
        object.__setattr__(self, "H", Hs)
        object.__setattr__(self, "N", Ns)
        object.__setattr__(self, "H3", H3)
        object.__setattr__(self, "N3", N3)

    @classmethod
    def two_user(cls, H1, H2, H3, N1, N2, N3, constraint: InputConstraint) -> "ChannelInstance":
        return cls((H1, H2), (N1, N2), H3, N3, constraint)

    @classmethod
    def aligned(cls, N: Sequence[ArrayLike], N3: ArrayLike, constraint: InputConstraint):
        """Aligned channel: every gain is the identity."""
        N3 = as_sym(N3, "N3")
        I = np.eye(N3.shape[0])
        return cls(tuple(I for _ in N), tuple(N), I, N3, constraint)

    @property
    def t(self) -> int:
        return self.H3.shape[1]

    @property
    def m(self) -> int:
        return len(self.H)

    @property
    def H1(self):
        return self.H[0]

    @property
    def H2(self):
        return self.H[1]

    @property
    def N1(self):
        return self.N[0]

    @property
    def N2(self):
        return self.N[1]

    def replace(self, **changes) -> "ChannelInstance":
        fields = dict(H=self.H, N=self.N, H3=self.H3, N3=self.N3, constraint=self.constraint)
        fields.update(changes)
        return ChannelInstance(**fields)


@dataclass(frozen=True)
class ChannelClass:
    tag: str
    degradation_order_ok: bool


def is_aligned(ch: ChannelInstance, tol: float = PSD_TOL) -> bool:
    t = ch.t
    I = np.eye(t)
    for H in (*ch.H, ch.H3):
        if H.shape != (t, t) or np.max(np.abs(H - I)) > tol:
            return False
    return True


def degraded_order(ch: ChannelInstance, tol: float = PSD_TOL) -> bool:
    """``N1 <= N2 <= ... <= Nm <= N3`` in the Loewner order (aligned channels only)."""
    chain = (*ch.N, ch.N3)
    return all(psd_leq(a, b, tol) for a, b in zip(chain[:-1], chain[1:]))


def classify(ch: ChannelInstance, tol: float = PSD_TOL) -> ChannelClass:
    """Place a channel in the SGMBC / SAMBC / SADBC / MISOME taxonomy.

    Aligned channels (all gains equal to the identity) are SAMBC, and SADBC
    when their noises are ordered.  A non-aligned channel whose legitimate
    receivers all have a single antenna is MISOME; scalar receiver noise is
    normalized away when converting with :func:`to_misome`.
    """
    if is_aligned(ch, tol):
        ordered = degraded_order(ch, tol)
        return ChannelClass(SADBC if ordered else SAMBC, ordered)
    if ch.m >= 2 and all(H.shape[0] == 1 for H in ch.H):
        return ChannelClass(MISOME, False)
    return ChannelClass(SGMBC, False)


def aligned_from_general(ch: ChannelInstance) -> ChannelInstance:
    """Equivalent aligned channel with noises ``H_i^{-1} N_i H_i^{-T}``.

    Log-det ratios are unchanged, so every SDPC rate is preserved.
    """
    if is_aligned(ch, 0.0):
        return ch
    names = [f"H{k + 1}" for k in range(ch.m)] + ["H3"]
    new_noise = []
    for name, H, N in zip(names, (*ch.H, ch.H3), (*ch.N, ch.N3)):
        if H.shape[0] != H.shape[1]:
            raise DomainError(f"{name} is not square ({H.shape}); cannot align")
        if np.linalg.matrix_rank(H) < H.shape[0]:
            raise DomainError(f"{name} is singular; cannot align")
        Hi = np.linalg.inv(H)
        new_noise.append(as_sym(Hi @ N @ Hi.T, f"aligned noise of {name}"))
    I = np.eye(ch.t)
    return ChannelInstance(tuple(I for _ in ch.H), tuple(new_noise[:-1]), I, new_noise[-1], ch.constraint)


def whiten_eavesdropper(ch: ChannelInstance) -> ChannelInstance:
    """Rescale the eavesdropper so its noise is the identity."""
    W = inv_sqrtm_pd(ch.N3, "N3")
    return ch.replace(H3=W @ ch.H3, N3=np.eye(ch.H3.shape[0]))


@dataclass(frozen=True)
class MisomeChannel:
    """Single-antenna receivers ``y_k = h_k' x + n_k`` with unit noise, eavesdropper ``H3``.

    ``h`` holds one gain vector per receiver (two for the standard case).
    ``noise_scaling`` records the factors ``1/sqrt(N_k)`` applied when the
    instance was normalized from a general channel.
    """

    h: tuple
    H3: NDArray
    P: float
    noise_scaling: tuple = field(default=())

    def __post_init__(self):
        hs = tuple(np.asarray(v, dtype=float).reshape(-1) for v in self.h)
        H3 = np.atleast_2d(np.asarray(self.H3, dtype=float))
        if len(hs) < 2:
            raise InvalidInputError("MISOME needs at least two receivers")
        t = hs[0].size
        for k, v in enumerate(hs):
            if v.size != t:
                raise InvalidInputError(f"h{k + 1} has length {v.size}, expected {t}")
            if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
                raise InvalidInputError(f"h{k + 1} must be a finite non-zero vector")
        if H3.shape[1] != t or not np.all(np.isfinite(H3)):
            raise InvalidInputError(f"H3 must be finite with {t} columns, got shape {H3.shape}")
        if not np.isfinite(self.P) or self.P <= 0:
            raise InvalidInputError(f"P must be positive, got {self.P}")
        object.__setattr__(self, "h", hs)
        object.__setattr__(self, "H3", H3)
        object.__setattr__(self, "P", float(self.P))

    @property
    def t(self) -> int:
        return self.h[0].size

    @property
    def h1(self):
        return self.h[0]

    @property
    def h2(self):
        return self.h[1]

    def with_power(self, P: float) -> "MisomeChannel":
        return MisomeChannel(self.h, self.H3, P, self.noise_scaling)

    def to_channel(self) -> ChannelInstance:
        """The same channel as a general :class:`ChannelInstance` under a power constraint."""
        r3 = self.H3.shape[0]
        return ChannelInstance(
            tuple(v.reshape(1, -1) for v in self.h),
            tuple(np.eye(1) for _ in self.h),
            self.H3,
            np.eye(r3),
            InputConstraint.power(self.P),
        )


def to_misome(ch: ChannelInstance) -> MisomeChannel:
    """Normalize a single-antenna-receiver channel to unit noises."""
    if not all(H.shape[0] == 1 for H in ch.H):
        raise InvalidInputError("MISOME requires 1 x t gain rows for every legitimate receiver")
    if ch.constraint.kind != "power":
        raise InvalidInputError("MISOME requires a total power constraint P")
    scaling = tuple(1.0 / np.sqrt(float(N[0, 0])) for N in ch.N)
    h = tuple(s * H[0] for s, H in zip(scaling, ch.H))
    H3 = inv_sqrtm_pd(ch.N3, "N3") @ ch.H3
    return MisomeChannel(h, H3, ch.constraint.P, scaling)
