"""Weighted secrecy sum-rate maximization and KKT multiplier recovery.

The realizing covariance split of a boundary point solves

    max  gamma1 * R1(B1, B2) + gamma2 * R2(B1, B2)
    s.t. B1, B2 >= 0,  B1 + B2 <= S

which is nonconvex.  ``maximize_weighted_sum`` runs a multi-start compass
(pattern) search on Cholesky-like factors ``B_k = L_k L_k'`` followed by a
feasibility projection.  All restarts advance together so every probe of an
iteration is one batched log-det call.

On degraded aligned channels (SADBC) the optimum always uses the full
covariance budget, B2 = S - B1, so the search runs over B1 alone and the
result is polished by projected gradient ascent in S-whitened coordinates.
The polish recovers the exact active sets that multiplier recovery needs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .channel import SADBC, ChannelInstance, InputConstraint, classify, is_aligned
from .exceptions import InvalidInputError, NonStationaryError, UnsupportedCaseError
from .linalg import as_sym, inv_sqrtm_pd, inv_sym, log_det_batch, null_basis, psd_part, sqrtm_psd
from .regions import (
    CovarianceSplit,
    RatePair,
    RegionPoint,
    RegionPointSet,
    sdpc_rates,
    validate_permutation,
)

log = logging.getLogger(__name__)

KKT_TOL = 1e-5
ACTIVE_TOL = 1e-8
LN2 = math.log(2.0)


@dataclass(frozen=True)
class SearchBudget:
    max_iter: int = 2000
    restarts: int = 32
    seed: int = 0
    # pattern search stops once the step falls below min_step * sqrt(scale)
    min_step: float = 1e-7
    polish: bool = True

    def __post_init__(self):
        if self.max_iter < 1 or self.restarts < 1:
            raise InvalidInputError("max_iter and restarts must be positive")


@dataclass(frozen=True)
class WeightedObjective:
    """Weights of ``gamma1 * R1 + gamma2 * R2``."""

    gamma1: float
    gamma2: float

    def __post_init__(self):
        g1, g2 = float(self.gamma1), float(self.gamma2)
        if not (np.isfinite(g1) and np.isfinite(g2)) or g1 < 0 or g2 < 0 or g1 == g2 == 0:
            raise InvalidInputError(f"weights must be non-negative and not both zero: ({g1}, {g2})")
        object.__setattr__(self, "gamma1", g1)
        object.__setattr__(self, "gamma2", g2)

    @classmethod
    def from_mu(cls, mu: float) -> "WeightedObjective":
        """The ``R1 + mu * R2`` objective."""
        return cls(1.0, mu)

    @property
    def mu(self) -> float:
        return self.gamma2 / self.gamma1 if self.gamma1 > 0 else math.inf

    @property
    def weights(self) -> NDArray:
        return np.array([self.gamma1, self.gamma2])

    def value(self, rates: Sequence[float]) -> float:
        return self.gamma1 * float(rates[0]) + self.gamma2 * float(rates[1])


@dataclass(frozen=True)
class KktMultipliers:
    O1: NDArray
    O2: NDArray
    O3: NDArray
    mu: float
    residuals: tuple = (math.nan, math.nan)


@dataclass
class SolveReport:
    split: CovarianceSplit
    rates: RatePair
    objective: float
    kkt_residual: float
    restarts_used: int
    converged: bool
    weighting: WeightedObjective | None = None
    permutation: tuple = (1, 2)
    multipliers: KktMultipliers | None = None
    # best objective over all restarts after each iteration (non-decreasing)
    history: list = field(default_factory=list, repr=False)


# ---------------------------------------------------------------------------
# feasibility


def _constraint_of(S_or_constraint) -> InputConstraint:
    if isinstance(S_or_constraint, InputConstraint):
        return S_or_constraint
    return InputConstraint.covariance(S_or_constraint)


def project_feasible(raw: CovarianceSplit, S) -> CovarianceSplit:
    """Clip each share to its PSD part, then shrink all shares until they fit.

    With a covariance constraint the common factor is
    ``c = lambda_max(S^-1/2 (sum B) S^-1/2)``; with a power constraint it is
    ``trace(sum B) / P``.  Nothing is scaled when ``c <= 1``.
    """
    cons = _constraint_of(S)
    Bs = [psd_part(b) for b in raw.B]
    total = sum(Bs)
    if cons.kind == "covariance":
        W = inv_sqrtm_pd(cons.S, "S")
        c = float(np.linalg.eigvalsh(as_sym(W @ total @ W))[-1])
    else:
        c = float(np.trace(total)) / cons.P
    if c > 1.0:
        Bs = [b / c for b in Bs]
    return CovarianceSplit(tuple(Bs))


# ---------------------------------------------------------------------------
# batched objectives


def _batch_rates(ch: ChannelInstance, perm: tuple, B: NDArray) -> NDArray:
    """Clamped SDPC rates for a stack of splits ``B`` of shape (n, m, t, t)."""
    n = B.shape[0]
    rates = np.zeros((n, ch.m))
    prev = np.zeros((n, ch.t, ch.t))
    for user in perm:
        k = user - 1
        cum = prev + B[:, k]
        H, H3 = ch.H[k], ch.H3
        legit = log_det_batch(H @ cum @ H.T + ch.N[k]) - log_det_batch(H @ prev @ H.T + ch.N[k])
        eve = log_det_batch(H3 @ cum @ H3.T + ch.N3) - log_det_batch(H3 @ prev @ H3.T + ch.N3)
        rates[:, k] = 0.5 * np.maximum(legit - eve, 0.0)
        prev = cum
    return rates


class _GeneralProblem:
    """Search over all m shares through their factors."""

    def __init__(self, ch: ChannelInstance, perm: tuple, obj: WeightedObjective):
        self.ch, self.perm, self.obj = ch, perm, obj
        self.t, self.m = ch.t, ch.m
        self.dim = self.m * self.t * self.t
        cons = ch.constraint
        self.scale = cons.scale
        if cons.kind == "covariance":
            self.W = inv_sqrtm_pd(cons.S, "S")
            self.base = cons.S
        else:
            self.W = None
            self.base = np.eye(self.t) * cons.P / self.t

    def shares(self, x: NDArray) -> NDArray:
        L = x.reshape(-1, self.m, self.t, self.t)
        B = L @ np.swapaxes(L, -1, -2)
        total = B.sum(axis=1)
        if self.W is not None:
            c = np.linalg.eigvalsh(self.W @ total @ self.W)[:, -1]
        else:
            c = np.trace(total, axis1=-2, axis2=-1) / self.ch.constraint.P
        return B / np.maximum(c, 1.0)[:, None, None, None]

    def evaluate(self, x: NDArray) -> NDArray:
        rates = _batch_rates(self.ch, self.perm, self.shares(x))
        return rates[:, 0] * self.obj.gamma1 + rates[:, 1] * self.obj.gamma2

    def starts(self, rng: np.random.Generator, restarts: int) -> NDArray:
        root = sqrtm_psd(self.base)
        fixed = []
        for fr in ((0.5, 0.5), (1.0, 0.0), (0.0, 1.0), (0.25, 0.25)):
            if self.m != 2:
                fr = (1.0 / self.m,) * self.m
            fixed.append(np.concatenate([np.sqrt(f) * root.ravel() for f in fr]))
        fixed = fixed[: min(len(fixed), restarts)]
        n_rand = restarts - len(fixed)
        rand = rng.standard_normal((n_rand, self.dim)) * math.sqrt(self.scale / self.t)
        return np.vstack([np.array(fixed), rand]) if n_rand else np.array(fixed)

    def split(self, x: NDArray) -> CovarianceSplit:
        B = self.shares(x[None])[0]
        return CovarianceSplit(tuple(B))


class _DegradedProblem:
    """SADBC: search over B1 only with B2 = S - B1, in S-whitened coordinates."""

    def __init__(self, ch: ChannelInstance, obj: WeightedObjective):
        self.ch, self.obj = ch, obj
        self.t = ch.t
        self.dim = self.t * self.t
        S = ch.constraint.S
        self.scale = ch.constraint.scale
        self.R = sqrtm_psd(S)
        W = inv_sqrtm_pd(S, "S")
        self.Nt = [as_sym(W @ N @ W) for N in (ch.N1, ch.N2, ch.N3)]
        I = np.eye(self.t)
        self.const1 = float(log_det_batch(self.Nt[2]) - log_det_batch(self.Nt[0]))
        self.const2 = float(log_det_batch(I + self.Nt[1]) - log_det_batch(I + self.Nt[2]))

    def X_of(self, x: NDArray) -> NDArray:
        L = x.reshape(-1, self.t, self.t)
        X = L @ np.swapaxes(L, -1, -2)
        c = np.linalg.eigvalsh(X)[:, -1]
        return X / np.maximum(c, 1.0)[:, None, None]

    def f(self, X: NDArray) -> NDArray:
        N1, N2, N3 = self.Nt
        l3 = log_det_batch(X + N3)
        r1 = 0.5 * np.maximum(self.const1 + log_det_batch(X + N1) - l3, 0.0)
        r2 = 0.5 * np.maximum(self.const2 - log_det_batch(X + N2) + l3, 0.0)
        return self.obj.gamma1 * r1 + self.obj.gamma2 * r2

    def evaluate(self, x: NDArray) -> NDArray:
        return self.f(self.X_of(x))

    def grad(self, X: NDArray) -> NDArray:
        N1, N2, N3 = self.Nt
        i1, i2, i3 = inv_sym(X + N1), inv_sym(X + N2), inv_sym(X + N3)
        g = self.obj.gamma1 * (i1 - i3) + self.obj.gamma2 * (i3 - i2)
        return g / (2.0 * LN2)

    def starts(self, rng: np.random.Generator, restarts: int) -> NDArray:
        I = np.eye(self.t)
        fixed = [math.sqrt(f) * I.ravel() for f in (0.5, 1.0, 0.0, 0.25)][:restarts]
        n_rand = restarts - len(fixed)
        rand = rng.standard_normal((n_rand, self.dim)) / math.sqrt(self.t)
        return np.vstack([np.array(fixed), rand]) if n_rand else np.array(fixed)

    def split_from_X(self, X: NDArray) -> CovarianceSplit:
        # both shares from one eigendecomposition so bounds hit exactly 0 or S
        w, V = np.linalg.eigh(as_sym(X))
        w = np.clip(w, 0.0, 1.0)
        RV = self.R @ V
        return CovarianceSplit(((RV * w) @ RV.T, (RV * (1.0 - w)) @ RV.T))

    def polish(self, X: NDArray, history: list, max_iter: int = 500) -> NDArray:
        """Projected gradient ascent on ``0 <= X <= I`` with Barzilai-Borwein steps."""

        def proj(Y):
            w, V = np.linalg.eigh(0.5 * (Y + Y.T))
            return (V * np.clip(w, 0.0, 1.0)) @ V.T

        X = proj(X)
        fx = float(self.f(X[None])[0])
        G = self.grad(X)
        s = 1.0
        for _ in range(max_iter):
            if np.linalg.norm(proj(X + G) - X) < 1e-12:
                break
            for _ in range(40):
                Xn = proj(X + s * G)
                fn = float(self.f(Xn[None])[0])
                if fn >= fx + 1e-4 * float(np.sum(G * (Xn - X))):
                    break
                s *= 0.5
            else:
                break
            dX = Xn - X
            if fn < fx or np.linalg.norm(dX) < 1e-14:
                break
            Gn = self.grad(Xn)
            dG = Gn - G
            X, fx, G = Xn, fn, Gn
            history.append(max(history[-1], fx) if history else fx)
            den = abs(float(np.sum(dX * dG)))
            s = float(np.clip(np.sum(dX * dX) / den, 1e-6, 1e6)) if den > 0 else 1.0
        return X


def _pattern_search(problem, x0: NDArray, step0: float, min_step: float, max_iter: int):
    """Compass search run on every row of ``x0`` simultaneously.

    A restart moves to its best improving probe and doubles its step (up to
    ``step0``), otherwise halves it.  Returns the final points, objective
    values, per-restart convergence flags and the incumbent history.
    """
    x = x0.copy()
    f = problem.evaluate(x)
    R, p = x.shape
    step = np.full(R, step0)
    active = np.ones(R, dtype=bool)
    D = np.vstack([np.eye(p), -np.eye(p)])
    history = [float(f.max())]
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        probes = x[idx, None, :] + step[idx, None, None] * D[None]
        fp = problem.evaluate(probes.reshape(-1, p)).reshape(idx.size, 2 * p)
        j = np.argmax(fp, axis=1)
        best = fp[np.arange(idx.size), j]
        better = best > f[idx]
        moved = idx[better]
        x[moved] = probes[better, j[better]]
        f[moved] = best[better]
        step[idx] = np.where(better, np.minimum(2.0 * step[idx], step0), 0.5 * step[idx])
        active[idx] = step[idx] >= min_step
        history.append(float(f.max()))
    return x, f, ~active, history


# ---------------------------------------------------------------------------
# solver entry point


def maximize_weighted_sum(
    ch: ChannelInstance,
    obj: WeightedObjective,
    budget: SearchBudget | None = None,
    perm: Sequence[int] = (1, 2),
) -> SolveReport:
    """Best split found for ``gamma1 * R1 + gamma2 * R2`` under encoding order ``perm``.

    The reported split is always feasible.  ``converged`` is False when the
    winning restart ran out of iterations before its step collapsed.
    """
    budget = budget or SearchBudget()
    if ch.m != 2:
        raise UnsupportedCaseError("weighted sum-rate search is implemented for two receivers")
    perm = validate_permutation(perm, ch.m)
    rng = np.random.default_rng(budget.seed)
    degraded = (
        perm == (1, 2)
        and ch.constraint.kind == "covariance"
        and classify(ch).tag == SADBC
    )
    if degraded:
        prob = _DegradedProblem(ch, obj)
        x0 = prob.starts(rng, budget.restarts)
        x, f, conv, history = _pattern_search(prob, x0, 0.5, budget.min_step, budget.max_iter)
        best = int(np.argmax(f))
        X = prob.X_of(x[best][None])[0]
        converged = bool(conv[best])
        if budget.polish:
            X = prob.polish(X, history)
            converged = True
        split = prob.split_from_X(X)
    else:
        prob = _GeneralProblem(ch, perm, obj)
        x0 = prob.starts(rng, budget.restarts)
        root = math.sqrt(prob.scale)
        x, f, conv, history = _pattern_search(
            prob, x0, 0.5 * root, budget.min_step * root, budget.max_iter
        )
        best = int(np.argmax(f))
        split = prob.split(x[best])
        converged = bool(conv[best])
    rates = sdpc_rates(perm, split, ch)
    value = obj.value(rates)
    history.append(max(history[-1], value))

    mult, resid = None, math.nan
    if degraded and obj.gamma1 > 0:
        try:
            mult = recover_multipliers(split, obj, ch)
            resid = max(mult.residuals)
        except NonStationaryError as err:
            resid = max(err.residuals)
            log.info("split is not KKT-stationary (residual %.3g)", resid)
    return SolveReport(
        split=split,
        rates=RatePair(float(rates[0]), float(rates[1])),
        objective=value,
        kkt_residual=resid,
        restarts_used=budget.restarts,
        converged=converged,
        weighting=obj,
        permutation=perm,
        multipliers=mult,
        history=history,
    )


# ---------------------------------------------------------------------------
# KKT conditions


def _kkt_terms(split: CovarianceSplit, ch: ChannelInstance, mu: float):
    B1, B2 = split.B1, split.B2
    N1, N2, N3 = ch.N1, ch.N2, ch.N3
    tot = B1 + B2
    # (3):   (B1+N1)^-1 + (mu-1)(B1+N3)^-1 + O1 = mu (B1+N2)^-1 + O2
    # (3_1): mu (B+N2)^-1 + O2 = mu (B+N3)^-1 + O3
    a3 = inv_sym(B1 + N1) + (mu - 1.0) * inv_sym(B1 + N3)
    b3 = mu * inv_sym(B1 + N2)
    a31 = mu * inv_sym(tot + N2)
    b31 = mu * inv_sym(tot + N3)
    return a3, b3, a31, b31


def _require_aligned_two_user(ch: ChannelInstance):
    if ch.m != 2 or not is_aligned(ch):
        raise UnsupportedCaseError("KKT conditions are formulated for two-user aligned channels")
    if ch.constraint.kind != "covariance":
        raise UnsupportedCaseError("KKT conditions are formulated for a covariance constraint")


def kkt_residual(
    split: CovarianceSplit, mult: KktMultipliers, ch: ChannelInstance, obj: WeightedObjective | float | None = None
) -> tuple:
    """Relative Frobenius residuals of the two stationarity equations.

    Each residual is ``||LHS - RHS||_F / ||LHS||_F``.
    """
    mu = mult.mu if obj is None else (obj.mu if isinstance(obj, WeightedObjective) else float(obj))
    a3, b3, a31, b31 = _kkt_terms(split, ch, mu)
    lhs3, rhs3 = a3 + mult.O1, b3 + mult.O2
    lhs31, rhs31 = a31 + mult.O2, b31 + mult.O3

    def rel(l, r):
        n = np.linalg.norm(l)
        return float(np.linalg.norm(l - r) / n) if n > 0 else float(np.linalg.norm(l - r))

    return rel(lhs3, rhs3), rel(lhs31, rhs31)


def _sym_basis(K: NDArray) -> list:
    """Matrices ``K E K'`` for the symmetric unit basis ``E`` of the null-space coordinates."""
    k = K.shape[1]
    out = []
    for a in range(k):
        for b in range(a, k):
            E = np.zeros((k, k))
            E[a, b] = E[b, a] = 1.0
            out.append(K @ E @ K.T)
    return out


def _support_psd(O: NDArray, K: NDArray) -> NDArray:
    if K.shape[1] == 0:
        return np.zeros_like(O)
    Z = psd_part(K.T @ O @ K)
    return as_sym(K @ Z @ K.T)


def recover_multipliers(
    split: CovarianceSplit,
    obj: WeightedObjective,
    ch: ChannelInstance,
    tol: float = KKT_TOL,
    active_tol: float = ACTIVE_TOL,
) -> KktMultipliers:
    """Least-squares multipliers ``O1, O2, O3 >= 0`` for a candidate optimum.

    ``O1`` lives on ker(B1), ``O2`` on ker(B2) and ``O3`` on ker(S - B1 - B2),
    which enforces complementary slackness.  The unconstrained least-squares
    solution is used when it is already PSD; otherwise a projected-gradient
    solve of the PSD-constrained problem follows.
    """
    _require_aligned_two_user(ch)
    if obj.gamma1 <= 0:
        raise UnsupportedCaseError("multipliers are normalized by gamma1, which must be positive")
    mu = obj.mu
    S = ch.constraint.S
    scale = ch.constraint.scale
    K = [
        null_basis(split.B1, active_tol, scale),
        null_basis(split.B2, active_tol, scale),
        null_basis(S - split.total, active_tol, scale),
    ]
    a3, b3, a31, b31 = _kkt_terms(split, ch, mu)
    g3, g31 = a3 - b3, a31 - b31
    t = ch.t
    Z = np.zeros((t, t))
    # residual(z) = [g3 + O1 - O2 ; g31 + O2 - O3]
    cols = []
    for i, Ki in enumerate(K):
        for M in _sym_basis(Ki):
            e3 = M if i == 0 else (-M if i == 1 else Z)
            e31 = Z if i == 0 else (M if i == 1 else -M)
            cols.append(np.concatenate([e3.ravel(), e31.ravel()]))
    target = -np.concatenate([g3.ravel(), g31.ravel()])
    if cols:
        M = np.array(cols).T
        z, *_ = np.linalg.lstsq(M, target, rcond=None)
        Os = _unpack(z, K)
        if any(np.linalg.eigvalsh(O)[0] < -1e-10 * max(1.0, np.linalg.norm(O)) for O in Os):
            Os = _psd_least_squares(g3, g31, K, Os)
    else:
        Os = [np.zeros((t, t)) for _ in range(3)]
    mult = KktMultipliers(Os[0], Os[1], Os[2], mu)
    res = kkt_residual(split, mult, ch, mu)
    mult = KktMultipliers(Os[0], Os[1], Os[2], mu, res)
    if max(res) > tol:
        raise NonStationaryError(
            f"KKT residuals {res[0]:.3g}, {res[1]:.3g} exceed {tol:g}: split is not stationary",
            res,
            mult,
        )
    return mult


def _unpack(z: NDArray, K: list) -> list:
    Os, c = [], 0
    for Ki in K:
        k = Ki.shape[1]
        Zi = np.zeros((k, k))
        for a in range(k):
            for b in range(a, k):
                Zi[a, b] = Zi[b, a] = z[c]
                c += 1
        Os.append(as_sym(Ki @ Zi @ Ki.T) if k else np.zeros((Ki.shape[0],) * 2))
    return Os


def _psd_least_squares(g3, g31, K, init, iters: int = 20000) -> list:
    """FISTA on ``||g3 + O1 - O2||^2 + ||g31 + O2 - O3||^2`` with O_i PSD on their supports."""
    O = [o.copy() for o in init]
    O = [_support_psd(o, k) for o, k in zip(O, K)]
    Y = [o.copy() for o in O]
    tk = 1.0
    step = 1.0 / 4.0  # the Lipschitz constant of the gradient is at most 4 * 2
    for _ in range(iters):
        r3 = g3 + Y[0] - Y[1]
        r31 = g31 + Y[1] - Y[2]
        grads = [r3, r31 - r3, -r31]
        new = [_support_psd(y - step * g, k) for y, g, k in zip(Y, grads, K)]
        tn = 0.5 * (1 + math.sqrt(1 + 4 * tk * tk))
        Y = [n + ((tk - 1) / tn) * (n - o) for n, o in zip(new, O)]
        if max(np.linalg.norm(n - o) for n, o in zip(new, O)) < 1e-15:
            O = new
            break
        O, tk = new, tn
    return O


# ---------------------------------------------------------------------------
# boundary tracing


def default_mu_grid(n: int = 32, mu_max: float = 1e3) -> NDArray:
    """``n - 1`` weights whose supporting lines are evenly spaced in angle, plus ``mu_max``.

    ``mu = tan(pi/4 * (1 + k/(n-1)))`` for ``k = 0 .. n-2`` starts at exactly 1
    and spreads the supporting-line directions uniformly, which resolves the
    curved part of the boundary far better than log spacing.
    """
    if n < 2:
        raise InvalidInputError("a mu grid needs at least two points")
    k = np.arange(n - 1)
    mus = np.tan(0.25 * np.pi * (1.0 + k / (n - 1)))
    mus[0] = 1.0
    return np.append(mus, float(mu_max))


def log_mu_grid(n: int = 32, mu_max: float = 1e3) -> NDArray:
    """``n`` log-spaced weights in [1, mu_max]."""
    g = np.logspace(0.0, math.log10(mu_max), n)
    g[0] = 1.0
    return g


def trace_boundary(
    ch: ChannelInstance,
    mu_grid: Sequence[float] | None = None,
    budget: SearchBudget | None = None,
) -> RegionPointSet:
    """Solve the weighted problem for every weight and encoding order.

    Degraded aligned channels only need the identity order with weights
    ``(1, mu)``.  Otherwise order (1, 2) uses ``(1, mu)`` and order (2, 1)
    uses ``(mu, 1)``.  The raw points are returned; pass them to
    :func:`convex_closure` for the region boundary.
    """
    mus = default_mu_grid() if mu_grid is None else np.asarray(list(mu_grid), dtype=float)
    if mus.size == 0:
        raise InvalidInputError("mu grid is empty")
    if np.any(mus < 1.0) or not np.all(np.isfinite(mus)):
        raise InvalidInputError("mu grid values must be finite and >= 1")
    budget = budget or SearchBudget()
    degraded = ch.constraint.kind == "covariance" and classify(ch).tag == SADBC
    orders = [(1, 2)] if degraded else [(1, 2), (2, 1)]
    points = []
    for perm in orders:
        for mu in mus:
            obj = WeightedObjective(1.0, mu) if perm == (1, 2) else WeightedObjective(mu, 1.0)
            rep = maximize_weighted_sum(ch, obj, budget, perm)
            prov = {
                "mu": float(mu),
                "gammas": (obj.gamma1, obj.gamma2),
                "permutation": perm,
                "split": rep.split,
                "converged": rep.converged,
                "report": rep,
            }
            points.append(RegionPoint(rep.rates, prov))
    return RegionPointSet(points)


def scalar_grid_points(ch: ChannelInstance, step: float = 1e-3, perm: Sequence[int] = (1, 2)) -> NDArray:
    """Rate pairs of every ``(b1, b2)`` on a grid over ``b1 + b2 <= S`` (t = 1 only).

    Brute-force reference for tests and demos; the grid step is relative to S.
    """
    if ch.t != 1 or ch.m != 2 or ch.constraint.kind != "covariance":
        raise InvalidInputError("scalar grid oracle needs a t=1 two-user channel under a covariance constraint")
    perm = validate_permutation(perm, 2)
    s = float(ch.constraint.S[0, 0])
    n = int(round(1.0 / step))
    v = np.arange(n + 1) * (s / n)
    b1, b2 = np.meshgrid(v, v, indexing="ij")
    keep = b1 + b2 <= s * (1 + 1e-12)
    b = np.stack([b1[keep], b2[keep]], axis=1)
    h = [float(H[0, 0]) ** 2 for H in ch.H]
    h3 = float(ch.H3[0, 0]) ** 2
    n_ = [float(N[0, 0]) for N in ch.N]
    n3 = float(ch.N3[0, 0])
    rates = np.zeros_like(b)
    prev = np.zeros(len(b))
    for user in perm:
        k = user - 1
        cum = prev + b[:, k]
        legit = np.log2((h[k] * cum + n_[k]) / (h[k] * prev + n_[k]))
        eve = np.log2((h3 * cum + n3) / (h3 * prev + n3))
        rates[:, k] = 0.5 * np.maximum(legit - eve, 0.0)
        prev = cum
    return rates
