import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wiretapbc import ChannelInstance, InputConstraint, MisomeChannel

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_pd(rng, t, shift=0.1):
    G = rng.standard_normal((t, t))
    return G.T @ G + shift * np.eye(t)


def random_psd(rng, t):
    G = rng.standard_normal((t, t))
    return G @ G.T


def random_sadbc(rng, t=2, S=None):
    N1 = random_pd(rng, t)
    N2 = N1 + random_psd(rng, t)
    N3 = N2 + random_psd(rng, t)
    S = np.eye(t) if S is None else S
    return ChannelInstance.aligned([N1, N2], N3, InputConstraint.covariance(S))


def random_feasible_split(rng, ch, m=None):
    """Random PSD shares scaled into the constraint set (not touching its boundary)."""
    from wiretapbc import CovarianceSplit

    m = ch.m if m is None else m
    t = ch.t
    Bs = [random_psd(rng, t) * rng.uniform(0, 1) for _ in range(m)]
    total = sum(Bs)
    if ch.constraint.kind == "covariance":
        w, V = np.linalg.eigh(ch.constraint.S)
        W = (V / np.sqrt(w)) @ V.T
        c = np.linalg.eigvalsh(W @ total @ W)[-1]
    else:
        c = np.trace(total) / ch.constraint.P
    f = rng.uniform(0.05, 0.999) / max(c, 1e-300)
    return CovarianceSplit(tuple(f * B for B in Bs))


def random_misome(rng, t=None, r3=None, P=None, pd_eve=False):
    t = int(rng.integers(1, 5)) if t is None else t
    if r3 is None:
        r3 = int(rng.integers(t, t + 2)) if pd_eve else int(rng.integers(1, 4))
    P = 10 ** rng.uniform(-1, 2) if P is None else P
    return MisomeChannel((rng.standard_normal(t), rng.standard_normal(t)), rng.standard_normal((r3, t)), P)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def reference_channel():
    """Scalar degraded channel N = (1, 1.5, 2) with S = 2."""
    return ChannelInstance.aligned([1.0, 1.5], 2.0, InputConstraint.covariance(2.0))
