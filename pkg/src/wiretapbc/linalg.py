"""Symmetric-matrix primitives.

Every matrix-valued quantity in the package (noise covariances, transmit
covariance shares, multipliers) is a real symmetric array.  The helpers here
symmetrize on entry, test the Loewner order with a relative tolerance, and
solve the symmetric-definite generalized eigenproblem by Cholesky whitening.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg as sla

from .exceptions import DomainError, InvalidInputError

log = logging.getLogger(__name__)

PSD_TOL = 1e-9
EIG_GAP_WARN = 1e-10


def as_sym(M: ArrayLike, name: str = "matrix") -> NDArray:
    """Return ``M`` as a float symmetric 2-D array, ``(M + M.T) / 2``.

    Scalars and 1-element sequences are promoted to 1x1 matrices.
    """
    A = np.array(M, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return 0.5 * (A + A.T)


def min_eig(M: NDArray) -> float:
    return float(np.linalg.eigvalsh(M)[0])


def is_psd(M: ArrayLike, tol: float = PSD_TOL, scale: float | None = None) -> bool:
    """True iff the smallest eigenvalue of ``M`` is at least ``-tol * scale``.

    ``scale`` defaults to the largest absolute eigenvalue of ``M`` so the
    test is relative; pass an explicit scale when ``M`` is a difference of
    two larger matrices.
    """
    if tol < 0:
        raise InvalidInputError("tol must be non-negative")
    A = as_sym(M)
    w = np.linalg.eigvalsh(A)
    if scale is None:
        scale = float(np.max(np.abs(w)))
    return bool(w[0] >= -tol * scale)


def psd_leq(A: ArrayLike, B: ArrayLike, tol: float = PSD_TOL) -> bool:
    """Loewner order ``A <= B``: ``B - A`` is PSD up to a tolerance.

    The tolerance is relative to the larger spectral norm of the two inputs.
    """
    A = as_sym(A, "A")
    B = as_sym(B, "B")
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: {A.shape} vs {B.shape}")
    scale = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2))
    return is_psd(B - A, tol, scale=scale)


def log_det(M: ArrayLike) -> float:
    """Base-2 log-determinant of a symmetric positive definite matrix."""
    A = as_sym(M)
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise DomainError(
            f"log_det needs a positive definite matrix; min eigenvalue is {min_eig(A):.6g}"
        ) from None
    return float(2.0 * np.sum(np.log2(np.diag(L))))


def log_det_batch(M: NDArray) -> NDArray:
    """Base-2 log-determinants of a stack ``(..., n, n)`` of PD matrices.

    No PD check; callers only pass noise-plus-PSD sums.
    """
    sign, ld = np.linalg.slogdet(M)
    return ld / np.log(2.0)


def inv_sym(M: NDArray) -> NDArray:
    X = np.linalg.inv(M)
    return 0.5 * (X + X.T)


def psd_part(M: NDArray) -> NDArray:
    """Clip negative eigenvalues to zero."""
    w, V = np.linalg.eigh(as_sym(M))
    return (V * np.clip(w, 0.0, None)) @ V.T


def sqrtm_psd(M: NDArray) -> NDArray:
    w, V = np.linalg.eigh(as_sym(M))
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


def inv_sqrtm_pd(M: NDArray, name: str = "matrix") -> NDArray:
    w, V = np.linalg.eigh(as_sym(M, name))
    if w[0] <= 0:
        raise DomainError(f"{name} is singular or indefinite (min eigenvalue {w[0]:.6g})")
    return (V / np.sqrt(w)) @ V.T


def null_basis(M: NDArray, rel_tol: float, scale: float) -> NDArray:
    """Orthonormal basis of the eigenvectors of ``M`` with eigenvalue <= rel_tol * scale.

    Returns an array of shape ``(t, k)``; ``k`` may be zero.
    """
    w, V = np.linalg.eigh(as_sym(M))
    return V[:, w <= rel_tol * scale]


def fix_sign(v: NDArray) -> NDArray:
    """Flip ``v`` so its largest-magnitude entry is positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


@dataclass(frozen=True)
class GenEigenPair:
    lambda_max: float
    psi_max: NDArray
    # distance to the second largest eigenvalue (inf for 1x1 pencils)
    gap: float = float("inf")


def gen_eigen_max(A: ArrayLike, B: ArrayLike) -> GenEigenPair:
    """Largest generalized eigenpair of the symmetric-definite pencil (A, B).

    Whitens with the Cholesky factor of ``B``, solves the symmetric problem,
    maps the eigenvector back and renormalizes it to unit Euclidean norm.
    The returned ``lambda_max`` is the maximum of the Rayleigh quotient
    ``psi' A psi / psi' B psi``.

    Examples
    --------
    >>> import numpy as np
    >>> pair = gen_eigen_max(np.diag([4.0, 1.0]), np.eye(2))
    >>> round(pair.lambda_max, 12), pair.psi_max.tolist()
    (4.0, [1.0, 0.0])
    """
    A = as_sym(A, "A")
    B = as_sym(B, "B")
    if A.shape != B.shape:
        raise InvalidInputError(f"pencil dimension mismatch: {A.shape} vs {B.shape}")
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        raise DomainError(
            f"pencil B-side must be positive definite; min eigenvalue is {min_eig(B):.6g}"
        ) from None
    C = sla.solve_triangular(L, sla.solve_triangular(L, A, lower=True).T, lower=True)
    C = 0.5 * (C + C.T)
    w, Y = np.linalg.eigh(C)
    psi = sla.solve_triangular(L.T, Y[:, -1], lower=False)
    psi = fix_sign(psi / np.linalg.norm(psi))
    gap = float(w[-1] - w[-2]) if len(w) > 1 else float("inf")
    if gap < EIG_GAP_WARN:
        log.info("top generalized eigenvalue is (nearly) repeated, gap=%.3g", gap)
    return GenEigenPair(float(w[-1]), psi, gap)
