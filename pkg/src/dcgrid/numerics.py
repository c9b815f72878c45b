"""Dense symmetric eigendecomposition, Lyapunov solves, and Laplacian
pseudoinverse.

These are the numerical kernels behind the closed-form H2 evaluation and
its independent Lyapunov oracle. All routines operate on dense real
matrices and are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    Disconnected,
    NoConvergence,
    NotHurwitz,
    NotSymmetric,
    SingularSystem,
)

SYMMETRY_RTOL = 1e-12
# |lambda| below this (relative to the largest eigenvalue) counts as zero
ZERO_EIG_RTOL = 1e-9


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric
    matrix; column k of ``vectors`` pairs with ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class LyapunovSolution:
    """Symmetric solution P of A^T P + P A = -Q with its residual norm."""

    P: np.ndarray
    residual: float


def eig_sym(mat: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    mat = np.asarray(mat, dtype=float)
    scale = np.linalg.norm(mat, ord=np.inf)
    if scale > 0 and np.abs(mat - mat.T).max() > SYMMETRY_RTOL * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    try:
        values, vectors = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    return SpectralDecomposition(values, vectors)


def is_hurwitz(a: np.ndarray, tol: float = 0.0) -> bool:
    """True when every eigenvalue of A has real part < -tol."""
    return bool(np.max(np.linalg.eigvals(a).real) < -tol)


def solve_lyapunov(a: np.ndarray, q: np.ndarray) -> LyapunovSolution:
    """Solve A^T P + P A = -Q for symmetric PSD Q and Hurwitz A.

    Uses the Kronecker-vectorized dense solve; intended as an oracle for
    modest state dimensions, not for large systems.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    n = a.shape[0]
    if not is_hurwitz(a):
        raise NotHurwitz("A has an eigenvalue with non-negative real part")
    eye = np.eye(n)
    # vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P)
    kron = np.kron(eye, a.T) + np.kron(a.T, eye)
    try:
        p = np.linalg.solve(kron, -q.reshape(-1)).reshape(n, n)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    p = 0.5 * (p + p.T)
    residual = float(np.linalg.norm(a.T @ p + p @ a + q, "fro"))
    return LyapunovSolution(p, residual)


def pinv_laplacian(lap: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a connected graph's Laplacian.

    Inverts every eigenvalue above the scale-invariant zero threshold;
    raises Disconnected if more than one eigenvalue falls below it.
    """
    dec = eig_sym(lap)
    cutoff = ZERO_EIG_RTOL * max(1.0, float(dec.values[-1]))
    zero = np.abs(dec.values) < cutoff
    if int(zero.sum()) != 1:
        raise Disconnected(
            f"expected exactly one zero eigenvalue, found {int(zero.sum())}")
    inv = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, dec.values))
    return (dec.vectors * inv) @ dec.vectors.T
