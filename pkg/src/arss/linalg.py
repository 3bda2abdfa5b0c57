"""Dense matrix kernels shared by every solver.

Everything here operates on plain float64 ndarrays and is stateless, so
concurrent calls are safe.  Matrices follow the columns-are-samples
convention used throughout the package: a data matrix has shape (L, N)
with L features and N samples.
"""

from __future__ import annotations

import contextlib

import numpy as np
import scipy.linalg

from .exceptions import DataError, DimensionMismatch, SingularSystem

# Active logs for record_spd_solves(); normally empty.
_solve_logs: list[list[tuple[int, int]]] = []


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array, validating shape and finiteness.

    Used at every I/O and public-API boundary; internal kernels then
    trust their inputs.
    """
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise DataError(f"{name} must be 2-D, got ndim={out.ndim}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise DataError(f"{name} must have at least one row and column, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise DataError(f"{name} contains NaN or Inf entries")
    return out


def as_weights(d, n: int | None = None, name: str = "weights") -> np.ndarray:
    """Coerce to a 1-D strictly positive float64 vector."""
    out = np.asarray(d, dtype=np.float64).ravel()
    if n is not None and out.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {out.shape[0]}, expected {n}")
    if not np.all(np.isfinite(out)) or np.any(out <= 0.0):
        raise DataError(f"{name} must be strictly positive and finite")
    return out


@contextlib.contextmanager
def record_spd_solves():
    """Record the (n, nrhs) of every spd_solve in the block.

    Test instrumentation: lets a caller assert which linear-system sizes
    a solver path actually touched, independent of wall-clock timing.
    """
    log: list[tuple[int, int]] = []
    _solve_logs.append(log)
    try:
        yield log
    finally:
        _solve_logs.remove(log)


def spd_solve(M: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve M @ Y = B for symmetric positive definite M by Cholesky.

    M is symmetrized as (M + M.T)/2 first; Gram products accumulate
    asymmetric rounding and Cholesky wants an exactly symmetric input.
    B may be a vector or a matrix; the result matches its shape.

    Raises SingularSystem if the factorization fails (M not positive
    definite, or so ill-conditioned that it breaks down).
    """
    M = np.asarray(M, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if B.shape[0] != M.shape[0]:
        raise DimensionMismatch(f"rhs has {B.shape[0]} rows, matrix is {M.shape[0]}x{M.shape[1]}")
    sym = 0.5 * (M + M.T)
    try:
        factor = scipy.linalg.cho_factor(sym, lower=True, check_finite=False)
        out = scipy.linalg.cho_solve(factor, B, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystem(f"Cholesky factorization failed: {exc}") from exc
    for log in _solve_logs:
        log.append((M.shape[0], 1 if B.ndim == 1 else B.shape[1]))
    return out


def scale_cols_inv(X: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Return X with column j divided by d[j] (X @ diag(d)^-1)."""
    X = np.asarray(X, dtype=np.float64)
    d = as_weights(d, n=X.shape[1], name="column weights")
    return X / d[np.newaxis, :]
