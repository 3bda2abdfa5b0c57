"""Iteratively reweighted least squares for the row-sparse baseline model

    min_A  sum_n ||x_n - X@a_n||_2  +  gamma * ||A||_{2,1},

the convex predecessor of the lp model in alm.py.  Both norms are
epsilon-smoothed; the solver alternates closed-form column solves with
diagonal reweighting and monotonically decreases the smoothed objective.

Two interchangeable column solvers are kept on purpose:

* authorial: the literal N x N system per column, re-factorized for
  every n (the weight U_nn differs per column).  One outer iteration
  costs O(N^4); this path exists as the benchmark baseline and must not
  be "optimized".
* accelerated: the algebraically identical L x L system obtained by
  pushing the inverse through X, with the L x L Gram matrix built once
  per outer iteration.  One outer iteration costs O(N^2 L + N L^3).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .alm import SolveOutcome, _single_thread_if
from .exceptions import ConfigError, NonFinite
from .linalg import as_matrix, as_weights, scale_cols_inv, spd_solve

RRSS_PATHS = ("authorial", "accelerated")


@dataclass(frozen=True)
class RrssConfig:
    """Hyperparameters of the baseline IRLS solver.

    Stops when the relative change of the smoothed objective falls
    below obj_tol, or after max_outer_iters reweighting rounds.
    """

    gamma: float
    epsilon: float = 1e-10
    max_outer_iters: int = 50
    obj_tol: float = 1e-8
    path: str = "accelerated"
    deterministic: bool = False

    def __post_init__(self):
        if not (self.gamma > 0.0 and np.isfinite(self.gamma)):
            raise ConfigError(f"gamma must be finite and > 0, got {self.gamma}")
        if not (self.epsilon > 0.0):
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_outer_iters < 1:
            raise ConfigError("max_outer_iters must be >= 1")
        if self.obj_tol < 0.0:
            raise ConfigError("obj_tol must be >= 0")
        if self.path not in RRSS_PATHS:
            raise ConfigError(f"path must be one of {RRSS_PATHS}, got {self.path!r}")


def rrss_objective(X, A, gamma: float, epsilon: float, xa: np.ndarray | None = None) -> float:
    """Smoothed objective:
    sum_n sqrt(||x_n - X@a_n||^2 + eps) + gamma * sum_n sqrt(||row n||^2 + eps)."""
    X = np.asarray(X, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    resid = X - (X @ A if xa is None else xa)
    loss = float(np.sum(np.sqrt(np.sum(resid * resid, axis=0) + epsilon)))
    reg = float(np.sum(np.sqrt(np.sum(A * A, axis=1) + epsilon)))
    return loss + gamma * reg


def rrss_weights(X, A, epsilon: float, xa: np.ndarray | None = None):
    """Column weights U_nn = 1/(2 sqrt(||x_n - X@a_n||^2 + eps)) and row
    weights V_nn = 1/(2 sqrt(||row n of A||^2 + eps))."""
    resid = X - (X @ A if xa is None else xa)
    u = 0.5 / np.sqrt(np.sum(resid * resid, axis=0) + epsilon)
    v = 0.5 / np.sqrt(np.sum(A * A, axis=1) + epsilon)
    return u, v


def rrss_a_dense(X, u_nn: float, v, x_n, gamma: float, xtx: np.ndarray | None = None) -> np.ndarray:
    """One column via the literal N x N system:
    (u_nn X^T X + gamma diag(v)) a = u_nn X^T x_n.

    The factorization is necessarily redone per column (u_nn varies);
    only the constant Gram product X^T X may be passed in.
    """
    X = np.asarray(X, dtype=np.float64)
    v = as_weights(v, n=X.shape[1], name="row weights")
    if not (u_nn > 0.0):
        raise ConfigError(f"u_nn must be > 0, got {u_nn}")
    if xtx is None:
        xtx = X.T @ X
    M = u_nn * xtx
    M[np.diag_indices_from(M)] += gamma * v
    return spd_solve(M, u_nn * (X.T @ np.asarray(x_n, dtype=np.float64)))


def rrss_a_fast(X, u_nn: float, v, x_n, gamma: float,
                gram_ll: np.ndarray | None = None,
                x_vinv_t: np.ndarray | None = None) -> np.ndarray:
    """Same column through the equivalent L x L system:
    a = u_nn (X diag(v)^-1)^T (u_nn X (X diag(v)^-1)^T + gamma I_L)^{-1} x_n.

    gram_ll = X @ (X diag(v)^-1)^T depends only on v, so callers build
    it once per outer iteration; per-column work is then one L x L
    solve plus an N x L product.
    """
    X = np.asarray(X, dtype=np.float64)
    v = as_weights(v, n=X.shape[1], name="row weights")
    if not (u_nn > 0.0):
        raise ConfigError(f"u_nn must be > 0, got {u_nn}")
    if x_vinv_t is None:
        x_vinv_t = scale_cols_inv(X, v).T
    if gram_ll is None:
        gram_ll = X @ x_vinv_t
    M = u_nn * gram_ll
    M[np.diag_indices_from(M)] += gamma
    y = spd_solve(M, np.asarray(x_n, dtype=np.float64))
    return u_nn * (x_vinv_t @ y)


def rrss_solve(X, config: RrssConfig) -> SolveOutcome:
    """IRLS loop: solve every column under fixed weights, reweight,
    repeat.  The smoothed objective is non-increasing from one round to
    the next; converged means its relative change fell below obj_tol.
    """
    X = as_matrix(X, "X")
    L, N = X.shape
    fast = config.path == "accelerated"

    u = np.ones(N)
    v = np.ones(N)
    A = np.zeros((N, N))
    trace = {"objective": [], "residual": [], "mu": []}
    wall = {"a_step": 0.0, "weight_step": 0.0}
    converged = False
    iterations = 0
    prev_obj = None
    t_start = time.perf_counter()

    with _single_thread_if(config.deterministic):
        xtx = None if fast else X.T @ X
        for it in range(1, config.max_outer_iters + 1):
            t0 = time.perf_counter()
            if fast:
                x_vinv_t = scale_cols_inv(X, v).T
                gram_ll = X @ x_vinv_t
                for n in range(N):
                    A[:, n] = rrss_a_fast(X, float(u[n]), v, X[:, n], config.gamma,
                                          gram_ll=gram_ll, x_vinv_t=x_vinv_t)
            else:
                for n in range(N):
                    A[:, n] = rrss_a_dense(X, float(u[n]), v, X[:, n], config.gamma,
                                           xtx=xtx)
            t1 = time.perf_counter()
            wall["a_step"] += t1 - t0

            if not np.isfinite(A).all():
                raise NonFinite(f"coefficients became non-finite at outer iteration {it}")
            xa = X @ A
            u, v = rrss_weights(X, A, config.epsilon, xa=xa)
            # The smoothed norms are exactly the halved reciprocal weights.
            obj = float(np.sum(0.5 / u) + config.gamma * np.sum(0.5 / v))
            wall["weight_step"] += time.perf_counter() - t1

            trace["objective"].append(obj)
            iterations = it
            if prev_obj is not None and abs(prev_obj - obj) <= config.obj_tol * max(1.0, abs(prev_obj)):
                converged = True
                break
            prev_obj = obj

    wall["total"] = time.perf_counter() - t_start
    return SolveOutcome(A=A.copy(), converged=converged, iterations=iterations,
                        trace=trace, wall_time=wall)
