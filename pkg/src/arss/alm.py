"""Augmented-Lagrangian solver for the robust self-representation model

    min_A  ||X - X@A||_p^p + gamma * ||A||_{2,1},      0 < p <= 1,

with X of shape (L, N), columns as samples.  The row-sparsity of the
optimal A identifies the exemplar samples.

The equality-constrained form introduces E = X - X@A and alternates:
an elementwise lp shrinkage step for E, a reweighted ridge step for A,
and a multiplier/penalty update.  The A-step is solved either as the
literal N x N system or, when N > L, through an equivalent L x L system
obtained by pushing the inverse to the feature side; both paths give
the same A and the small side costs O(N^2 L) per iteration instead of
O(N^3).
"""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, NonFinite
from .linalg import as_matrix, as_weights, spd_solve, scale_cols_inv
from .shrinkage import MIN_P, ShrinkageParams, gst_matrix

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    threadpool_limits = None

A_PATHS = ("auto", "dense", "fast")


def _single_thread_if(deterministic: bool):
    """BLAS kernels may parallelize reductions; deterministic runs pin
    them to one thread so accumulation order is fixed."""
    if deterministic and threadpool_limits is not None:
        return threadpool_limits(limits=1)
    return contextlib.nullcontext()


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the augmented-Lagrangian exemplar solver.

    gamma balances representation loss against row sparsity and has no
    universal default; p is the loss exponent.  mu0/rho/mu_max control
    the penalty schedule, epsilon smooths the row-norm reweighting, and
    the two tolerances define convergence (see arss_solve).  a_path
    forces the A-step route; "auto" dispatches on N <= L.
    """

    gamma: float
    p: float = 0.5
    mu0: float = 0.1
    rho: float = 1.2
    epsilon: float = 1e-10
    max_iters: int = 100
    feas_tol: float = 1e-6
    step_tol: float = 1e-6
    mu_max: float = 1e10
    a_path: str = "auto"
    deterministic: bool = False

    def __post_init__(self):
        if not (self.gamma > 0.0 and np.isfinite(self.gamma)):
            raise ConfigError(f"gamma must be finite and > 0, got {self.gamma}")
        if not (MIN_P <= self.p <= 1.0):
            raise ConfigError(f"p must lie in [{MIN_P}, 1], got {self.p}")
        if not (self.mu0 > 0.0):
            raise ConfigError(f"mu0 must be > 0, got {self.mu0}")
        if not (1.0 < self.rho < 2.0):
            raise ConfigError(f"rho must lie in (1, 2), got {self.rho}")
        if not (self.epsilon > 0.0):
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.feas_tol < 0.0 or self.step_tol < 0.0:
            raise ConfigError("tolerances must be >= 0")
        if self.mu_max <= self.mu0:
            raise ConfigError(f"mu_max must exceed mu0, got {self.mu_max} <= {self.mu0}")
        if self.a_path not in A_PATHS:
            raise ConfigError(f"a_path must be one of {A_PATHS}, got {self.a_path!r}")


@dataclass
class AlmState:
    """One augmented-Lagrangian iterate: coefficients A, split residual
    E, multipliers Lam, penalty mu, plus per-iteration traces."""

    A: np.ndarray
    E: np.ndarray
    Lam: np.ndarray
    mu: float
    iteration: int = 0
    trace: dict = field(default_factory=lambda: {"objective": [], "residual": [], "mu": []})


@dataclass
class SolveOutcome:
    """Result bundle shared by both solvers.

    wall_time maps phase names to seconds and is the only field exempt
    from run-to-run determinism.
    """

    A: np.ndarray
    converged: bool
    iterations: int
    trace: dict
    wall_time: dict


def arss_objective(X, A, gamma: float, p: float, xa: np.ndarray | None = None) -> float:
    """Model objective: ||X - X@A||_p^p + gamma * sum of row norms of A."""
    X = np.asarray(X, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    resid = X - (X @ A if xa is None else xa)
    loss = float(np.sum(np.abs(resid) ** p))
    reg = float(np.sum(np.sqrt(np.sum(A * A, axis=1))))
    return loss + gamma * reg


def update_V(A, epsilon: float) -> np.ndarray:
    """Row-norm reweighting: V_n = 1/sqrt(||row n of A||^2 + epsilon).

    epsilon keeps every weight finite when rows vanish, so the diagonal
    stays strictly positive.
    """
    if epsilon <= 0.0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    A = np.asarray(A, dtype=np.float64)
    return 1.0 / np.sqrt(np.sum(A * A, axis=1) + epsilon)


def update_A(X, v, P, beta: float, path: str = "auto") -> np.ndarray:
    """Reweighted ridge step: argmin_A ||A||_{2,1}-majorizer + beta/2 ||X@A - P||_F^2.

    Solves (diag(v) + beta X^T X) A = beta X^T P.  The dense route
    tackles that N x N system directly; the fast route uses the
    equivalent form A = B (I_L + X B)^{-1} P with B = beta (X diag(v)^-1)^T,
    which only factorizes L x L.  "auto" picks dense when N <= L.
    """
    X = np.asarray(X, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    if path not in A_PATHS:
        raise ConfigError(f"path must be one of {A_PATHS}, got {path!r}")
    if not (beta > 0.0):
        raise ConfigError(f"beta must be > 0, got {beta}")
    L, N = X.shape
    v = as_weights(v, n=N, name="row weights")
    if P.shape != (L, N):
        raise ConfigError(f"P must have shape {(L, N)}, got {P.shape}")
    dense = N <= L if path == "auto" else path == "dense"
    if dense:
        M = beta * (X.T @ X)
        M[np.diag_indices_from(M)] += v
        return spd_solve(M, beta * (X.T @ P))
    B = beta * scale_cols_inv(X, v).T
    S = X @ B
    S[np.diag_indices_from(S)] += 1.0
    return B @ spd_solve(S, P)


def update_multiplier(Lam, mu: float, E, X, A, rho: float, mu_max: float,
                      xa: np.ndarray | None = None):
    """Multiplier step: Lam += mu * (E - X + X@A), then grow mu by rho up
    to mu_max.  Pass xa to reuse an already-computed X@A product."""
    if not (mu > 0.0):
        raise ConfigError(f"mu must be > 0, got {mu}")
    violation = E - X + (X @ A if xa is None else xa)
    return Lam + mu * violation, min(rho * mu, mu_max)


def arss_solve(X, config: SolverConfig) -> SolveOutcome:
    """Run the full ALM loop until feasible or out of iterations.

    Starts from A = I, Lam = 0.  Each iteration shrinks E elementwise
    (penalty weight 1/mu), reweights rows of the previous A, solves the
    ridge system for A, then updates multipliers and grows mu.
    Converged means the relative primal residual ||E - X + X@A||_F /
    max(1, ||X||_F) fell below feas_tol AND the relative change of A
    fell below step_tol.

    Raises NonFinite if any iterate picks up NaN/Inf, which signals a
    penalty blow-up or an unreasonable configuration.
    """
    X = as_matrix(X, "X")
    L, N = X.shape
    norm_x = max(1.0, float(np.linalg.norm(X)))

    state = AlmState(A=np.eye(N), E=np.zeros((L, N)), Lam=np.zeros((L, N)), mu=config.mu0)
    wall = {"e_step": 0.0, "a_step": 0.0, "multiplier_step": 0.0}
    converged = False
    t_start = time.perf_counter()

    with _single_thread_if(config.deterministic):
        xa = X @ state.A
        for it in range(1, config.max_iters + 1):
            mu = state.mu

            t0 = time.perf_counter()
            H = X - xa - state.Lam / mu
            state.E = gst_matrix(H, ShrinkageParams(p=config.p, lam=1.0 / mu))
            t1 = time.perf_counter()
            wall["e_step"] += t1 - t0

            v = update_V(state.A, config.epsilon)
            P = X - state.E - state.Lam / mu
            beta = mu / config.gamma
            a_prev = state.A
            state.A = update_A(X, v, P, beta, path=config.a_path)
            xa = X @ state.A
            t2 = time.perf_counter()
            wall["a_step"] += t2 - t1

            state.Lam, state.mu = update_multiplier(
                state.Lam, mu, state.E, X, state.A, config.rho, config.mu_max, xa=xa)
            t3 = time.perf_counter()
            wall["multiplier_step"] += t3 - t2

            if not (np.isfinite(state.A).all() and np.isfinite(state.E).all()
                    and np.isfinite(state.Lam).all()):
                raise NonFinite(f"iterate became non-finite at iteration {it}")

            residual = float(np.linalg.norm(state.E - X + xa)) / norm_x
            a_change = float(np.linalg.norm(state.A - a_prev)) / max(1.0, float(np.linalg.norm(a_prev)))
            state.iteration = it
            state.trace["objective"].append(arss_objective(X, state.A, config.gamma, config.p, xa=xa))
            state.trace["residual"].append(residual)
            state.trace["mu"].append(mu)

            if residual <= config.feas_tol and a_change <= config.step_tol:
                converged = True
                break

    wall["total"] = time.perf_counter() - t_start
    return SolveOutcome(A=state.A, converged=converged, iterations=state.iteration,
                        trace=state.trace, wall_time=wall)
