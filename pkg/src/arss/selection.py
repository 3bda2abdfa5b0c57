"""Ranking coefficient rows into exemplar (or feature) selections.

The solvers produce a square coefficient matrix whose row magnitudes
say how much each sample participates in representing everyone else;
ranking row sums of |A| in decreasing order and taking the top k gives
the selected subset.  Feature selection is the same pipeline run on the
transposed data matrix.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from .alm import SolverConfig, arss_solve
from .exceptions import ConfigError, InvalidK
from .irls import RrssConfig, rrss_solve
from .linalg import as_matrix

METHODS = ("arss", "rrss-authorial", "rrss-accelerated", "random")


@dataclass
class RankedSelection:
    """Scores and the induced ordering over all rows.

    order sorts scores in decreasing order, ties broken by ascending
    row index; selected is its first k entries.
    """

    scores: np.ndarray
    order: np.ndarray
    k: int

    @property
    def selected(self) -> np.ndarray:
        return self.order[: self.k]


@dataclass
class SelectionReport:
    """Everything a selection run produced, ready for serialization.

    coefficients holds the solver's full matrix for in-process reuse
    and is deliberately skipped by the CLI's JSON writer; timing values
    are seconds per phase.
    """

    method: str
    mode: str
    k: int
    selected: list[int]
    scores: list[float]
    order: list[int]
    converged: bool | None
    iterations: int
    trace: dict
    timing: dict
    config: dict
    seed: int | None
    coefficients: np.ndarray | None = None


def rank_rows(A, k: int | None = None) -> RankedSelection:
    """Rank rows of A by the sum of absolute entries, descending.

    Ties keep ascending row order, making the ranking deterministic.
    No thresholding is applied first; tiny rows simply rank last.
    """
    A = as_matrix(A, "coefficients")
    n = A.shape[0]
    if k is None:
        k = n
    if not (1 <= k <= n):
        raise InvalidK(f"k must lie in 1..{n}, got {k}")
    scores = np.abs(A).sum(axis=1)
    order = np.argsort(-scores, kind="stable")
    return RankedSelection(scores=scores, order=order, k=k)


def _effective_config(method: str, config):
    """Validate the config type and make it agree with the method name."""
    if method == "arss":
        if not isinstance(config, SolverConfig):
            raise ConfigError("method 'arss' needs a SolverConfig")
        return config
    if method in ("rrss-authorial", "rrss-accelerated"):
        if not isinstance(config, RrssConfig):
            raise ConfigError(f"method {method!r} needs an RrssConfig")
        path = method.removeprefix("rrss-")
        return config if config.path == path else dataclasses.replace(config, path=path)
    raise ConfigError(f"method must be one of {METHODS}, got {method!r}")


def select_exemplars(X, k: int, method: str = "arss", config=None,
                     seed: int | None = None) -> SelectionReport:
    """Select k exemplar columns of X by the chosen method.

    The solver methods rank rows of the fitted coefficient matrix;
    "random" draws k distinct columns from the given seed and serves as
    the no-skill baseline.
    """
    X = as_matrix(X, "X")
    n = X.shape[1]
    if not (1 <= k <= n):
        raise InvalidK(f"k must lie in 1..{n}, got {k}")

    t0 = time.perf_counter()
    if method == "random":
        order = np.random.default_rng(seed).permutation(n)
        scores = np.zeros(n)
        trace = {"objective": [], "residual": [], "mu": []}
        timing = {"total": time.perf_counter() - t0}
        return SelectionReport(
            method=method, mode="samples", k=k,
            selected=[int(i) for i in order[:k]],
            scores=[0.0] * n, order=[int(i) for i in order],
            converged=None, iterations=0, trace=trace, timing=timing,
            config={}, seed=seed, coefficients=None)

    config = _effective_config(method, config)
    outcome = arss_solve(X, config) if method == "arss" else rrss_solve(X, config)
    ranking = rank_rows(outcome.A, k=k)
    timing = dict(outcome.wall_time)
    timing.setdefault("total", time.perf_counter() - t0)
    return SelectionReport(
        method=method, mode="samples", k=k,
        selected=[int(i) for i in ranking.selected],
        scores=[float(s) for s in ranking.scores],
        order=[int(i) for i in ranking.order],
        converged=outcome.converged, iterations=outcome.iterations,
        trace=outcome.trace, timing=timing,
        config=dataclasses.asdict(config), seed=seed,
        coefficients=outcome.A)


def select_features(X, k: int, method: str = "arss", config=None,
                    seed: int | None = None) -> SelectionReport:
    """Select k feature rows of X: the sample pipeline on X transposed."""
    X = as_matrix(X, "X")
    report = select_exemplars(X.T, k, method=method, config=config, seed=seed)
    report.mode = "features"
    return report
