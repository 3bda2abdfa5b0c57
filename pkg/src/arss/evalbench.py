"""Downstream evaluation (kNN) and the speed/complexity harness.

The benchmark side answers one question: does measured wall time scale
with sample count the way the per-iteration cost model says it should?
Sweeps therefore fix the outer-iteration budget so cells compare
per-iteration cost, not convergence speed, and fit a log-log exponent
of median time against N.
"""

from __future__ import annotations

import dataclasses
import math
import platform
import time
from dataclasses import dataclass

import numpy as np

from .alm import SolverConfig, _single_thread_if, arss_solve
from .dataio import LabeledDataset, NoiseSpec, inject_noise, split_candidates
from .exceptions import (ConfigError, EmptyTrainingSet, InvalidCount,
                         InvalidK, MissingLabels)
from .irls import RrssConfig, rrss_solve
from .linalg import as_matrix
from .selection import select_exemplars

BENCH_METHODS = ("arss", "arss-dense", "rrss-authorial", "rrss-accelerated")


def host_info() -> dict:
    return {"platform": platform.platform(), "machine": platform.machine(),
            "python": platform.python_version()}


@dataclass
class BenchRecord:
    """One timed cell of a scaling sweep.

    iterations is the fixed outer-iteration budget the cell ran under;
    censored marks cells whose total time exceeded the configured cap
    (they are excluded from exponent fits, never dropped from output).
    """

    method: str
    n_samples: int
    n_features: int
    k: int
    repeat: int
    wall_time: dict
    iterations: int
    seed: int
    host: dict
    censored: bool = False


@dataclass
class AccuracyCurve:
    """Mean/std downstream accuracy per selection size K over seeds."""

    method: str
    k_values: list[int]
    mean_accuracy: list[float]
    std_accuracy: list[float]
    per_seed: list[list[float]]
    knn_k: int
    seeds: list[int]


def knn_predict(train_X, train_labels, query_X, k: int = 3) -> np.ndarray:
    """Euclidean k-nearest-neighbour majority vote.

    Deterministic tie handling: equal distances prefer the lower
    training index, vote ties prefer the smallest label.
    """
    train_X = np.asarray(train_X, dtype=np.float64)
    query_X = np.asarray(query_X, dtype=np.float64)
    train_labels = np.asarray(train_labels)
    if train_X.ndim != 2 or query_X.ndim != 2:
        raise ConfigError("train_X and query_X must be 2-D (features x samples)")
    n_train = train_X.shape[1]
    if n_train == 0:
        raise EmptyTrainingSet("kNN needs at least one training sample")
    if train_labels.shape != (n_train,):
        raise MissingLabels(f"need {n_train} training labels, got shape {train_labels.shape}")
    if not (1 <= k <= n_train):
        raise InvalidK(f"neighbor count must lie in 1..{n_train}, got {k}")

    # Squared distances suffice for ranking and avoid the sqrt.
    d2 = (np.sum(query_X * query_X, axis=0)[:, None]
          + np.sum(train_X * train_X, axis=0)[None, :]
          - 2.0 * (query_X.T @ train_X))
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    votes = train_labels[nearest]
    out = np.empty(query_X.shape[1], dtype=train_labels.dtype)
    for i in range(votes.shape[0]):
        values, counts = np.unique(votes[i], return_counts=True)
        out[i] = values[np.argmax(counts)]
    return out


def _budgeted_config(method: str, gamma: float, p: float, iters: int) -> tuple[str, object]:
    """Solver config that runs exactly `iters` outer iterations.

    Returns (selection method name, config).  Tolerances are zeroed so
    no cell exits early; timings then compare per-iteration cost.
    """
    if method in ("arss", "arss-dense"):
        cfg = SolverConfig(gamma=gamma, p=p, max_iters=iters, feas_tol=0.0, step_tol=0.0,
                           a_path="dense" if method == "arss-dense" else "auto")
        return "arss", cfg
    if method in ("rrss-authorial", "rrss-accelerated"):
        path = "authorial" if method == "rrss-authorial" else "accelerated"
        cfg = RrssConfig(gamma=gamma, max_outer_iters=iters, obj_tol=0.0, path=path)
        return method, cfg
    raise ConfigError(f"method must be one of {BENCH_METHODS}, got {method!r}")


def bench_dataset(n_samples: int, n_features: int, seed: int) -> np.ndarray:
    """Synthetic timing input; a pure function of (seed, sizes)."""
    rng = np.random.default_rng([seed, n_samples, n_features])
    return rng.standard_normal((n_features, n_samples))


def run_budgeted(X, method: str, gamma: float, p: float, iters: int):
    """Run one solver under a fixed iteration budget; returns its outcome."""
    _, cfg = _budgeted_config(method, gamma, p, iters)
    if isinstance(cfg, SolverConfig):
        return arss_solve(X, cfg)
    return rrss_solve(X, cfg)


def fit_scaling_exponent(records: list[BenchRecord]) -> float:
    """Least-squares slope of log(median wall time) vs log N.

    Censored records are excluded; NaN when fewer than two sizes
    remain.
    """
    by_n: dict[int, list[float]] = {}
    for rec in records:
        if rec.censored:
            continue
        by_n.setdefault(rec.n_samples, []).append(rec.wall_time["total"])
    if len(by_n) < 2:
        return float("nan")
    sizes = sorted(by_n)
    logs_n = np.log([float(n) for n in sizes])
    logs_t = np.log([float(np.median(by_n[n])) for n in sizes])
    return float(np.polyfit(logs_n, logs_t, 1)[0])


def bench_scaling(method: str, n_list, n_features: int, gamma: float, p: float = 0.5,
                  repeats: int = 3, seed: int = 0, iters: int = 5,
                  time_cap: float | None = None, exclusive: bool = False):
    """Time one method across sample counts; returns (records, exponent).

    Every cell at a given N reruns the solver on the same seeded data;
    a cell whose total exceeds time_cap seconds is flagged censored
    (the measurement is kept, the exponent fit skips it).  exclusive
    pins kernels to one thread for the whole sweep: per-call thread
    spawn otherwise swamps small cells, and the numbers are only
    comparable under this flag.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError(f"need at least 3 strictly ascending sizes, got {n_list}")
    if repeats < 1 or iters < 1:
        raise ConfigError("repeats and iters must be >= 1")
    if method not in BENCH_METHODS:
        raise ConfigError(f"method must be one of {BENCH_METHODS}, got {method!r}")

    host = host_info()
    records: list[BenchRecord] = []
    with _single_thread_if(exclusive):
        # untimed warmup so first-call library setup lands on no cell
        run_budgeted(bench_dataset(n_list[0], n_features, seed), method, gamma, p, 1)
        for n in n_list:
            X = bench_dataset(n, n_features, seed)
            for rep in range(repeats):
                outcome = run_budgeted(X, method, gamma, p, iters)
                total = outcome.wall_time["total"]
                records.append(BenchRecord(
                    method=method, n_samples=n, n_features=n_features, k=0, repeat=rep,
                    wall_time=dict(outcome.wall_time), iterations=iters, seed=seed,
                    host=host, censored=time_cap is not None and total > time_cap))
    return records, fit_scaling_exponent(records)


def accuracy_vs_k(dataset: LabeledDataset, method: str, k_list, config=None,
                  seeds=(0,), knn_k: int = 3, noise: NoiseSpec | None = None,
                  candidate_count: int | None = None) -> AccuracyCurve:
    """Selection quality sweep mirroring the corruption protocol.

    Per seed: split into candidates/test, corrupt the candidates,
    select exemplars from the noisy candidates, train kNN on them and
    score on the untouched test split.  One solve per seed covers every
    K, since ranking a fitted coefficient matrix is K-independent.
    """
    if dataset.labels is None:
        raise MissingLabels("accuracy evaluation needs class labels")
    k_list = [int(k) for k in k_list]
    seeds = [int(s) for s in seeds]
    if not k_list or not seeds:
        raise ConfigError("k_list and seeds must be nonempty")
    n = dataset.n_samples
    if candidate_count is None:
        candidate_count = max(max(k_list), int(round(0.6 * n)))
    if not (max(k_list) <= candidate_count < n):
        raise InvalidCount(
            f"need max(k_list) <= candidate_count < {n}, got {candidate_count}")
    if noise is None:
        noise = NoiseSpec()

    per_seed: list[list[float]] = []
    for seed in seeds:
        cand, test = split_candidates(dataset, candidate_count, seed=seed)
        noisy = inject_noise(cand, dataclasses.replace(noise, seed=seed))
        report = select_exemplars(noisy.X, max(k_list), method=method,
                                  config=config, seed=seed)
        accs = []
        for k in k_list:
            chosen = report.order[:k]
            pred = knn_predict(noisy.X[:, chosen], noisy.labels[chosen],
                               test.X, k=min(knn_k, k))
            accs.append(float(np.mean(pred == test.labels)))
        per_seed.append(accs)

    arr = np.array(per_seed)
    return AccuracyCurve(method=method, k_values=k_list,
                         mean_accuracy=[float(m) for m in arr.mean(axis=0)],
                         std_accuracy=[float(s) for s in arr.std(axis=0)],
                         per_seed=[[float(a) for a in row] for row in per_seed],
                         knn_k=knn_k, seeds=seeds)
