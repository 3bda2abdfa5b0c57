"""Robust exemplar and feature subset selection by self-representation.

A dataset is summarized by the few samples that best linearly
reconstruct everyone else; this package fits the row-sparse
coefficient matrix behind that idea with two solvers (a robust
lp-loss model solved by augmented Lagrangian iterations, and the
convex l21 baseline solved by reweighted least squares), each with an
accelerated linear-system path for the common wide-data case, plus
ranking, data I/O, a corruption protocol, evaluation and benchmarking
utilities, sklearn-style estimators, and a CLI.
"""

__version__ = "0.1.0"

from .alm import AlmState, SolveOutcome, SolverConfig, arss_objective, arss_solve
from .dataio import (LabeledDataset, NoiseSpec, inject_noise, read_matrix,
                     split_candidates, write_matrix)
from .estimators import ExemplarSelector, FeatureSubsetSelector
from .evalbench import (AccuracyCurve, BenchRecord, accuracy_vs_k,
                        bench_scaling, knn_predict)
from .exceptions import (ArssError, BadMagic, ConfigError, DataError,
                         DimensionMismatch, EmptyTrainingSet, InvalidCount,
                         InvalidK, MissingLabels, NonFinite, ParseError,
                         SingularSystem, SolverError)
from .irls import (RrssConfig, rrss_a_dense, rrss_a_fast, rrss_objective,
                   rrss_solve)
from .linalg import scale_cols_inv, spd_solve
from .selection import (RankedSelection, SelectionReport, rank_rows,
                        select_exemplars, select_features)
from .shrinkage import ShrinkageParams, gst_matrix, gst_scalar, tau_threshold

__all__ = [
    "__version__",
    "AlmState", "SolveOutcome", "SolverConfig", "arss_objective", "arss_solve",
    "LabeledDataset", "NoiseSpec", "inject_noise", "read_matrix",
    "split_candidates", "write_matrix",
    "ExemplarSelector", "FeatureSubsetSelector",
    "AccuracyCurve", "BenchRecord", "accuracy_vs_k", "bench_scaling", "knn_predict",
    "ArssError", "BadMagic", "ConfigError", "DataError", "DimensionMismatch",
    "EmptyTrainingSet", "InvalidCount", "InvalidK", "MissingLabels", "NonFinite",
    "ParseError", "SingularSystem", "SolverError",
    "RrssConfig", "rrss_a_dense", "rrss_a_fast", "rrss_objective", "rrss_solve",
    "scale_cols_inv", "spd_solve",
    "RankedSelection", "SelectionReport", "rank_rows", "select_exemplars",
    "select_features",
    "ShrinkageParams", "gst_matrix", "gst_scalar", "tau_threshold",
]
