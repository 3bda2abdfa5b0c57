"""Scikit-learn style estimators wrapping the selection pipeline.

These follow the usual sklearn conventions (rows are samples,
fit/transform, get_params/set_params via BaseEstimator) so a selector
can sit inside Pipeline or a hyperparameter search.  The functional API
in selection.py stays the source of truth; estimators only adapt
conventions and hold fitted state.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .alm import SolverConfig
from .exceptions import ConfigError
from .irls import RrssConfig
from .linalg import as_matrix
from .selection import METHODS, select_exemplars


class ExemplarSelector(BaseEstimator, TransformerMixin):
    """Pick the n_select most representative samples of X.

    fit(X) solves the chosen self-representation model on X (shape
    (n_samples, n_features)) and ranks samples; transform(X) returns
    the selected rows.  Fitted attributes: ranking_, scores_,
    selected_indices_, coefficients_, n_iter_, converged_, report_.
    """

    _selects_features = False

    def __init__(self, n_select=10, method="arss", gamma=1.0, p=0.5, mu0=0.1,
                 rho=1.2, epsilon=1e-10, max_iters=100, feas_tol=1e-6,
                 step_tol=1e-6, mu_max=1e10, obj_tol=1e-8, max_outer_iters=50,
                 deterministic=False, random_state=None):
        self.n_select = n_select
        self.method = method
        self.gamma = gamma
        self.p = p
        self.mu0 = mu0
        self.rho = rho
        self.epsilon = epsilon
        self.max_iters = max_iters
        self.feas_tol = feas_tol
        self.step_tol = step_tol
        self.mu_max = mu_max
        self.obj_tol = obj_tol
        self.max_outer_iters = max_outer_iters
        self.deterministic = deterministic
        self.random_state = random_state

    def _solver_config(self):
        if self.method == "arss":
            return SolverConfig(gamma=self.gamma, p=self.p, mu0=self.mu0,
                                rho=self.rho, epsilon=self.epsilon,
                                max_iters=self.max_iters, feas_tol=self.feas_tol,
                                step_tol=self.step_tol, mu_max=self.mu_max,
                                deterministic=self.deterministic)
        if self.method in ("rrss-authorial", "rrss-accelerated"):
            return RrssConfig(gamma=self.gamma, epsilon=self.epsilon,
                              max_outer_iters=self.max_outer_iters,
                              obj_tol=self.obj_tol,
                              path=self.method.removeprefix("rrss-"),
                              deterministic=self.deterministic)
        if self.method == "random":
            return None
        raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        # Internally columns are samples; sklearn hands samples as rows.
        data = X if self._selects_features else X.T
        report = select_exemplars(data, int(self.n_select), method=self.method,
                                  config=self._solver_config(),
                                  seed=self.random_state)
        self.report_ = report
        self.scores_ = np.asarray(report.scores)
        self.ranking_ = np.asarray(report.order)
        self.selected_indices_ = np.asarray(report.selected)
        self.coefficients_ = report.coefficients
        self.n_iter_ = report.iterations
        self.converged_ = report.converged
        return self

    def _check_fitted(self):
        if not hasattr(self, "selected_indices_"):
            raise NotFittedError("call fit before transform")

    def transform(self, X):
        """Subset X (rows are samples) to the selected samples."""
        self._check_fitted()
        X = as_matrix(X, "X")
        return X[self.selected_indices_]


class FeatureSubsetSelector(ExemplarSelector):
    """Pick the n_select most representative feature columns.

    The same pipeline run along the other axis: fit(X) with X of shape
    (n_samples, n_features) ranks features; transform keeps the
    selected columns, making this a drop-in sklearn transformer.
    """

    _selects_features = True

    def transform(self, X):
        self._check_fitted()
        X = as_matrix(X, "X")
        return X[:, self.selected_indices_]
