import numpy as np
import pytest


def three_clusters(seed, n_per=20, sigma=0.1):
    """Three Gaussian clusters on orthogonal axes in R^3.

    Centers are 15*e_i (pairwise distance ~21.2), so no cluster lies in
    the span of the other two and each needs its own representative.
    """
    centers = 15.0 * np.eye(3)
    labels = np.repeat(np.arange(3), n_per)
    rng = np.random.default_rng(seed)
    X = centers[labels].T + sigma * rng.standard_normal((3, labels.size))
    return X, labels


def two_clusters(seed, n_per=50, sigma=0.1, dim=2):
    """Two well-separated Gaussian clusters (centers 10 apart)."""
    centers = np.zeros((2, dim))
    centers[0, 0] = 5.0
    centers[1, 0] = -5.0
    centers[:, 1 % dim] += 5.0
    labels = np.repeat(np.arange(2), n_per)
    rng = np.random.default_rng(seed)
    X = centers[labels].T + sigma * rng.standard_normal((dim, labels.size))
    return X, labels


def spd_matrix(rng, n):
    """Random well-conditioned SPD matrix G^T G + I."""
    g = rng.standard_normal((n, n))
    return g.T @ g + np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
