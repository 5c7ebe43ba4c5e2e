"""Synthetic datasets shaped like the benchmark data used in the experiments.

No network access is assumed, so the regression and classification sets
are stand-ins with the same shape and value ranges as LibSVM's pre-scaled
``abalone_scale`` (8 features in [-1, 1], ring-count targets) and ``a9a``
(123 binary one-hot features, +/-1 labels).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .datasets import Dataset


def make_regression(n: int, d: int, seed: int = 0, *, noise: float = 0.5,
                    outlier_frac: float = 0.1, outlier_scale: float = 10.0) -> Dataset:
    """Gaussian features, linear targets, Laplace noise plus gross outliers."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    w = rng.standard_normal(d)
    y = X @ w + rng.laplace(scale=noise, size=n)
    bad = rng.random(n) < outlier_frac
    y[bad] += rng.standard_normal(bad.sum()) * outlier_scale
    return Dataset(X, y)


def make_abalone_like(n: int = 3500, seed: int = 0) -> Dataset:
    """8 features in [-1, 1] (first one categorical), integer targets in [1, 29]."""
    rng = np.random.default_rng(seed)
    sex = rng.choice([-1.0, 0.0, 1.0], size=n)
    size = rng.beta(5.0, 2.5, size=n)
    # the physical measurements are strongly correlated through overall size
    cont = np.clip(size[:, None] + rng.normal(0.0, 0.05, size=(n, 7)), 0.0, 1.0)
    cont = 2.0 * cont - 1.0
    X = np.column_stack([sex, cont])
    w = np.array([0.3, 2.0, 1.5, 1.0, 3.0, -2.5, 1.0, 4.0])
    y = 10.0 + X @ w + rng.laplace(scale=1.5, size=n)
    y = np.clip(np.round(y), 1, 29)
    return Dataset(X, y)


def make_a9a_like(n: int = 1000, seed: int = 0) -> Dataset:
    """123 binary features as 14 one-hot groups; about a quarter positive labels."""
    rng = np.random.default_rng(seed)
    groups = [8, 16, 9, 16, 7, 14, 6, 5, 2, 1, 1, 1, 1, 36]
    groups[-1] = 123 - sum(groups[:-1])
    offsets = np.cumsum([0] + groups[:-1])
    cols = np.stack([off + rng.integers(0, g, size=n) for off, g in zip(offsets, groups)], axis=1)
    rows = np.repeat(np.arange(n), len(groups))
    A = sp.csr_matrix((np.ones(rows.size), (rows, cols.ravel())), shape=(n, 123))
    w = rng.standard_normal(123) * 1.2
    score = np.asarray(A @ w).ravel()
    score += rng.logistic(scale=1.0, size=n)
    thresh = np.quantile(score, 0.76)
    y = np.where(score > thresh, 1.0, -1.0)
    return Dataset(A, y)
