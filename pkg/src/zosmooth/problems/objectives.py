"""Benchmark objectives with vectorised values and analytic subgradients.

``values(X, xi)`` evaluates an (n, d) block of points.  Finite-sum
objectives accept ``xi`` as an (n, k) array of data indices: row i is then
the loss averaged over its own k examples.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from ..geometry import Domain, EuclideanBall, Box, UnboundedSpace
from ..oracles import NoiseModel, ZeroOrderOracle
from ..randomness import Purpose, SampleStream, ball_block, sphere_block, uniforms
from .datasets import Dataset, DataError


class ProblemError(ValueError):
    pass


def _dual_norm(v: np.ndarray, p: float, axis=-1):
    if p == 1.0:
        return np.abs(v).max(axis=axis)
    q = p / (p - 1.0)
    return np.linalg.norm(v, ord=q, axis=axis) if q == 2.0 else (np.abs(v) ** q).sum(axis=axis) ** (1 / q)


class Objective:
    """Base class; subclasses fill in ``values`` and usually ``subgradient``."""

    kind = "objective"
    dim: int
    num_components: int | None = None
    mu: float = 0.0
    has_subgradient = True

    def values(self, X: np.ndarray, xi: np.ndarray | None = None) -> np.ndarray:
        raise NotImplementedError

    def value(self, x) -> float:
        return float(self.values(np.asarray(x, dtype=float)[None, :])[0])

    def subgradient(self, x, xi=None) -> np.ndarray:
        raise ProblemError(f"{self.kind} has no analytic subgradient")

    def lipschitz(self, p: float = 2.0) -> float | None:
        """Global Lipschitz constant w.r.t. the p-norm, when one exists."""
        return None

    @property
    def M2(self) -> float | None:
        return self.lipschitz(2.0)

    def oracle(self, noise: NoiseModel | None = None, workers: int = 1) -> ZeroOrderOracle:
        grad = self.subgradient if self.has_subgradient else None
        return ZeroOrderOracle(self.values, self.dim, noise=noise,
                               num_components=self.num_components, gradient=grad,
                               workers=workers)

    def __add__(self, other: "Objective") -> "SumObjective":
        return SumObjective([self, other])


class SumObjective(Objective):
    kind = "sum"

    def __init__(self, parts):
        flat = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, SumObjective) else [p])
        dims = {p.dim for p in flat}
        if len(dims) != 1:
            raise ProblemError("summed objectives must share a dimension")
        if sum(p.num_components is not None for p in flat) > 1:
            raise ProblemError("at most one finite-sum term is supported")
        self.parts = flat
        self.dim = dims.pop()
        self.num_components = next((p.num_components for p in flat if p.num_components), None)
        self.mu = sum(p.mu for p in flat)
        self.has_subgradient = all(p.has_subgradient for p in flat)

    def values(self, X, xi=None):
        return sum(p.values(X, xi if p.num_components else None) for p in self.parts)

    def subgradient(self, x, xi=None):
        return sum(p.subgradient(x, xi if p.num_components else None) for p in self.parts)

    def lipschitz(self, p=2.0):
        parts = [q.lipschitz(p) for q in self.parts]
        return None if any(v is None for v in parts) else float(sum(parts))


class Linear(Objective):
    kind = "linear"

    def __init__(self, a, b: float = 0.0):
        self.a = np.asarray(a, dtype=float)
        self.b = float(b)
        self.dim = self.a.shape[0]

    def values(self, X, xi=None):
        return X @ self.a + self.b

    def subgradient(self, x, xi=None):
        return self.a.copy()

    def lipschitz(self, p=2.0):
        return float(_dual_norm(self.a, p))


class Quadratic(Objective):
    """(scale / 2) ||x - c||^2; Lipschitz only on a ball of given radius."""

    kind = "quadratic"

    def __init__(self, c, scale: float = 1.0, radius: float | None = None):
        self.c = np.asarray(c, dtype=float)
        self.dim = self.c.shape[0]
        self.scale = float(scale)
        self.mu = self.scale
        self.radius = radius

    def values(self, X, xi=None):
        D = X - self.c
        return 0.5 * self.scale * np.einsum("ij,ij->i", D, D)

    def subgradient(self, x, xi=None):
        return self.scale * (np.asarray(x, dtype=float) - self.c)

    def lipschitz(self, p=2.0):
        if self.radius is None:
            return None
        # ||v||_q <= ||v||_2 for q >= 2, so the Euclidean bound serves every p
        return self.scale * self.radius


class SyntheticL1(Objective):
    """||x - c||_1."""

    kind = "l1"

    def __init__(self, d: int, c=None):
        self.dim = int(d)
        self.c = np.zeros(self.dim) if c is None else np.asarray(c, dtype=float)

    def values(self, X, xi=None):
        return np.abs(X - self.c).sum(axis=1)

    def subgradient(self, x, xi=None):
        return np.sign(np.asarray(x, dtype=float) - self.c)

    def lipschitz(self, p=2.0):
        return float(_dual_norm(np.ones(self.dim), p))


class SyntheticMax(Objective):
    """max_i (<a_i, x> + b_i): a piecewise-linear convex benchmark."""

    kind = "max"

    def __init__(self, A, b):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.b = np.asarray(b, dtype=float)
        self.dim = self.A.shape[1]

    @classmethod
    def random(cls, d: int, pieces: int, seed: int = 0) -> "SyntheticMax":
        rng = np.random.default_rng(seed)
        return cls(rng.standard_normal((pieces, d)) / math.sqrt(d), rng.standard_normal(pieces) * 0.1)

    def values(self, X, xi=None):
        return (X @ self.A.T + self.b).max(axis=1)

    def subgradient(self, x, xi=None):
        k = int(np.argmax(self.A @ np.asarray(x, dtype=float) + self.b))
        return self.A[k].copy()

    def lipschitz(self, p=2.0):
        return float(_dual_norm(self.A, p, axis=1).max())


class _DataObjective(Objective):
    def __init__(self, data: Dataset):
        if data.n == 0:
            raise ProblemError("empty dataset")
        self.data = data
        self.dim = data.d
        self.num_components = data.n
        self._A = data.features
        self._dense = data.dense() if not data.is_sparse or data.n * data.d <= 4_000_000 else None
        self._y = data.labels

    def _margins(self, X, xi):
        """<x_k, w> for every query row and every selected example."""
        if xi is None:
            if self._dense is not None:
                return X @ self._dense.T
            return np.asarray((self._A @ X.T).T)
        if self._dense is not None:
            return np.einsum("nkd,nd->nk", self._dense[xi], X)
        return np.stack([np.asarray(self._A[xi[i]] @ X[i]).ravel() for i in range(X.shape[0])])

    def _labels(self, X, xi):
        return self._y[None, :] if xi is None else self._y[xi]

    def _rows(self, xi):
        if xi is None:
            return self._A, self._y
        return self._A[xi], self._y[xi]


class LAD(_DataObjective):
    """Least absolute deviations (1/n) sum |<x_i, w> - y_i|."""

    kind = "lad"

    def values(self, X, xi=None):
        return np.abs(self._margins(X, xi) - self._labels(X, xi)).mean(axis=1)

    def subgradient(self, w, xi=None):
        A, y = self._rows(xi)
        r = A @ np.asarray(w, dtype=float) - y
        s = np.sign(np.asarray(r).ravel())
        return np.asarray(A.T @ s).ravel() / s.shape[0]

    def lipschitz(self, p=2.0):
        return float(self.data.row_norms(math.inf if p == 1.0 else p / (p - 1.0)).max())


class SVM(_DataObjective):
    """(mu / 2) ||w||^2 + (1/n) sum max(0, 1 - y_i <x_i, w>)."""

    kind = "svm"

    def __init__(self, data: Dataset, mu: float = 0.0, radius: float | None = None):
        if not data.is_classification:
            raise DataError("SVM labels must all be -1 or +1")
        if mu < 0:
            raise ProblemError("mu must be non-negative")
        super().__init__(data)
        self.mu = float(mu)
        self.radius = radius

    def values(self, X, xi=None):
        hinge = np.maximum(0.0, 1.0 - self._labels(X, xi) * self._margins(X, xi)).mean(axis=1)
        return 0.5 * self.mu * np.einsum("ij,ij->i", X, X) + hinge

    def subgradient(self, w, xi=None):
        w = np.asarray(w, dtype=float)
        A, y = self._rows(xi)
        active = (1.0 - y * np.asarray(A @ w).ravel()) > 0
        coef = np.where(active, -y, 0.0)
        return self.mu * w + np.asarray(A.T @ coef).ravel() / y.shape[0]

    def lipschitz(self, p=2.0):
        base = float(self.data.row_norms(math.inf if p == 1.0 else p / (p - 1.0)).max())
        if self.mu == 0:
            return base
        if self.radius is None:
            return None
        return base + self.mu * self.radius


def lad_value(w, data: Dataset) -> float:
    return LAD(data).value(w)


def svm_value(w, data: Dataset, mu: float) -> float:
    return SVM(data, mu).value(w)


def analytic_subgradient(problem: Objective, x) -> np.ndarray:
    if not problem.has_subgradient:
        raise ProblemError(f"{problem.kind} has no analytic subgradient")
    return problem.subgradient(np.asarray(x, dtype=float))


def _domain_points(domain: Domain, n: int, seed: int, start: int, radius: float) -> np.ndarray:
    d = domain.dim
    if isinstance(domain, EuclideanBall):
        return domain.center + domain.radius * ball_block(d, seed, start, n, Purpose.DOMAIN)
    if isinstance(domain, Box):
        u = uniforms(seed, Purpose.DOMAIN, start, n, d)
        return domain.lower + u * (domain.upper - domain.lower)
    return radius * ball_block(d, seed, start, n, Purpose.DOMAIN)


def estimate_M2(problem: Objective, domain: Domain, n_samples: int,
                stream: SampleStream | int, *, radius: float = 1.0, gamma: float = 1e-6) -> float:
    """Empirical (lower-bound) estimate of the Euclidean Lipschitz constant.

    Maximum subgradient norm over sampled domain points; without
    subgradients, the maximum one-sided difference quotient along random
    directions.  Unbounded domains are sampled in a ball of ``radius``.
    """
    if n_samples < 2:
        raise ProblemError("n_samples must be at least 2")
    seed, start = (stream.master_seed, stream.stream_id) if isinstance(stream, SampleStream) else (int(stream), 0)
    pts = _domain_points(domain, n_samples, seed, start, radius)
    if problem.has_subgradient:
        return float(max(np.linalg.norm(problem.subgradient(p)) for p in pts))
    dirs = sphere_block(problem.dim, seed, start, n_samples, Purpose.DIRECTION)
    diff = problem.values(pts + gamma * dirs) - problem.values(pts)
    return float(np.abs(diff).max() / gamma)
