"""Zeroth-order oracles: value access, noise models and call accounting."""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .randomness import Purpose, uniforms

# Rows per evaluation chunk.  Fixed so that the floating point work done for
# a batch never depends on the worker count.
CHUNK_ROWS = 2048

_executors: dict[int, ThreadPoolExecutor] = {}
_executor_lock = threading.Lock()


def _executor(workers: int) -> ThreadPoolExecutor:
    with _executor_lock:
        pool = _executors.get(workers)
        if pool is None:
            pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="zo-eval")
            _executors[workers] = pool
        return pool


class OracleError(ValueError):
    pass


class NoiseModel:
    """Additive value noise; ``offsets`` returns one delta per row."""

    delta: float = 0.0

    def offsets(self, X: np.ndarray, call_ids: np.ndarray) -> np.ndarray:
        return np.zeros(X.shape[0])


class NoNoise(NoiseModel):
    pass


def oscillating_sign(X: np.ndarray) -> np.ndarray:
    return np.sign(np.sin(1e3 * X.sum(axis=1)))


@dataclass
class BoundedAdversarial(NoiseModel):
    """delta(x) = Delta * pattern(x) with |pattern| <= 1, a pure function of x."""

    delta: float
    pattern: Callable[[np.ndarray], np.ndarray] = oscillating_sign

    def __post_init__(self):
        if self.delta < 0:
            raise OracleError("noise level must be non-negative")

    def offsets(self, X, call_ids):
        p = np.clip(np.asarray(self.pattern(X), dtype=float), -1.0, 1.0)
        return self.delta * p


@dataclass
class ZeroMeanRandom(NoiseModel):
    """i.i.d. uniform noise on [-Delta, Delta], keyed by the global call index."""

    delta: float
    seed: int = 0

    def __post_init__(self):
        if self.delta < 0:
            raise OracleError("noise level must be non-negative")

    def offsets(self, X, call_ids):
        if X.shape[0] == 0:
            return np.zeros(0)
        # call ids handed out by the oracle are contiguous for one request
        u = uniforms(self.seed, Purpose.NOISE, int(call_ids[0]), X.shape[0])[:, 0]
        return self.delta * (2.0 * u - 1.0)


ValuesFn = Callable[[np.ndarray, Optional[np.ndarray]], np.ndarray]


class ZeroOrderOracle:
    """Function-value oracle with exact, thread-safe call accounting.

    ``values(X, xi)`` maps an (n, d) array of query points to n values.  For
    stochastic oracles ``xi`` is an (n, k) integer array of component
    indices (row i is evaluated at its own sample xi[i]); ``None`` means the
    full objective.  Every evaluated row counts as one oracle call.
    """

    def __init__(self, values: ValuesFn, dim: int, *, noise: NoiseModel | None = None,
                 num_components: int | None = None,
                 gradient: Callable[[np.ndarray, Optional[np.ndarray]], np.ndarray] | None = None,
                 workers: int = 1, chunk_rows: int = CHUNK_ROWS):
        if dim < 1:
            raise OracleError("oracle dimension must be positive")
        self._values = values
        self.dim = int(dim)
        self.noise = noise or NoNoise()
        self.num_components = num_components
        self._gradient = gradient
        self.workers = max(1, int(workers))
        self.chunk_rows = int(chunk_rows)
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def stochastic(self) -> bool:
        return self.num_components is not None

    @property
    def has_gradient(self) -> bool:
        return self._gradient is not None

    @property
    def calls(self) -> int:
        return self._calls

    def _reserve(self, n: int) -> int:
        with self._lock:
            start = self._calls
            self._calls += n
            return start

    def _check_points(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise OracleError(f"dimension mismatch: expected points of dim {self.dim}, got {X.shape}")
        return X

    def _check_xi(self, xi, n: int):
        if xi is None:
            return None
        if not self.stochastic:
            raise OracleError("xi supplied to a deterministic oracle")
        xi = np.asarray(xi, dtype=np.int64)
        if xi.ndim == 0:
            xi = np.full((n, 1), int(xi))
        elif xi.ndim == 1:
            xi = xi[:, None]
        if xi.ndim != 2 or xi.shape[0] != n:
            raise OracleError("xi must provide one sample per query point")
        if np.any(xi < 0) or np.any(xi >= self.num_components):
            raise OracleError("xi index out of range")
        return xi

    def evaluate_many(self, X, xi=None) -> np.ndarray:
        """Values at every row of X; counts one call per row."""
        X = self._check_points(X)
        xi = self._check_xi(xi, X.shape[0])
        n = X.shape[0]
        first = self._reserve(n)
        if n == 0:
            return np.zeros(0)
        bounds = list(range(0, n, self.chunk_rows)) + [n]
        spans = list(zip(bounds[:-1], bounds[1:]))

        def work(span):
            a, b = span
            v = np.asarray(self._values(X[a:b], None if xi is None else xi[a:b]), dtype=float)
            return v + self.noise.offsets(X[a:b], np.arange(first + a, first + b))

        if self.workers == 1 or len(spans) == 1:
            parts = [work(s) for s in spans]
        else:
            parts = list(_executor(self.workers).map(work, spans))
        return np.concatenate(parts)

    def eval(self, x, xi=None) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise OracleError("eval expects a single point")
        return float(self.evaluate_many(x[None, :], None if xi is None else np.atleast_1d(xi)[None, :])[0])

    __call__ = eval

    def two_point_eval(self, x_plus, x_minus, xi) -> tuple[float, float]:
        """Both values at the same realisation xi; two calls."""
        pts = np.stack([np.asarray(x_plus, dtype=float), np.asarray(x_minus, dtype=float)])
        row = None if xi is None else np.repeat(np.atleast_1d(np.asarray(xi))[None, :], 2, axis=0)
        v = self.evaluate_many(pts, row)
        return float(v[0]), float(v[1])

    def clean_value(self, x) -> float:
        """Exact full objective (no noise, not counted); for reporting only."""
        X = self._check_points(x)
        return float(np.asarray(self._values(X, None), dtype=float)[0])

    def gradient(self, x, xi=None) -> np.ndarray:
        """Analytic (sub)gradient where available; counts as one call."""
        if self._gradient is None:
            raise OracleError("this oracle has no first-order information")
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise OracleError("dimension mismatch")
        if xi is not None:
            xi = self._check_xi(np.atleast_1d(xi)[None, :], 1)[0]
        self._reserve(1)
        return np.asarray(self._gradient(x, xi), dtype=float)


def function_oracle(fn: Callable[[np.ndarray], float], dim: int, **kwargs) -> ZeroOrderOracle:
    """Wrap a scalar function of one point (evaluated row by row)."""

    def values(X, xi):
        return np.array([fn(row) for row in X], dtype=float)

    return ZeroOrderOracle(values, dim, **kwargs)


def vectorized_oracle(fn: Callable[[np.ndarray], np.ndarray], dim: int, **kwargs) -> ZeroOrderOracle:
    """Wrap a function that already maps an (n, d) array to n values."""
    return ZeroOrderOracle(lambda X, xi: fn(X), dim, **kwargs)


def finite_sum_oracle(components: list[Callable[[np.ndarray], float]], dim: int,
                      **kwargs) -> ZeroOrderOracle:
    """Oracle for (1/m) sum_k f_k(x); xi selects components (averaged per row)."""
    m = len(components)
    if m < 1:
        raise OracleError("finite sum needs at least one component")

    def values(X, xi):
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            idx = range(m) if xi is None else xi[i]
            out[i] = math.fsum(components[k](row) for k in idx) / len(idx)
        return out

    return ZeroOrderOracle(values, dim, num_components=m, **kwargs)


def max_admissible_noise(epsilon: float, D: float, M2: float, d: int, const: float = 1.0) -> float:
    """Largest value-noise level eps^2 / (D M2 sqrt(d)) that keeps the
    smoothing scheme's guarantees up to constant factors."""
    for name, v in (("epsilon", epsilon), ("D", D), ("M2", M2), ("d", d), ("const", const)):
        if not v > 0:
            raise OracleError(f"{name} must be positive, got {v}")
    return const * epsilon**2 / (D * M2 * math.sqrt(d))
