"""Norms, dual exponents and Euclidean projections onto feasible sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class GeometryError(ValueError):
    """Raised for invalid norm parameters, domains or inputs."""


def dual_exponent(p: float) -> float:
    """Return q with 1/p + 1/q = 1 (p=1 gives q=inf)."""
    if not 1.0 <= p <= 2.0:
        raise GeometryError(f"p must lie in [1, 2], got {p}")
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


@dataclass(frozen=True)
class NormSetup:
    p: float = 2.0
    q: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", dual_exponent(self.p))

    def norm(self, x) -> float:
        return p_norm(x, self.p)

    def dual_norm(self, x) -> float:
        return p_norm(x, self.q)


def p_norm(x, p: float) -> float:
    """(sum |x_i|^p)^(1/p), or max |x_i| for p = inf.

    User-facing p is restricted to [1, 2]; p = inf is accepted so that
    dual norms can be measured.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise GeometryError("p_norm received non-finite entries")
    if p == math.inf:
        return float(np.max(np.abs(x))) if x.size else 0.0
    if not 1.0 <= p <= 2.0:
        raise GeometryError(f"p must lie in [1, 2] or be inf, got {p}")
    if p == 1.0:
        return float(np.sum(np.abs(x)))
    if p == 2.0:
        return float(np.linalg.norm(x))
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


class Domain:
    """Closed convex feasible set with a Euclidean projection."""

    dim: int

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x, tol: float = 0.0) -> bool:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise GeometryError(
                f"dimension mismatch: point has {x.shape[-1]}, domain has {self.dim}"
            )
        return x


@dataclass(frozen=True, eq=False)
class UnboundedSpace(Domain):
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryError("dimension must be positive")

    def project(self, x):
        return self._check(x).copy()

    def contains(self, x, tol=0.0):
        self._check(x)
        return True

    def diameter(self):
        return math.inf


@dataclass(frozen=True, eq=False)
class EuclideanBall(Domain):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", center)
        if not self.radius > 0:
            raise GeometryError(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def project(self, x):
        x = self._check(x)
        shift = x - self.center
        dist = np.linalg.norm(shift, axis=-1, keepdims=True)
        # interior points are returned untouched so projection is idempotent
        outside = dist > self.radius
        scale = np.where(outside, self.radius / np.where(dist > 0, dist, 1.0), 1.0)
        out = np.where(outside, self.center + shift * scale, x)
        # rounding may leave a boundary point a few ulps outside; pull it in
        for _ in range(8):
            over = outside & (np.linalg.norm(out - self.center, axis=-1, keepdims=True) > self.radius)
            if not over.any():
                break
            scale = np.where(over, scale * (1.0 - 2.0**-52), scale)
            out = np.where(outside, self.center + shift * scale, x)
        return out

    def contains(self, x, tol=0.0):
        x = self._check(x)
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def diameter(self):
        return 2.0 * self.radius


@dataclass(frozen=True, eq=False)
class Box(Domain):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape:
            raise GeometryError("box bounds must have equal shapes")
        if np.any(lower > upper):
            raise GeometryError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def project(self, x):
        return np.clip(self._check(x), self.lower, self.upper)

    def contains(self, x, tol=0.0):
        x = self._check(x)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    def corners(self) -> np.ndarray:
        """All 2^d vertices; only sensible for small d."""
        d = self.dim
        bits = (np.arange(2**d)[:, None] >> np.arange(d)) & 1
        return np.where(bits == 1, self.upper, self.lower)


def project(x, dom: Domain) -> np.ndarray:
    """Euclidean projection of ``x`` onto ``dom``."""
    return dom.project(x)
