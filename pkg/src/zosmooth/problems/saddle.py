"""Convex-concave saddle problems over products of simple domains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import Box, Domain, EuclideanBall
from ..oracles import NoiseModel, ZeroOrderOracle
from .objectives import ProblemError


@dataclass
class SaddleSpec:
    """Block layout of z = (x, y) for min_x max_y f(x, y)."""

    dx: int
    dy: int
    domain_x: Domain
    domain_y: Domain
    M2x: float
    M2y: float
    Mx: float | None = None
    My: float | None = None

    def __post_init__(self):
        if self.domain_x.dim != self.dx or self.domain_y.dim != self.dy:
            raise ProblemError("block dimensions do not match their domains")
        self.Mx = self.M2x if self.Mx is None else self.Mx
        self.My = self.M2y if self.My is None else self.My

    @property
    def x_block(self) -> slice:
        return slice(0, self.dx)

    @property
    def y_block(self) -> slice:
        return slice(self.dx, self.dx + self.dy)

    def split(self, z):
        z = np.asarray(z, dtype=float)
        return z[..., : self.dx], z[..., self.dx :]

    def project(self, z):
        x, y = self.split(z)
        return np.concatenate([self.domain_x.project(x), self.domain_y.project(y)], axis=-1)


def _support(domain: Domain, c: np.ndarray) -> float:
    """max over the domain of <c, v>."""
    if isinstance(domain, Box):
        return float(np.sum(np.maximum(c * domain.lower, c * domain.upper)))
    if isinstance(domain, EuclideanBall):
        return float(c @ domain.center + domain.radius * np.linalg.norm(c))
    raise ProblemError("support function needs a box or ball domain")


class BilinearSaddle:
    """f(x, y) = <x, A y> + <bx, x> + <by, y> on box or ball blocks."""

    kind = "bilinear"

    def __init__(self, A, domain_x: Domain, domain_y: Domain, bx=None, by=None):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        dx, dy = self.A.shape
        self.bx = np.zeros(dx) if bx is None else np.asarray(bx, dtype=float)
        self.by = np.zeros(dy) if by is None else np.asarray(by, dtype=float)
        # ||grad_x|| = ||A y + bx|| is largest at a point of the y-domain
        m2x = self._max_norm(self.A, self.bx, domain_y)
        m2y = self._max_norm(self.A.T, self.by, domain_x)
        self.spec = SaddleSpec(dx, dy, domain_x, domain_y, M2x=m2x, M2y=m2y)
        self.dim = dx + dy

    @staticmethod
    def _max_norm(A, b, domain) -> float:
        if isinstance(domain, Box) and domain.dim <= 12:
            pts = domain.corners()
            return float(np.linalg.norm(pts @ A.T + b, axis=1).max())
        if isinstance(domain, EuclideanBall):
            return float(np.linalg.norm(A @ domain.center + b) + np.linalg.norm(A, 2) * domain.radius)
        if isinstance(domain, Box):
            r = np.linalg.norm(np.maximum(np.abs(domain.lower), np.abs(domain.upper)))
            return float(np.linalg.norm(A, 2) * r + np.linalg.norm(b))
        raise ProblemError("bilinear saddle needs bounded blocks")

    def value(self, x, y) -> float:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return float(x @ self.A @ y + self.bx @ x + self.by @ y)

    def values(self, Z, xi=None):
        X, Y = self.spec.split(Z)
        return np.einsum("ni,ij,nj->n", X, self.A, Y) + X @ self.bx + Y @ self.by

    def grad_x(self, x, y):
        return self.A @ np.asarray(y, dtype=float) + self.bx

    def grad_y(self, x, y):
        return self.A.T @ np.asarray(x, dtype=float) + self.by

    def gradient(self, z, xi=None):
        x, y = self.spec.split(z)
        return np.concatenate([self.grad_x(x, y), self.grad_y(x, y)])

    def oracle(self, noise: NoiseModel | None = None, workers: int = 1) -> ZeroOrderOracle:
        return ZeroOrderOracle(self.values, self.dim, noise=noise, gradient=self.gradient,
                               workers=workers)

    def duality_gap(self, x, y) -> tuple[float, str]:
        """max_y' f(x, y') - min_x' f(x', y), computed exactly."""
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        upper = _support(self.spec.domain_y, self.A.T @ x + self.by) + self.bx @ x
        lower = -_support(self.spec.domain_x, -(self.A @ y + self.bx)) + self.by @ y
        return float(upper - lower), "exact"


def sampled_duality_gap(f, spec: SaddleSpec, x, y, candidates_x, candidates_y) -> tuple[float, str]:
    """Lower estimate of the duality gap from finite candidate sets."""
    up = max(f(x, yc) for yc in candidates_y)
    lo = min(f(xc, y) for xc in candidates_x)
    return float(up - lo), "lower_estimate"
