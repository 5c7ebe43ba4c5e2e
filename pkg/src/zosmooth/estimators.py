"""Finite-difference gradient estimators and their batched averages.

Randomised schemes draw one unit direction per sample from a counter-based
stream, so sample j of a batch starting at stream id s always uses the
direction addressed by s + j.  All query points of a batch are sent to the
oracle in a single request; the oracle may spread them over a worker pool
without changing any result bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .oracles import NoNoise, ZeroOrderOracle
from .randomness import Purpose, SampleStream, integers_block, sphere_block


class EstimatorError(ValueError):
    pass


class Scheme(str, Enum):
    CENTRAL = "central"
    FORWARD = "forward"
    ONE_POINT = "one_point"
    CENTRAL_COORD = "central_coord"
    FORWARD_COORD = "forward_coord"
    EXACT = "exact"

    @property
    def randomized(self) -> bool:
        return self in (Scheme.CENTRAL, Scheme.FORWARD, Scheme.ONE_POINT)

    @property
    def coordinate(self) -> bool:
        return self in (Scheme.CENTRAL_COORD, Scheme.FORWARD_COORD)


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimator choice.

    ``minibatch`` only matters for stochastic oracles: each sample draws that
    many component indices as its xi (``None`` evaluates the full objective).
    ``cache_base`` lets the forward scheme share one f(x) across a batch; it
    is only honoured for noiseless deterministic evaluation.
    """

    scheme: Scheme = Scheme.CENTRAL
    gamma: float = 1e-3
    batch_size: int = 1
    minibatch: int | None = None
    cache_base: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is not Scheme.EXACT and not self.gamma > 0:
            raise EstimatorError(f"gamma must be positive, got {self.gamma}")
        if self.batch_size < 1:
            raise EstimatorError("batch_size must be at least 1")
        if self.minibatch is not None and self.minibatch < 1:
            raise EstimatorError("minibatch must be positive")

    def calls_per_estimate(self, d: int) -> int:
        """Oracle calls consumed by one batched estimate in dimension d."""
        B = self.batch_size
        return {
            Scheme.CENTRAL: 2 * B,
            Scheme.FORWARD: (1 + B) if self.cache_base else 2 * B,
            Scheme.ONE_POINT: B,
            Scheme.CENTRAL_COORD: 2 * d,
            Scheme.FORWARD_COORD: d + 1,
            Scheme.EXACT: B,
        }[self.scheme]


@dataclass(frozen=True)
class GradientEstimate:
    g: np.ndarray
    oracle_calls_used: int
    samples_used: int


def _mean_rows(S: np.ndarray) -> np.ndarray:
    # contiguous reduction axis -> numpy's pairwise summation
    return np.ascontiguousarray(S.T).sum(axis=1) / S.shape[0]


def _xi_block(oracle: ZeroOrderOracle, minibatch, seed: int, start: int, count: int):
    if not oracle.stochastic or minibatch is None:
        return None
    return integers_block(oracle.num_components, seed, start, count, minibatch, Purpose.XI)


def _embed(x: np.ndarray, block: slice | None, dirs: np.ndarray) -> np.ndarray:
    if block is None:
        return dirs
    full = np.zeros((dirs.shape[0], x.shape[0]))
    full[:, block] = dirs
    return full


def _check(x, gamma, oracle):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != oracle.dim:
        raise EstimatorError(f"expected a point of dimension {oracle.dim}")
    if not gamma > 0:
        raise EstimatorError(f"gamma must be positive, got {gamma}")
    return x


def sphere_samples(oracle: ZeroOrderOracle, x, gamma: float, scheme: Scheme, seed: int,
                   start: int, count: int, *, minibatch=None, block: slice | None = None,
                   cache_base: bool = False) -> tuple[np.ndarray, int]:
    """Per-sample randomised estimates, shape (count, block dim), and calls used."""
    x = _check(x, gamma, oracle)
    scheme = Scheme(scheme)
    dim = x.shape[0] if block is None else len(range(*block.indices(x.shape[0])))
    dirs = sphere_block(dim, seed, start, count, Purpose.DIRECTION)
    E = _embed(x, block, dirs)
    xi = _xi_block(oracle, minibatch, seed, start, count)
    before = oracle.calls
    if scheme is Scheme.CENTRAL:
        pts = np.concatenate([x + gamma * E, x - gamma * E])
        v = oracle.evaluate_many(pts, None if xi is None else np.concatenate([xi, xi]))
        coef = dim * (v[:count] - v[count:]) / (2.0 * gamma)
    elif scheme is Scheme.FORWARD:
        shared = cache_base and xi is None and isinstance(oracle.noise, NoNoise)
        if shared:
            v = oracle.evaluate_many(np.concatenate([x[None, :], x + gamma * E]))
            coef = dim * (v[1:] - v[0]) / gamma
        else:
            base = np.repeat(x[None, :], count, axis=0)
            v = oracle.evaluate_many(np.concatenate([x + gamma * E, base]),
                                     None if xi is None else np.concatenate([xi, xi]))
            coef = dim * (v[:count] - v[count:]) / gamma
    elif scheme is Scheme.ONE_POINT:
        v = oracle.evaluate_many(x + gamma * E, xi)
        coef = dim * v / gamma
    else:
        raise EstimatorError(f"{scheme.value} is not a randomised scheme")
    return coef[:, None] * dirs, oracle.calls - before


def coordinate_estimate(oracle: ZeroOrderOracle, x, gamma: float, scheme: Scheme, *,
                        xi=None, block: slice | None = None) -> tuple[np.ndarray, int]:
    """Deterministic finite differences along every basis vector of the block."""
    x = _check(x, gamma, oracle)
    idx = np.arange(x.shape[0]) if block is None else np.arange(x.shape[0])[block]
    k = idx.shape[0]
    basis = np.zeros((k, x.shape[0]))
    basis[np.arange(k), idx] = 1.0
    before = oracle.calls
    scheme = Scheme(scheme)
    if scheme is Scheme.CENTRAL_COORD:
        pts = np.concatenate([x + gamma * basis, x - gamma * basis])
        rows = None if xi is None else np.repeat(np.asarray(xi)[None, :], 2 * k, axis=0)
        v = oracle.evaluate_many(pts, rows)
        g = (v[:k] - v[k:]) / (2.0 * gamma)
    elif scheme is Scheme.FORWARD_COORD:
        pts = np.concatenate([x[None, :], x + gamma * basis])
        rows = None if xi is None else np.repeat(np.asarray(xi)[None, :], k + 1, axis=0)
        v = oracle.evaluate_many(pts, rows)
        g = (v[1:] - v[0]) / gamma
    else:
        raise EstimatorError(f"{scheme.value} is not a coordinate scheme")
    return g, oracle.calls - before


def _stream_args(stream: SampleStream | int):
    if isinstance(stream, SampleStream):
        return stream.master_seed, stream.stream_id
    return int(stream), 0


def central_two_point(oracle, x, gamma, stream, *, minibatch=None) -> np.ndarray:
    """d (f(x + g e) - f(x - g e)) / (2 g) e for one fresh direction e."""
    seed, sid = _stream_args(stream)
    return sphere_samples(oracle, x, gamma, Scheme.CENTRAL, seed, sid, 1, minibatch=minibatch)[0][0]


def forward_two_point(oracle, x, gamma, stream, *, minibatch=None) -> np.ndarray:
    """d (f(x + g e) - f(x)) / g e; f(x) re-evaluated for this sample."""
    seed, sid = _stream_args(stream)
    return sphere_samples(oracle, x, gamma, Scheme.FORWARD, seed, sid, 1, minibatch=minibatch)[0][0]


def one_point(oracle, x, gamma, stream, *, minibatch=None) -> np.ndarray:
    """d f(x + g e) / g e from a single evaluation."""
    seed, sid = _stream_args(stream)
    return sphere_samples(oracle, x, gamma, Scheme.ONE_POINT, seed, sid, 1, minibatch=minibatch)[0][0]


def central_coordinate(oracle, x, gamma, *, xi=None) -> np.ndarray:
    return coordinate_estimate(oracle, x, gamma, Scheme.CENTRAL_COORD, xi=xi)[0]


def forward_coordinate(oracle, x, gamma, *, xi=None) -> np.ndarray:
    return coordinate_estimate(oracle, x, gamma, Scheme.FORWARD_COORD, xi=xi)[0]


def batched_gradient(oracle: ZeroOrderOracle, x, cfg: EstimatorConfig,
                     stream: SampleStream | int, *, block: slice | None = None) -> GradientEstimate:
    """Arithmetic mean of ``cfg.batch_size`` independent single-sample estimates.

    Sample j is addressed by stream id ``stream.stream_id + j``.  Coordinate
    schemes yield one deterministic estimate (their xi, if any, comes from
    the first stream id).  The exact scheme averages analytic subgradients
    and is only meant as a first-order reference.
    """
    seed, start = _stream_args(stream)
    B = cfg.batch_size
    x = np.asarray(x, dtype=float)
    if cfg.scheme.randomized:
        S, calls = sphere_samples(oracle, x, cfg.gamma, cfg.scheme, seed, start, B,
                                  minibatch=cfg.minibatch, block=block, cache_base=cfg.cache_base)
        return GradientEstimate(_mean_rows(S), calls, B)
    if cfg.scheme.coordinate:
        xi = _xi_block(oracle, cfg.minibatch, seed, start, 1)
        g, calls = coordinate_estimate(oracle, x, cfg.gamma, cfg.scheme,
                                       xi=None if xi is None else xi[0], block=block)
        return GradientEstimate(g, calls, 1)
    # exact first-order reference
    xi = _xi_block(oracle, cfg.minibatch, seed, start, B)
    before = oracle.calls
    rows = [oracle.gradient(x, None if xi is None else xi[j]) for j in range(B if xi is not None else 1)]
    G = np.stack(rows)
    if block is not None:
        G = G[:, block]
    return GradientEstimate(_mean_rows(G), oracle.calls - before, G.shape[0])
