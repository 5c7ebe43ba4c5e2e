"""Batched extragradient for convex-concave saddle problems."""

from __future__ import annotations

import warnings
from typing import Callable

import numpy as np

from ..estimators import EstimatorConfig, batched_gradient
from ..oracles import ZeroOrderOracle
from ..problems.saddle import SaddleSpec
from ..randomness import SampleStream, StreamCursor
from .record import Recorder, RunRecord, SolverError

GapFn = Callable[[np.ndarray, np.ndarray], "tuple[float, str]"]


def extragradient_saddle(oracle: ZeroOrderOracle, spec: SaddleSpec, est_x: EstimatorConfig,
                         est_y: EstimatorConfig, z0, step: float, N: int, *,
                         gap: GapFn | None = None, lipschitz: float | None = None,
                         seed: int = 0, record_every: int = 1,
                         wall_clock: bool = True) -> RunRecord:
    """Extragradient on G(z) = (g_x, -g_y) with per-block estimates.

    Half step z_half = P(z - s G(z)), full step z = P(z - s G(z_half)).  The
    reported iterate is the running average of the half-step points, and
    the objective column holds its duality gap when ``gap`` is given
    (otherwise f at the average).
    """
    if not step > 0:
        raise SolverError(f"step must be positive, got {step}")
    if N < 1:
        raise SolverError("N must be positive")
    if oracle.dim != spec.dx + spec.dy:
        raise SolverError("oracle dimension differs from dx + dy")
    z = np.asarray(z0, dtype=float)
    if z.shape != (oracle.dim,):
        raise SolverError("z0 has the wrong dimension")
    z = spec.project(z)
    if lipschitz is not None and step > 1.0 / lipschitz:
        warnings.warn(f"step {step} exceeds 1/L = {1.0 / lipschitz:.3g}", RuntimeWarning,
                      stacklevel=2)
    cursor = StreamCursor(seed)
    gap_kind = None

    def report(zbar):
        nonlocal gap_kind
        x, y = spec.split(zbar)
        if gap is None:
            return oracle.clean_value(zbar)
        value, gap_kind = gap(x, y)
        return value

    def G(point):
        gx = batched_gradient(oracle, point, est_x,
                              SampleStream(seed, cursor.take(est_x.batch_size)),
                              block=spec.x_block).g
        gy = batched_gradient(oracle, point, est_y,
                              SampleStream(seed, cursor.take(est_y.batch_size)),
                              block=spec.y_block).g
        return np.concatenate([gx, -gy])

    rec = Recorder("extragradient", seed, oracle, report, None, record_every, wall_clock)
    zbar = z.copy()
    rec.record(0, zbar, force=True)
    total = np.zeros_like(z)
    for k in range(1, N + 1):
        z_half = spec.project(z - step * G(z))
        z = spec.project(z - step * G(z_half))
        total += z_half
        zbar = total / k
        if not np.all(np.isfinite(z)):
            rec.abort(k, "non-finite iterate")
            break
        if not rec.record(k, zbar, force=(k == N)):
            break
    return rec.finish(zbar, last_iterate=z, gap_kind=gap_kind, step=step)
