"""ADAM driven by zeroth-order gradient estimates."""

from __future__ import annotations

import numpy as np

from ..estimators import EstimatorConfig, batched_gradient
from ..oracles import ZeroOrderOracle
from ..randomness import SampleStream, StreamCursor
from .record import Recorder, RunRecord, SolverError


def adam_zo(oracle: ZeroOrderOracle, estimator: EstimatorConfig, lr: float, x0, *,
            betas: tuple[float, float] = (0.9, 0.999), eps_adam: float = 1e-8,
            iterations: int | None = None, max_oracle_calls: int | None = None,
            seed: int = 0, objective=None, reference=None, record_every: int = 1,
            wall_clock: bool = True) -> RunRecord:
    """Unconstrained ADAM with bias-corrected moments on estimated gradients.

    Estimator ``exact`` turns this into plain ADAM on analytic subgradients,
    which is the reference the zeroth-order variants are compared against.
    """
    b1, b2 = betas
    if not lr > 0:
        raise SolverError(f"learning rate must be positive, got {lr}")
    if not (0 <= b1 < 1 and 0 <= b2 < 1):
        raise SolverError("ADAM betas must lie in [0, 1)")
    if not eps_adam > 0:
        raise SolverError("eps_adam must be positive")
    if (iterations is None) == (max_oracle_calls is None):
        raise SolverError("give exactly one of iterations or max_oracle_calls")
    x = np.array(x0, dtype=float)
    if x.shape != (oracle.dim,):
        raise SolverError(f"x0 must be a vector of dimension {oracle.dim}")
    cursor = StreamCursor(seed)
    rec = Recorder("adam", seed, oracle, objective or oracle.clean_value, reference,
                   record_every, wall_clock)
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    rec.record(0, x, force=True)
    k = 0
    while True:
        if iterations is not None and k >= iterations:
            break
        if max_oracle_calls is not None and rec.calls() >= max_oracle_calls:
            break
        k += 1
        g = batched_gradient(oracle, x, estimator,
                             SampleStream(seed, cursor.take(estimator.batch_size))).g
        if not np.all(np.isfinite(g)):
            rec.abort(k, "non-finite gradient estimate")
            break
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**k)
        v_hat = v / (1.0 - b2**k)
        x = x - lr * m_hat / (np.sqrt(v_hat) + eps_adam)
        last = (iterations is not None and k == iterations) or (
            max_oracle_calls is not None and rec.calls() >= max_oracle_calls)
        if not rec.record(k, x, force=last):
            break
    return rec.finish(x, iterations=k, scheme=estimator.scheme.value, lr=lr)
