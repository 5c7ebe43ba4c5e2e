"""Batched accelerated stochastic approximation (AC-SA style)."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..estimators import EstimatorConfig, Scheme, batched_gradient
from ..geometry import Domain, UnboundedSpace
from ..oracles import ZeroOrderOracle
from ..randomness import SampleStream, StreamCursor
from ..smoothing import SmoothingPlan
from .record import Recorder, RunRecord, SolverError


def configure_estimator(estimator: EstimatorConfig, plan: SmoothingPlan | None) -> EstimatorConfig:
    """Apply a plan's smoothing radius and batch size to a randomised estimator."""
    if plan is None or estimator.scheme is Scheme.EXACT:
        return estimator
    batch = plan.B if estimator.scheme.randomized else estimator.batch_size
    return replace(estimator, gamma=plan.gamma, batch_size=batch)


def _budget(iterations, max_oracle_calls, plan):
    if iterations is not None and max_oracle_calls is not None:
        raise SolverError("set either an iteration budget or an oracle-call budget, not both")
    if iterations is None and max_oracle_calls is None:
        if plan is None:
            raise SolverError("no stop rule: give iterations, max_oracle_calls or a plan")
        iterations = plan.N
    for v in (iterations, max_oracle_calls):
        if v is not None and v < 1:
            raise SolverError("budgets must be positive")
    return iterations, max_oracle_calls


def agd_batched(oracle: ZeroOrderOracle, estimator: EstimatorConfig, plan: SmoothingPlan | None,
                domain: Domain | None, x0, *, L: float | None = None, seed: int = 0,
                iterations: int | None = None, max_oracle_calls: int | None = None,
                step_const: float = 1.0, objective=None, reference=None,
                record_every: int = 1, wall_clock: bool = True,
                cursor: StreamCursor | None = None) -> RunRecord:
    """Run N steps of the accelerated method on batched gradient estimates.

    Step k (from 1): x_md = (1 - a) x_ag + a x, g = batched estimate at
    x_md, x = proj(x - eta g), x_ag = (1 - a) x_ag + a x, with a = 2/(k+1)
    and eta = step_const (k+1) / (4 L).  The returned record reports the
    objective of x_ag; ``x`` of the record is the final x_ag.  A plan, when
    given, supplies L, gamma, B and the iteration count.
    """
    x = np.array(x0, dtype=float)
    if x.ndim != 1 or x.shape[0] != oracle.dim:
        raise SolverError(f"x0 must be a vector of dimension {oracle.dim}")
    domain = domain or UnboundedSpace(oracle.dim)
    if domain.dim != oracle.dim:
        raise SolverError("domain and oracle dimensions differ")
    if L is None:
        if plan is None:
            raise SolverError("agd_batched needs a plan or an explicit L")
        L = plan.L
    if not L > 0:
        raise SolverError(f"L must be positive, got {L}")
    iterations, max_calls = _budget(iterations, max_oracle_calls, plan)
    est = configure_estimator(estimator, plan)
    cursor = cursor or StreamCursor(seed)
    objective = objective or oracle.clean_value
    rec = Recorder("agd", seed, oracle, objective, reference, record_every, wall_clock)

    x = domain.project(x)
    x_ag = x.copy()
    rec.record(0, x_ag, force=True)
    k = 0
    while True:
        if iterations is not None and k >= iterations:
            break
        if max_calls is not None and rec.calls() >= max_calls:
            break
        k += 1
        a = 2.0 / (k + 1)
        eta = step_const * (k + 1) / (4.0 * L)
        # convex combinations written as offsets so equal points stay bit-identical
        x_md = x_ag + a * (x - x_ag)
        n = 1 if est.scheme.coordinate else est.batch_size
        g = batched_gradient(oracle, x_md, est, SampleStream(cursor.master_seed, cursor.take(n))).g
        if not np.all(np.isfinite(g)):
            rec.abort(k, "non-finite gradient estimate")
            break
        x = domain.project(x - eta * g)
        x_ag = x_ag + a * (x - x_ag)
        last = (iterations is not None and k == iterations) or (
            max_calls is not None and rec.calls() >= max_calls)
        if not rec.record(k, x_ag, force=last):
            break
    return rec.finish(x_ag, L=L, gamma=est.gamma, batch_size=est.batch_size,
                      iterations=k, scheme=est.scheme.value)
