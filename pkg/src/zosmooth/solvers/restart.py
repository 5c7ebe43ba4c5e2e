"""Restarted accelerated method for strongly convex objectives."""

from __future__ import annotations

import math

import numpy as np

from ..estimators import EstimatorConfig
from ..geometry import Domain
from ..oracles import ZeroOrderOracle
from ..randomness import StreamCursor
from ..smoothing import make_plan
from .agd import agd_batched
from .record import RunRecord, SolverError, concat_records


def restart_schedule(mu: float, epsilon: float, R0: float) -> list[tuple[float, float, float]]:
    """Stages as (target eps_k, start radius R_{k-1}, end radius R_k).

    eps_k = mu R0^2 / 2 * 4^-k for k = 1..K and R_k = sqrt(2 eps_k / mu), so
    each stage quarters the accuracy and halves the distance bound.  When
    epsilon >= mu R0^2 / 2 a single stage targets epsilon directly.
    """
    if not mu > 0:
        raise SolverError(f"mu must be positive, got {mu}")
    if not (epsilon > 0 and R0 > 0):
        raise SolverError("epsilon and R0 must be positive")
    if mu * R0**2 < epsilon:
        raise SolverError("restarts require mu >= epsilon / R0^2")
    top = mu * R0**2 / 2.0
    if epsilon >= top:
        return [(epsilon, R0, math.sqrt(2.0 * epsilon / mu))]
    K = math.ceil(math.log(top / epsilon) / math.log(4.0))
    stages = []
    prev_R = R0
    for k in range(1, K + 1):
        eps_k = top * 4.0**-k
        R_k = math.sqrt(2.0 * eps_k / mu)
        stages.append((eps_k, prev_R, R_k))
        prev_R = R_k
    return stages


def restart_agd(oracle: ZeroOrderOracle, estimator: EstimatorConfig, mu: float, epsilon: float,
                R0: float, *, M: float, M2: float, x0, p: float = 2.0,
                domain: Domain | None = None, seed: int = 0, max_batch: int | None = None,
                n_const: float = 1.0, b_const: float = 1.0, kappa_const: float = 1.0,
                step_const: float = 1.0, objective=None, reference=None,
                record_every: int = 1, wall_clock: bool = True) -> RunRecord:
    """Chain plan-driven accelerated stages, each warm-started at the previous x_ag.

    Stage k is planned for accuracy eps_k with distance bound R_{k-1}.
    """
    stages = restart_schedule(mu, epsilon, R0)
    cursor = StreamCursor(seed)
    x = np.asarray(x0, dtype=float)
    records, plans = [], []
    for eps_k, r_start, r_end in stages:
        plan = make_plan(eps_k, M, M2, r_start, p, oracle.dim, max_batch=max_batch,
                         kappa_const=kappa_const, n_const=n_const, b_const=b_const)
        rec = agd_batched(oracle, estimator, plan, domain, x, seed=seed, cursor=cursor,
                          step_const=step_const, objective=objective, reference=reference,
                          record_every=record_every, wall_clock=wall_clock)
        records.append(rec)
        plans.append({"epsilon": eps_k, "R_start": r_start, "R_end": r_end,
                      "N": plan.N, "B": plan.B, "B_theoretical": plan.B_theoretical,
                      "gamma": plan.gamma, "L": plan.L})
        x = rec.x
        if rec.aborted:
            break
    out = concat_records(records, "restart_agd", stages=plans, restarts=len(records))
    return out
