"""Projected subgradient descent: the first-order ground-truth baseline."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..geometry import Domain, UnboundedSpace
from ..problems.objectives import Objective
from .record import Recorder, RunRecord, SolverError


def subgradient_baseline(problem: Objective, c: float | Callable[[int], float], N: int, x0,
                         domain: Domain | None = None, *, record_every: int = 1,
                         wall_clock: bool = True, seed: int = 0) -> RunRecord:
    """x_{k} = P(x_{k-1} - c / sqrt(k) * g(x_{k-1})); step may also be a callable of k.

    The objective column is f at the current iterate; ``info['best_x']`` and
    ``info['best_value']`` hold the best point visited.  Each subgradient is
    counted as one (first-order) call.  ``seed`` only labels the record:
    the method is deterministic.
    """
    if not problem.has_subgradient:
        raise SolverError(f"{problem.kind} exposes no analytic subgradient")
    if N < 1:
        raise SolverError("N must be positive")
    step = c if callable(c) else (lambda k: c / math.sqrt(k))
    domain = domain or UnboundedSpace(problem.dim)
    x = domain.project(np.array(x0, dtype=float))
    rec = Recorder("subgradient", seed, None, problem.value, None, record_every, wall_clock)
    fx = problem.value(x)
    best_x, best = x.copy(), fx
    rec.record(0, x, fx, force=True, calls=0)
    for k in range(1, N + 1):
        g = problem.subgradient(x)
        x = domain.project(x - step(k) * g)
        fx = problem.value(x)
        if fx < best:
            best, best_x = fx, x.copy()
        if not rec.record(k, x, fx, force=(k == N), calls=k):
            break
    return rec.finish(x, best_x=best_x, best_value=best)
