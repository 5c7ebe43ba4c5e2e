"""Run records shared by every solver."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class SolverError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Immutable per-iteration trace of one solver run.

    Row k holds the iteration index, the cumulative oracle calls at that
    point, the objective at the reported iterate (the averaged iterate for
    accelerated and extragradient methods) and, optionally, the distance to
    a reference point.  An aborted run keeps every finite row recorded
    before the abort.
    """

    solver: str
    seed: int
    iterations: np.ndarray
    oracle_calls: np.ndarray
    objective: np.ndarray
    wall_ms: np.ndarray
    x: np.ndarray
    distance: np.ndarray | None = None
    aborted: bool = False
    abort_iteration: int | None = None
    abort_reason: str | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("iterations", "oracle_calls", "objective", "wall_ms", "x", "distance"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.iterations.shape[0])

    @property
    def final_objective(self) -> float:
        return float(self.objective[-1])

    @property
    def best_objective(self) -> float:
        return float(np.min(self.objective))

    @property
    def total_calls(self) -> int:
        return int(self.oracle_calls[-1])

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.objective)


class Recorder:
    """Mutable builder used inside solver loops."""

    def __init__(self, solver: str, seed: int, oracle, objective: Callable | None,
                 reference=None, record_every: int = 1, wall_clock: bool = True):
        if record_every < 1:
            raise SolverError("record_every must be at least 1")
        self.solver = solver
        self.seed = seed
        self.oracle = oracle
        self.objective = objective
        self.reference = None if reference is None else np.asarray(reference, dtype=float)
        self.record_every = record_every
        self.wall_clock = wall_clock
        self._calls0 = oracle.calls if oracle is not None else 0
        self._t0 = time.perf_counter()
        self.rows: list[tuple] = []
        self.aborted = False
        self.abort_iteration = None
        self.abort_reason = None

    def calls(self) -> int:
        return (self.oracle.calls if self.oracle is not None else 0) - self._calls0

    def record(self, k: int, point, value: float | None = None, *, force: bool = False,
               calls: int | None = None) -> bool:
        """Append a row; returns False (and marks the run aborted) on non-finite data."""
        if not force and k % self.record_every != 0:
            return True
        point = np.asarray(point, dtype=float)
        if value is None:
            value = self.objective(point)
        if not (np.all(np.isfinite(point)) and np.isfinite(value)):
            self.abort(k, "non-finite iterate or objective")
            return False
        if self.rows and self.rows[-1][0] == k:
            return True
        dist = None if self.reference is None else float(np.linalg.norm(point - self.reference))
        ms = (time.perf_counter() - self._t0) * 1e3 if self.wall_clock else 0.0
        self.rows.append((k, self.calls() if calls is None else calls, float(value), dist, ms))
        return True

    def abort(self, k: int, reason: str) -> None:
        self.aborted = True
        self.abort_iteration = k
        self.abort_reason = reason

    def finish(self, x, **info) -> RunRecord:
        if self.rows:
            k, c, v, dist, ms = zip(*self.rows)
        else:
            k, c, v, dist, ms = (), (), (), (), ()
        return RunRecord(
            solver=self.solver, seed=self.seed,
            iterations=np.array(k, dtype=np.int64), oracle_calls=np.array(c, dtype=np.int64),
            objective=np.array(v, dtype=float), wall_ms=np.array(ms, dtype=float),
            x=np.asarray(x, dtype=float),
            distance=None if self.reference is None else np.array(dist, dtype=float),
            aborted=self.aborted, abort_iteration=self.abort_iteration,
            abort_reason=self.abort_reason, info=info,
        )


def concat_records(records: list[RunRecord], solver: str, **info) -> RunRecord:
    """Join consecutive stages into one trace with continuing iteration indices."""
    if not records:
        raise SolverError("nothing to concatenate")
    its, calls, obj, ms, dist = [], [], [], [], []
    it_off = call_off = 0
    ms_off = 0.0
    for i, r in enumerate(records):
        # every stage starts by recording its warm start, which repeats the
        # previous stage's last row
        sl = slice(1, None) if i > 0 and len(r) > 0 else slice(None)
        its.append(r.iterations[sl] + it_off)
        calls.append(r.oracle_calls[sl] + call_off)
        obj.append(r.objective[sl])
        ms.append(r.wall_ms[sl] + ms_off)
        if r.distance is not None:
            dist.append(r.distance[sl])
        if len(r):
            it_off += int(r.iterations[-1])
            call_off += int(r.oracle_calls[-1])
            ms_off += float(r.wall_ms[-1])
    last = records[-1]
    aborted = next((r for r in records if r.aborted), None)
    return RunRecord(
        solver=solver, seed=records[0].seed,
        iterations=np.concatenate(its), oracle_calls=np.concatenate(calls),
        objective=np.concatenate(obj), wall_ms=np.concatenate(ms), x=last.x,
        distance=np.concatenate(dist) if len(dist) == len(records) else None,
        aborted=aborted is not None,
        abort_iteration=None if aborted is None else aborted.abort_iteration,
        abort_reason=None if aborted is None else aborted.abort_reason,
        info=info,
    )
