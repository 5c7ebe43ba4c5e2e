"""Multi-seed experiment execution and CSV/JSON emission."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..estimators import Scheme
from ..geometry import Box, EuclideanBall, UnboundedSpace
from ..oracles import (
    BoundedAdversarial, NoNoise, ZeroMeanRandom, max_admissible_noise, oscillating_sign,
)
from ..problems import (
    LAD, SVM, BilinearSaddle, Linear, Quadratic, SyntheticL1, SyntheticMax, load_libsvm,
    make_a9a_like, make_abalone_like, make_regression, minmax_scale,
)
from ..smoothing import make_plan
from ..solvers import (
    RunRecord, adam_zo, agd_batched, extragradient_saddle, restart_agd, subgradient_baseline,
)
from .config import ConfigError, ExperimentConfig

CSV_HEADER = ("seed", "iteration", "oracle_calls", "objective", "wall_ms")


@dataclass
class Prepared:
    problem: object
    domain: object
    x0: np.ndarray
    plan: object = None
    fstar: float | None = None
    xstar: np.ndarray | None = None
    epsilon: float | None = None
    delta: float = 0.0
    plan_inputs: dict | None = None


@dataclass
class ExperimentResult:
    records: list[RunRecord]
    summary: dict
    csv_path: Path | None
    summary_csv_path: Path | None
    summary_json_path: Path | None


def _vector(value, d: int, what: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(d, float(arr))
    if arr.shape != (d,):
        raise ConfigError(f"{what} must have length {d}")
    return arr


def _dataset(cfg: ExperimentConfig):
    pc = cfg.problem
    if pc.data is not None:
        path = cfg.resolve(pc.data)
        ds = load_libsvm(path)
    elif pc.synthetic == "regression":
        ds = make_regression(pc.n, pc.d, seed=pc.data_seed)
    elif pc.synthetic == "abalone":
        ds = make_abalone_like(pc.n, seed=pc.data_seed)
    else:
        ds = make_a9a_like(pc.n, seed=pc.data_seed)
    return minmax_scale(ds) if pc.scale_features else ds


def build_problem(cfg: ExperimentConfig):
    pc = cfg.problem
    d = pc.d
    center = None if pc.center is None else _vector(pc.center, d, "problem.center")
    if pc.kind == "lad":
        return LAD(_dataset(cfg))
    if pc.kind == "svm":
        return SVM(_dataset(cfg), mu=pc.mu)
    if pc.kind == "quadratic":
        return Quadratic(np.zeros(d) if center is None else center, scale=pc.mu or 1.0)
    if pc.kind == "l1":
        return SyntheticL1(d, center)
    if pc.kind == "l1_quadratic":
        c = np.zeros(d) if center is None else center
        return Quadratic(c, scale=pc.mu or 1.0) + SyntheticL1(d, c)
    if pc.kind == "max":
        return SyntheticMax.random(d, pc.pieces, seed=pc.data_seed)
    if pc.kind == "linear":
        return Linear(np.ones(d) / math.sqrt(d) if center is None else center)
    # bilinear
    A = np.eye(1) if pc.matrix is None else np.asarray(pc.matrix, dtype=float)
    dc = cfg.domain
    dx, dy = A.shape
    return BilinearSaddle(A, Box(_vector(dc.lower, dx, "domain.lower"), _vector(dc.upper, dx, "domain.upper")),
                          Box(_vector(dc.lower, dy, "domain.lower"), _vector(dc.upper, dy, "domain.upper")))


def build_domain(cfg: ExperimentConfig, d: int):
    dc = cfg.domain
    if dc.kind == "unbounded":
        return UnboundedSpace(d)
    if dc.kind == "ball":
        center = np.zeros(d) if dc.center is None else _vector(dc.center, d, "domain.center")
        return EuclideanBall(center, dc.radius)
    return Box(_vector(dc.lower, d, "domain.lower"), _vector(dc.upper, d, "domain.upper"))


def _pattern(name: str):
    if name == "oscillating":
        return oscillating_sign
    if name == "constant":
        return lambda X: np.ones(X.shape[0])
    raise ConfigError(f"unknown noise.pattern {name!r}")


def prepare(cfg: ExperimentConfig) -> Prepared:
    """Everything shared by the seeds: problem, start point, reference, plan, noise."""
    problem = build_problem(cfg)
    d = problem.dim
    if isinstance(problem, BilinearSaddle):
        x0 = problem.spec.project(_vector(cfg.solver.x0, d, "solver.x0"))
        return Prepared(problem, None, x0)
    domain = build_domain(cfg, d)
    if domain.dim != d:
        raise ConfigError("domain dimension differs from the problem")
    x0 = domain.project(_vector(cfg.solver.x0, d, "solver.x0"))
    prep = Prepared(problem, domain, x0)
    ref = cfg.reference
    if ref.baseline_steps > 0:
        base = subgradient_baseline(problem, ref.baseline_step, ref.baseline_steps, x0, domain,
                                    record_every=ref.baseline_steps, wall_clock=False)
        prep.fstar = float(base.info["best_value"])
        prep.xstar = base.info["best_x"]
    if cfg.uses_plan:
        pl = cfg.plan
        eps = pl.epsilon if pl.epsilon is not None else pl.epsilon_rel * problem.value(x0)
        M = pl.M if pl.M is not None else problem.lipschitz(pl.p)
        M2 = pl.M2 if pl.M2 is not None else problem.lipschitz(2.0)
        if M is None or M2 is None:
            raise ConfigError(f"{problem.kind} has no closed-form Lipschitz constant; set plan.M and plan.M2")
        R = pl.R if pl.R is not None else pl.R0
        if R is None:
            R = float(np.linalg.norm(x0 - prep.xstar))
            if R == 0.0:
                raise ConfigError("x0 coincides with the reference optimum; set plan.R")
        prep.epsilon = eps
        if cfg.solver.name == "agd":
            prep.plan = make_plan(eps, M, M2, R, pl.p, d, max_batch=pl.max_batch,
                                  kappa_const=pl.kappa_const, n_const=pl.n_const, b_const=pl.b_const)
        prep.plan_inputs = {"epsilon": eps, "M": M, "M2": M2, "R": R, "p": pl.p}
    nc = cfg.noise
    if nc.kind != "none":
        if nc.delta is not None:
            delta = nc.delta
        else:
            pi = prep.plan_inputs
            # the optimum lies in the ball of radius R around x0, which has diameter 2R
            delta = max_admissible_noise(pi["epsilon"], 2.0 * pi["R"], pi["M2"], d)
        prep.delta = delta * nc.delta_scale
    return prep


def _noise(cfg: ExperimentConfig, prep: Prepared, seed: int):
    k = cfg.noise.kind
    if k == "none":
        return NoNoise()
    if k == "adversarial":
        return BoundedAdversarial(prep.delta, _pattern(cfg.noise.pattern))
    return ZeroMeanRandom(prep.delta, seed=seed)


def run_seed(cfg: ExperimentConfig, prep: Prepared, seed: int) -> RunRecord:
    s, est = cfg.solver, cfg.estimator
    problem = prep.problem
    wc = cfg.run.wall_clock
    common = dict(seed=seed, record_every=s.record_every, wall_clock=wc)
    if s.name == "subgradient":
        return subgradient_baseline(problem, s.step if s.step is not None else s.lr,
                                    s.iterations, prep.x0, prep.domain, **common)
    oracle = problem.oracle(noise=_noise(cfg, prep, seed), workers=cfg.run.workers)
    if s.name == "extragradient":
        spec = problem.spec
        return extragradient_saddle(oracle, spec, est, est, prep.x0, s.step,
                                    s.iterations, gap=problem.duality_gap,
                                    **common)
    objective = problem.value
    if s.name == "agd":
        return agd_batched(oracle, est, prep.plan, prep.domain, prep.x0, L=s.L,
                           iterations=s.iterations, max_oracle_calls=s.max_oracle_calls,
                           step_const=s.step_const, objective=objective, **common)
    if s.name == "restart_agd":
        pi = prep.plan_inputs
        pl = cfg.plan
        return restart_agd(oracle, est, s.mu, pi["epsilon"], pi["R"], M=pi["M"], M2=pi["M2"],
                           x0=prep.x0, p=pl.p, domain=prep.domain, max_batch=pl.max_batch,
                           n_const=pl.n_const, b_const=pl.b_const, kappa_const=pl.kappa_const,
                           step_const=s.step_const, objective=objective, **common)
    return adam_zo(oracle, est, s.lr, prep.x0, betas=tuple(s.betas), eps_adam=s.eps_adam,
                   iterations=s.iterations, max_oracle_calls=s.max_oracle_calls,
                   objective=objective, **common)


def write_curves(path: Path, records: list[RunRecord]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            for k, c, v, ms in zip(r.iterations, r.oracle_calls, r.objective, r.wall_ms):
                w.writerow((r.seed, int(k), int(c), repr(float(v)), repr(float(ms))))


def read_curves(path: str | Path) -> dict[int, dict[str, np.ndarray]]:
    """Parse a curve CSV back into per-seed arrays."""
    out: dict[int, dict[str, list]] = {}
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        for row in rd:
            seed = int(row[0])
            dst = out.setdefault(seed, {h: [] for h in CSV_HEADER[1:]})
            dst["iteration"].append(int(row[1]))
            dst["oracle_calls"].append(int(row[2]))
            dst["objective"].append(float(row[3]))
            dst["wall_ms"].append(float(row[4]))
    return {s: {k: np.asarray(v) for k, v in cols.items()} for s, cols in out.items()}


def aggregate(records: list[RunRecord]) -> list[dict]:
    """Per-iteration mean/min/max of the objective over the seeds that recorded it."""
    by_it: dict[int, list[float]] = {}
    for r in records:
        for k, v in zip(r.iterations, r.objective):
            by_it.setdefault(int(k), []).append(float(v))
    rows = []
    for k in sorted(by_it):
        vals = np.asarray(by_it[k])
        rows.append({"iteration": k, "mean": float(np.mean(vals)), "min": float(vals.min()),
                     "max": float(vals.max()), "count": int(vals.size)})
    return rows


def _write_aggregate(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("iteration", "mean", "min", "max", "count"))
        for r in rows:
            w.writerow((r["iteration"], repr(r["mean"]), repr(r["min"]), repr(r["max"]), r["count"]))


def _summary(cfg: ExperimentConfig, prep: Prepared, records: list[RunRecord]) -> dict:
    return {
        "solver": cfg.solver.name,
        "problem": cfg.problem.kind,
        "scheme": cfg.estimator.scheme.value,
        "seeds": list(cfg.run.seeds),
        "workers": cfg.run.workers,
        "epsilon": prep.epsilon,
        "reference_optimum": prep.fstar,
        "noise_delta": prep.delta,
        "plan": None if prep.plan is None else prep.plan.to_dict(),
        "aborted": any(r.aborted for r in records),
        "runs": [
            {"seed": r.seed, "rows": len(r), "final_objective": r.final_objective if len(r) else None,
             "best_objective": r.best_objective if len(r) else None,
             "oracle_calls": r.total_calls if len(r) else 0, "aborted": r.aborted,
             "abort_iteration": r.abort_iteration, "abort_reason": r.abort_reason}
            for r in records
        ],
    }


def run_experiment(cfg: ExperimentConfig, *, write: bool = True) -> ExperimentResult:
    prep = prepare(cfg)
    records = [run_seed(cfg, prep, s) for s in cfg.run.seeds]
    summary = _summary(cfg, prep, records)
    rows = aggregate(records)
    paths = (None, None, None)
    if write:
        out = cfg.resolve(cfg.run.output)
        agg = out.with_name(out.stem + ".summary.csv")
        js = out.with_name(out.stem + ".summary.json")
        write_curves(out, records)
        _write_aggregate(agg, rows)
        js.write_text(json.dumps(summary, indent=2, default=_json_default) + "\n")
        paths = (out, agg, js)
    summary["aggregate"] = rows
    return ExperimentResult(records, summary, *paths)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not serialisable: {type(obj)}")


def calls_to_reach(records: list[RunRecord], tau: float, budget: int) -> int | None:
    """First call count at which the seed-mean best-so-far curve is <= tau."""
    grid = np.unique(np.concatenate([r.oracle_calls for r in records]))
    grid = grid[grid <= budget]
    curves = []
    for r in records:
        idx = np.searchsorted(r.oracle_calls, grid, side="right") - 1
        curves.append(r.best_so_far()[np.maximum(idx, 0)])
    mean = np.mean(curves, axis=0)
    hit = np.nonzero(mean <= tau)[0]
    return int(grid[hit[0]]) if hit.size else None


def compare_estimators(cfg: ExperimentConfig, *, write: bool = True) -> dict:
    """Run the configured solver once per scheme in ``cfg.compare``.

    Each scheme writes its own curve CSV next to ``run.output``.  The report
    gives calls per iteration, final seed-mean objective and the calls each
    scheme needs to get within 90% of the decrease every scheme achieves.
    """
    results = {}
    for name in cfg.compare:
        scfg = replace(cfg, estimator=replace(cfg.estimator, scheme=Scheme(name)))
        out = cfg.resolve(cfg.run.output)
        scfg = replace(scfg, run=replace(cfg.run, output=str(out.with_name(f"{out.stem}.{name}{out.suffix}"))))
        results[name] = run_experiment(scfg, write=write)
    f0 = float(np.mean([r.objective[0] for r in next(iter(results.values())).records]))
    finals = {k: float(np.mean([r.final_objective for r in v.records])) for k, v in results.items()}
    tau = f0 - 0.9 * (f0 - max(finals.values()))
    budget = min(max(r.total_calls for r in v.records) for v in results.values())
    report = {"f0": f0, "threshold": tau, "call_budget": budget, "schemes": {}}
    for k, v in results.items():
        r0 = v.records[0]
        per_it = np.diff(r0.oracle_calls) / np.maximum(np.diff(r0.iterations), 1) if len(r0) > 1 else []
        report["schemes"][k] = {
            "calls_per_iteration": float(np.median(per_it)) if len(per_it) else None,
            "final_mean_objective": finals[k],
            "total_calls": [r.total_calls for r in v.records],
            "calls_to_threshold": calls_to_reach(v.records, tau, budget),
            "csv": None if v.csv_path is None else str(v.csv_path),
        }
    if write:
        out = cfg.resolve(cfg.run.output)
        out.with_name(out.stem + ".compare.json").write_text(json.dumps(report, indent=2) + "\n")
    return report
