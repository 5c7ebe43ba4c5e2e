"""Experiment configuration: TOML file -> validated ExperimentConfig."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..estimators import EstimatorConfig, EstimatorError, Scheme

SOLVERS = ("agd", "restart_agd", "extragradient", "adam", "subgradient")
PROBLEMS = ("lad", "svm", "quadratic", "l1", "l1_quadratic", "max", "linear", "bilinear")
SYNTHETIC = ("regression", "abalone", "a9a")
NOISE = ("none", "adversarial", "random")
DOMAINS = ("unbounded", "ball", "box")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemConfig:
    kind: str
    data: str | None = None
    synthetic: str | None = None
    n: int = 50
    d: int = 8
    data_seed: int = 0
    mu: float = 0.0
    center: tuple[float, ...] | None = None
    pieces: int = 16
    matrix: tuple[tuple[float, ...], ...] | None = None
    scale_features: bool = False


@dataclass(frozen=True)
class DomainConfig:
    kind: str = "unbounded"
    radius: float = 1.0
    center: tuple[float, ...] | None = None
    lower: float | tuple[float, ...] = -1.0
    upper: float | tuple[float, ...] = 1.0


@dataclass(frozen=True)
class SolverConfig:
    name: str
    iterations: int | None = None
    max_oracle_calls: int | None = None
    lr: float = 0.1
    betas: tuple[float, float] = (0.9, 0.999)
    eps_adam: float = 1e-8
    mu: float | None = None
    step: float | None = None
    L: float | None = None
    step_const: float = 1.0
    record_every: int = 1
    x0: tuple[float, ...] | float = 0.0


@dataclass(frozen=True)
class PlanConfig:
    epsilon: float | None = None
    epsilon_rel: float | None = None
    R: float | None = None
    R0: float | None = None
    M: float | None = None
    M2: float | None = None
    p: float = 2.0
    max_batch: int | None = None
    kappa_const: float = 1.0
    n_const: float = 1.0
    b_const: float = 1.0


@dataclass(frozen=True)
class ReferenceConfig:
    baseline_steps: int = 0
    baseline_step: float = 0.5


@dataclass(frozen=True)
class NoiseConfig:
    kind: str = "none"
    delta: float | None = None
    delta_scale: float = 1.0
    pattern: str = "oscillating"


@dataclass(frozen=True)
class RunConfig:
    seeds: tuple[int, ...] = (0,)
    workers: int = 1
    output: str = "results.csv"
    wall_clock: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemConfig
    solver: SolverConfig
    estimator: EstimatorConfig
    plan: PlanConfig = field(default_factory=PlanConfig)
    domain: DomainConfig = field(default_factory=DomainConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    run: RunConfig = field(default_factory=RunConfig)
    compare: tuple[str, ...] = ("central", "forward", "central_coord", "forward_coord")
    base_dir: str = "."

    @property
    def uses_plan(self) -> bool:
        return self.solver.name in ("agd", "restart_agd") and self.solver.L is None

    def with_overrides(self, *, seeds=None, workers=None, output=None, max_batch=None):
        run, plan = self.run, self.plan
        if seeds is not None:
            run = replace(run, seeds=tuple(int(s) for s in seeds))
        if workers is not None:
            run = replace(run, workers=int(workers))
        if output is not None:
            run = replace(run, output=str(output))
        if max_batch is not None:
            plan = replace(plan, max_batch=int(max_batch))
        cfg = replace(self, run=run, plan=plan)
        cfg.validate()
        return cfg

    def resolve(self, path: str | None) -> Path | None:
        if path is None:
            return None
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def validate(self) -> None:
        s, r, pr = self.solver, self.run, self.problem
        if not r.seeds:
            raise ConfigError("run.seeds must be nonempty")
        if r.workers < 1:
            raise ConfigError("run.workers must be at least 1")
        stops = [v for v in (s.iterations, s.max_oracle_calls) if v is not None]
        if len(stops) > 1:
            raise ConfigError("set exactly one of solver.iterations and solver.max_oracle_calls")
        if not stops and not self.uses_plan:
            raise ConfigError("no stop rule: set solver.iterations or solver.max_oracle_calls")
        if any(v < 1 for v in stops):
            raise ConfigError("budgets must be positive")
        if s.name in ("extragradient", "subgradient") and s.iterations is None:
            raise ConfigError(f"{s.name} runs for a fixed solver.iterations")
        if s.record_every < 1:
            raise ConfigError("solver.record_every must be at least 1")
        if pr.kind in ("lad", "svm") and (pr.data is None) == (pr.synthetic is None):
            raise ConfigError(f"{pr.kind} needs exactly one of problem.data or problem.synthetic")
        if pr.kind == "bilinear" and s.name != "extragradient":
            raise ConfigError("bilinear problems run with the extragradient solver")
        if s.name == "extragradient" and pr.kind != "bilinear":
            raise ConfigError("the extragradient solver needs a bilinear problem")
        if s.name == "extragradient" and not (s.step and s.step > 0):
            raise ConfigError("extragradient needs a positive solver.step")
        if s.name == "restart_agd":
            if s.mu is None or not s.mu > 0:
                raise ConfigError("restart_agd needs solver.mu > 0")
            if self.plan.R0 is None and self.plan.R is None:
                raise ConfigError("restart_agd needs plan.R0")
        if self.uses_plan:
            pl = self.plan
            if (pl.epsilon is None) == (pl.epsilon_rel is None):
                raise ConfigError("set exactly one of plan.epsilon and plan.epsilon_rel")
            if pl.R is None and pl.R0 is None and self.reference.baseline_steps < 1:
                raise ConfigError("plan.R is required unless reference.baseline_steps is set")
        if self.noise.kind != "none" and self.noise.delta is None and not self.uses_plan:
            raise ConfigError("noise.delta is required when no plan fixes the admissible level")


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _build(cls, sec: dict, name: str, **fixed):
    known = set(cls.__dataclass_fields__)
    extra = set(sec) - known
    if extra:
        raise ConfigError(f"unknown keys in [{name}]: {', '.join(sorted(extra))}")
    vals = {}
    for k, v in sec.items():
        _check_type(f"{name}.{k}", cls.__dataclass_fields__[k].type, v)
        vals[k] = tuple(tuple(r) if isinstance(r, list) else r for r in v) if isinstance(v, list) else v
    vals.update(fixed)
    try:
        return cls(**vals)
    except TypeError as exc:
        raise ConfigError(f"[{name}]: {exc}") from None


def _check_type(key: str, annotation: str, v) -> None:
    head = str(annotation).split(" ")[0].split("[")[0]
    ok = {
        "int": isinstance(v, int) and not isinstance(v, bool),
        "float": isinstance(v, (int, float)) and not isinstance(v, bool),
        "bool": isinstance(v, bool),
        "str": isinstance(v, str),
        "tuple": isinstance(v, list),
    }.get(head, True)
    if "None" in str(annotation) and v is None:
        ok = True
    if head == "float" and "tuple" in str(annotation) and isinstance(v, list):
        ok = True
    if head == "tuple" and "float" in str(annotation) and isinstance(v, (int, float)):
        ok = True
    if not ok:
        raise ConfigError(f"{key} has the wrong type ({type(v).__name__})")


def _choice(value, allowed, what):
    if value not in allowed:
        raise ConfigError(f"{what} must be one of {', '.join(allowed)}; got {value!r}")


def _estimator(sec: dict) -> EstimatorConfig:
    sec = dict(sec)
    if "batch" in sec:
        sec["batch_size"] = sec.pop("batch")
    extra = set(sec) - {"scheme", "gamma", "batch_size", "minibatch", "cache_base"}
    if extra:
        raise ConfigError(f"unknown keys in [estimator]: {', '.join(sorted(extra))}")
    if sec.get("scheme") == "exact_gradient":
        sec["scheme"] = "exact"
    try:
        return EstimatorConfig(**sec)
    except (EstimatorError, ValueError, TypeError) as exc:
        raise ConfigError(f"[estimator]: {exc}") from None


def config_from_dict(raw: dict, base_dir: str | Path = ".") -> ExperimentConfig:
    unknown = set(raw) - {"problem", "solver", "estimator", "plan", "domain", "noise",
                          "reference", "run", "compare"}
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")
    if "problem" not in raw or "solver" not in raw:
        raise ConfigError("config needs [problem] and [solver] sections")
    problem = _build(ProblemConfig, _section(raw, "problem"), "problem")
    _choice(problem.kind, PROBLEMS, "problem.kind")
    if problem.synthetic is not None:
        _choice(problem.synthetic, SYNTHETIC, "problem.synthetic")
    solver = _build(SolverConfig, _section(raw, "solver"), "solver")
    _choice(solver.name, SOLVERS, "solver.name")
    domain = _build(DomainConfig, _section(raw, "domain"), "domain")
    _choice(domain.kind, DOMAINS, "domain.kind")
    noise = _build(NoiseConfig, _section(raw, "noise"), "noise")
    _choice(noise.kind, NOISE, "noise.kind")
    run = _build(RunConfig, _section(raw, "run"), "run")
    compare = _section(raw, "compare").get("schemes", ExperimentConfig.compare)
    try:
        compare = tuple(Scheme(s).value for s in compare)
    except ValueError as exc:
        raise ConfigError(f"[compare]: {exc}") from None
    est_sec = _section(raw, "estimator")
    if solver.name == "subgradient" and not est_sec:
        est_sec = {"scheme": "exact"}
    cfg = ExperimentConfig(
        problem=problem, solver=solver, estimator=_estimator(est_sec),
        plan=_build(PlanConfig, _section(raw, "plan"), "plan"), domain=domain, noise=noise,
        reference=_build(ReferenceConfig, _section(raw, "reference"), "reference"),
        run=run, compare=compare, base_dir=str(base_dir),
    )
    for name in ("epsilon", "epsilon_rel", "R", "R0", "M", "M2"):
        v = getattr(cfg.plan, name)
        if v is not None and not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(f"plan.{name} must be a positive number")
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(raw, base_dir=path.parent)


def dump_example() -> dict[str, Any]:
    """A complete config for the LAD end-to-end run, as a plain dict."""
    return {
        "problem": {"kind": "lad", "synthetic": "regression", "n": 50, "d": 8},
        "solver": {"name": "agd", "record_every": 10},
        "estimator": {"scheme": "central"},
        "plan": {"epsilon_rel": 0.1, "max_batch": 64},
        "reference": {"baseline_steps": 100000},
        "run": {"seeds": [0, 1, 2, 3], "output": "lad_agd.csv"},
    }
