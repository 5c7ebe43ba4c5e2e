"""Parameter planning for smoothed zeroth-order methods.

All order-level constants are taken as 1 and exposed as multipliers so
experiments can tune them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import dual_exponent
from .oracles import ZeroOrderOracle
from .randomness import Purpose, SampleStream, ball_block


class PlanError(ValueError):
    pass


def _positive(**values):
    for name, v in values.items():
        if not (isinstance(v, (int, float, np.floating, np.integer)) and v > 0 and math.isfinite(v)):
            raise PlanError(f"{name} must be a positive finite number, got {v!r}")


def choose_gamma(epsilon: float, M2: float) -> float:
    """Smoothing radius epsilon / (2 M2): the bias gamma*M2 is half the budget."""
    _positive(epsilon=epsilon, M2=M2)
    return epsilon / (2.0 * M2)


def lipschitz_of_smoothed(d: int, M: float, gamma: float) -> float:
    """Gradient Lipschitz constant sqrt(d) M / gamma of the ball-smoothed f."""
    _positive(d=d, M=M, gamma=gamma)
    return math.sqrt(d) * M / gamma


def _q(p: float) -> float:
    try:
        return dual_exponent(p)
    except ValueError as exc:
        raise PlanError(str(exc)) from None


def kappa(p: float, d: float, const: float = 1.0) -> float:
    """min(q, ln d) * d^(2/q - 1); q = inf gives ln(d)/d."""
    q = _q(p)
    if not d > 1:
        raise PlanError(f"d must exceed 1, got {d}")
    expo = -1.0 if math.isinf(q) else 2.0 / q - 1.0
    return const * min(q, math.log(d)) * d**expo


def chi(p: float, d: float) -> float:
    q = _q(p)
    if not d > 1:
        raise PlanError(f"d must exceed 1, got {d}")
    return min(q - 1.0, 2.0 * math.log(d))


def lambda_factor(p: float, d: float) -> float:
    """Batched-variance factor 2 chi + sqrt(3 pi chi) + 3."""
    c = chi(p, d)
    return 2.0 * c + math.sqrt(3.0 * math.pi * c) + 3.0


@dataclass(frozen=True)
class SmoothingPlan:
    epsilon: float
    M: float
    M2: float
    R: float
    p: float
    d: int
    gamma: float
    L: float
    kappa: float
    chi: float
    lam: float
    sigma2: float
    N: int
    B_theoretical: int
    B: int
    T: int
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def q(self) -> float:
        return _q(self.p)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["warnings"] = list(self.warnings)
        out["q"] = self.q if math.isfinite(self.q) else "inf"
        return out

    def report(self) -> str:
        lines = [
            f"epsilon      = {self.epsilon:.6g}",
            f"p, q         = {self.p:g}, {self.q:g}",
            f"d            = {self.d}",
            f"M, M2, R     = {self.M:.6g}, {self.M2:.6g}, {self.R:.6g}",
            f"gamma        = {self.gamma:.6g}",
            f"L            = {self.L:.6g}",
            f"kappa(p,d)   = {self.kappa:.6g}",
            f"chi(p,d)     = {self.chi:.6g}",
            f"lambda(p,d)  = {self.lam:.6g}",
            f"sigma^2      = {self.sigma2:.6g}",
            f"N            = {self.N}",
            f"B (theory)   = {self.B_theoretical}",
            f"B (applied)  = {self.B}",
            f"T = N*B      = {self.T}",
        ]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def make_plan(epsilon: float, M: float, M2: float, R: float, p: float, d: int, *,
              max_batch: int | None = None, kappa_const: float = 1.0,
              n_const: float = 1.0, b_const: float = 1.0) -> SmoothingPlan:
    """Iteration count N and batch size B for the batched accelerated method.

    N = ceil(4 sqrt(2) d^(1/4) sqrt(M2 M) R / eps) and
    B = max(1, ceil(256 lambda sigma^2 R^2 / (eps^2 N))) with
    sigma^2 = 2 kappa d M2^2.  ``max_batch`` caps the applied B; the
    uncapped value is kept as ``B_theoretical``.
    """
    _positive(epsilon=epsilon, M=M, M2=M2, R=R, d=d)
    if max_batch is not None and max_batch < 1:
        raise PlanError("max_batch must be at least 1")
    q = _q(p)
    gamma = choose_gamma(epsilon, M2)
    L = lipschitz_of_smoothed(d, M, gamma)
    if d > 1:
        kap = kappa(p, d, kappa_const)
        ch = chi(p, d)
        lam = lambda_factor(p, d)
    else:
        # one-dimensional sphere is {-1, +1}: every dual norm equals |e| = 1
        kap, ch, lam = kappa_const * 1.0, 0.0, 3.0
    sigma2 = 2.0 * kap * d * M2**2
    N = max(1, math.ceil(n_const * 4.0 * math.sqrt(2.0) * d**0.25 * math.sqrt(M2 * M) * R / epsilon))
    B_theory = max(1, math.ceil(b_const * 256.0 * lam * sigma2 * R**2 / (epsilon**2 * N)))
    B = B_theory if max_batch is None else min(B_theory, int(max_batch))
    notes = []
    if p == 1.0 and d > 1:
        bound = d**-0.25 * M2**1.5 * R / math.sqrt(M)
        if epsilon > bound:
            notes.append(
                f"p=1 oracle bound assumes epsilon <= d^-1/4 M2^3/2 R / M^1/2 = {bound:.4g}"
            )
            warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    if B < B_theory:
        notes.append(f"batch capped at {B} (theory asks for {B_theory})")
    return SmoothingPlan(epsilon=epsilon, M=M, M2=M2, R=R, p=p, d=int(d), gamma=gamma, L=L,
                         kappa=kap, chi=ch, lam=lam, sigma2=sigma2, N=N, B_theoretical=B_theory,
                         B=B, T=N * B, warnings=tuple(notes))


def smoothed_value_mc(oracle: ZeroOrderOracle, x, gamma: float, n: int,
                      stream: SampleStream | int):
    """Monte-Carlo mean and standard error of f(x + gamma u), u uniform in the unit ball."""
    if n < 2:
        raise PlanError("need at least two samples for a standard error")
    _positive(gamma=gamma)
    seed, start = (stream.master_seed, stream.stream_id) if isinstance(stream, SampleStream) else (int(stream), 0)
    x = np.asarray(x, dtype=float)
    U = ball_block(x.shape[0], seed, start, n, Purpose.BALL)
    v = oracle.evaluate_many(x + gamma * U)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(n))


def saddle_gammas(epsilon: float, M2x: float, M2y: float) -> tuple[float, float]:
    """Per-block radii whose combined smoothing bias is epsilon / 2."""
    _positive(epsilon=epsilon, M2x=M2x, M2y=M2y)
    return epsilon / (4.0 * M2x), epsilon / (4.0 * M2y)


def saddle_cross_lipschitz(dx: int, dy: int, Mx: float, My: float, gx: float, gy: float):
    """(Lxx, Lxy, Lyx, Lyy) for the block-smoothed saddle function."""
    _positive(dx=dx, dy=dy, Mx=Mx, My=My, gx=gx, gy=gy)
    return (
        math.sqrt(dx) * Mx / gx,
        math.sqrt(dy) * Mx / gy,
        math.sqrt(dx) * My / gx,
        math.sqrt(dy) * My / gy,
    )


def plan_report(epsilon: float, M: float, M2: float, R: float, p: float, d: int,
                max_batch: int | None = None) -> dict:
    """Plan plus the p=2 versus p=1 variance-factor comparison; no oracle access."""
    plan = make_plan(epsilon, M, M2, R, p, d, max_batch=max_batch)
    out = plan.to_dict()
    if d > 1:
        k2, k1 = kappa(2.0, d), kappa(1.0, d)
        out["kappa_p2"] = k2
        out["kappa_p1"] = k1
        out["kappa_ratio_p2_over_p1"] = k2 / k1
    out["text"] = plan.report() + (
        f"\nkappa(p=2)/kappa(p=1) = {out['kappa_ratio_p2_over_p1']:.6g}" if d > 1 else ""
    )
    return out
