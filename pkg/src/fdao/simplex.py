"""Nelder-Mead minimization of the sum of absolute residuals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .models import Dataset, DomainError, ModelSpec, ParamVector

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5

CONVERGED = "converged"
LOOP_CAP = "loop_cap"


@dataclass(frozen=True)
class SimplexConfig:
    theta_init: ParamVector
    delta_init: float = 0.1
    epsilon_stop: float = 1e-8
    loop_cap: int = 1_024_000

    def __post_init__(self):
        if not self.delta_init > 0:
            raise ValueError(f"delta_init must be > 0, got {self.delta_init}")
        if not self.epsilon_stop > 0:
            raise ValueError(f"epsilon_stop must be > 0, got {self.epsilon_stop}")
        if int(self.loop_cap) != self.loop_cap or self.loop_cap < 1:
            raise ValueError(f"loop_cap must be a positive integer, got {self.loop_cap}")


@dataclass(frozen=True)
class FitResult:
    theta_opt: ParamVector
    sr: float
    loops: int
    stop_reason: str
    residuals: np.ndarray
    rel_change: float
    evaluations: int


def objective_sr(spec: ModelSpec, data: Dataset, theta) -> float:
    """Sum of absolute residuals; +inf when the model is not finite anywhere on the data."""
    values = theta.values if isinstance(theta, ParamVector) else theta
    with np.errstate(all="ignore"):
        f = spec.curve(data.x, values)
        if not np.all(np.isfinite(f)):
            return float("inf")
        return float(np.sum(np.abs(data.y - f)))


def initial_simplex(theta: np.ndarray, delta: float) -> np.ndarray:
    """Vertex 0 is ``theta``; vertex j+1 scales parameter j by (1 + delta), or adds delta if it is 0."""
    k = theta.size
    simplex = np.tile(theta, (k + 1, 1))
    for j in range(k):
        simplex[j + 1, j] = theta[j] * (1.0 + delta) if theta[j] != 0 else delta
    return simplex


def fit(spec: ModelSpec, data: Dataset, config: SimplexConfig,
        on_loop: Callable[[int, float], None] | None = None) -> FitResult:
    """Minimize SR from ``config.theta_init``.

    Each loop applies one simplex transformation (reflection, expansion,
    contraction or shrink). The run converges when the relative SR spread
    between the worst and best vertices, ``(SR_worst - SR_best) / SR_best``,
    falls below ``epsilon_stop``, the best SR is exactly 0, or the simplex has
    collapsed to floating-point resolution; otherwise it stops after
    ``loop_cap`` loops.
    """
    spec.check_theta(config.theta_init)
    if data.m < spec.arity:
        raise ValueError(f"{spec.family} needs at least {spec.arity} points, got {data.m}")
    spec.check_x(data.x)

    # canonical row order makes the objective sum independent of input order
    order = np.lexsort((data.y, data.x))
    canon = Dataset(data.x[order], data.y[order])

    def f(v):
        return objective_sr(spec, canon, v)

    pts = initial_simplex(config.theta_init.as_array(), config.delta_init)
    fv = np.array([f(p) for p in pts])
    n_eval = len(fv)
    if not np.isfinite(fv[0]):
        raise DomainError(f"objective is not finite at theta_init {config.theta_init.as_dict()}")

    loops = 0
    rel = np.inf
    stop = LOOP_CAP
    while True:
        idx = np.argsort(fv, kind="stable")
        pts, fv = pts[idx], fv[idx]
        best, worst = fv[0], fv[-1]
        if best == 0.0:
            rel, stop = 0.0, CONVERGED
            break
        rel = (worst - best) / best if np.isfinite(worst) else np.inf
        if rel < config.epsilon_stop:
            stop = CONVERGED
            break
        # vertices equal to within a few ulps: no transformation can move them
        if np.all(np.ptp(pts, axis=0) <= 4 * np.spacing(np.abs(pts).max(axis=0))):
            stop = CONVERGED
            break
        if loops >= config.loop_cap:
            break

        centroid = pts[:-1].mean(axis=0)
        xr = centroid + REFLECT * (centroid - pts[-1])
        fr = f(xr)
        n_eval += 1
        if fr < fv[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = f(xe)
            n_eval += 1
            if fe < fr:
                pts[-1], fv[-1] = xe, fe
            else:
                pts[-1], fv[-1] = xr, fr
        elif fr < fv[-2]:
            pts[-1], fv[-1] = xr, fr
        else:
            if fr < fv[-1]:
                xc = centroid + CONTRACT * (xr - centroid)
            else:
                xc = centroid + CONTRACT * (pts[-1] - centroid)
            fc = f(xc)
            n_eval += 1
            if fc < min(fr, fv[-1]):
                pts[-1], fv[-1] = xc, fc
            else:
                pts[1:] = pts[0] + SHRINK * (pts[1:] - pts[0])
                fv[1:] = [f(p) for p in pts[1:]]
                n_eval += len(pts) - 1
        loops += 1
        if on_loop is not None:
            on_loop(loops, float(np.min(fv)))

    theta_opt = spec.params(pts[0])
    with np.errstate(all="ignore"):
        residuals = data.y - spec.curve(data.x, theta_opt.values)
    return FitResult(theta_opt, float(fv[0]), loops, stop, residuals, float(rel), n_eval)
