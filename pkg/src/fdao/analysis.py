"""First derivatives at the optimum: residuals -> per-parameter fluctuation sets.

For parameter j the fluctuation set is ``dgamma_ji = delta_i / omega_j(x_i)``,
with ``omega_j`` the model's partial derivative at the fitted parameters. The
sets pool every data point; non-finite quotients are dropped and counted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import stats
from .models import Dataset, ModelSpec, ParamVector
from .prng import MT19937
from .simplex import FitResult, SimplexConfig, fit

OMEGA_FLOOR = 1e-300
DEFAULT_ALPHA = 0.02


@dataclass(frozen=True)
class GammaSet:
    param_index: int
    name: str
    values: np.ndarray          # finite dgamma only
    omega: np.ndarray           # per data point
    dgamma: np.ndarray          # per data point, NaN where dropped
    kept_mask: np.ndarray

    @property
    def kept(self) -> int:
        return self.values.size

    @property
    def dropped_nonfinite(self) -> int:
        return self.kept_mask.size - self.values.size


@dataclass(frozen=True)
class ParamUncertainty:
    name: str
    theta_opt: float
    median: float                       # theta_opt + median(dgamma)
    ci95: tuple[float, float]           # Hodges-Lehmann CI, parameter units
    ci95_dgamma: tuple[float, float]    # the same CI in fluctuation units
    range: tuple[float, float]          # parameter units
    hl_point: float                     # theta_opt + pseudo-median of dgamma
    sk: float | None
    kr: float | None
    upsilon: float
    m_kept: int
    dropped: int
    hl_method: str


@dataclass(frozen=True)
class FdaoReport:
    family: str
    theta_opt: ParamVector
    params: list[ParamUncertainty]
    stop_reason: str
    loops: int
    sr: float
    seed: int | None
    alpha: float
    fit: FitResult = field(repr=False)
    gamma: list[GammaSet] = field(repr=False)

    @property
    def flagged(self) -> list[str]:
        return [p.name for p in self.params if p.upsilon > self.alpha]


def gamma_sets(spec: ModelSpec, data: Dataset, fit_result: FitResult) -> list[GammaSet]:
    delta = np.asarray(fit_result.residuals, dtype=float)
    if delta.size != data.m:
        raise ValueError("residuals are not aligned with the dataset")
    with np.errstate(all="ignore"):
        jac = np.atleast_2d(spec.jacobian(data.x, fit_result.theta_opt.values))
        out = []
        for j, name in enumerate(spec.names):
            omega = np.broadcast_to(jac[j], delta.shape).astype(float)
            usable = np.isfinite(omega) & (np.abs(omega) >= OMEGA_FLOOR)
            dg = np.where(usable, delta / np.where(usable, omega, 1.0), np.nan)
            keep = np.isfinite(dg)
            dg[~keep] = np.nan
            out.append(GammaSet(j, name, dg[keep], omega, dg, keep))
    return out


def upsilon(values) -> float:
    """|F(0) - F(median)| for the empirical distribution F of the set, with F(median) = 1/2."""
    x = stats.as_sample(values, 2)
    return abs(stats.ecdf(x, 0.0) - 0.5)


def _maybe(fn, x):
    try:
        return fn(x)
    except stats.StatsError:
        return None


def summarize(gset: GammaSet, theta_j: float, rng: MT19937 | None = None) -> ParamUncertainty:
    if gset.kept < 2:
        raise stats.StatsError(
            f"parameter {gset.name}: only {gset.kept} finite fluctuation values, need 2")
    x = gset.values
    hl = stats.hodges_lehmann(x, rng=rng)
    lo, hi = stats.value_range(x)
    return ParamUncertainty(
        name=gset.name,
        theta_opt=theta_j,
        median=theta_j + float(np.median(x)),
        ci95=(theta_j + hl.ci95[0], theta_j + hl.ci95[1]),
        ci95_dgamma=hl.ci95,
        range=(theta_j + lo, theta_j + hi),
        hl_point=theta_j + hl.point,
        sk=_maybe(stats.skewness, x),
        kr=_maybe(stats.kurtosis, x),
        upsilon=upsilon(x),
        m_kept=gset.kept,
        dropped=gset.dropped_nonfinite,
        hl_method=hl.method,
    )


def report_from_fit(spec: ModelSpec, data: Dataset, fit_result: FitResult,
                    alpha: float = DEFAULT_ALPHA, seed: int | None = None) -> FdaoReport:
    base = MT19937(seed)
    sets = gamma_sets(spec, data, fit_result)
    theta = fit_result.theta_opt.values
    # one derived stream per parameter keeps Walsh subsampling order-independent
    params = [summarize(g, theta[g.param_index], base.spawn(g.param_index + 1)) for g in sets]
    return FdaoReport(spec.family, fit_result.theta_opt, params, fit_result.stop_reason,
                      fit_result.loops, fit_result.sr, base.seed, alpha, fit_result, sets)


def analyze(spec: ModelSpec, data: Dataset, config: SimplexConfig,
            alpha: float = DEFAULT_ALPHA, seed: int | None = None) -> FdaoReport:
    """Fit, build fluctuation sets, and summarize every parameter."""
    return report_from_fit(spec, data, fit(spec, data, config), alpha=alpha, seed=seed)
