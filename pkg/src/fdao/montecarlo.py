"""Synthetic Hill/Boltzmann datasets with Cauchy or Gaussian noise, and experiment runs.

Noise is drawn from one MT19937 stream in grid-major order: all ``r``
replicates of the first grid value, then the next grid value, and so on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config as cfg
from .analysis import DEFAULT_ALPHA, FdaoReport, analyze
from .models import BOLTZMANN2, HILL4, Dataset, ModelSpec, ParamVector, get_model
from .prng import MT19937, CauchyParams
from .simplex import SimplexConfig

HILL_GRID = (0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0)
BOLTZMANN_GRID = (-100.0, -80.0, -60.0, -40.0, -20.0, 0.0, 20.0, 40.0, 50.0, 80.0, 100.0)
DEFAULT_GRIDS = {"hill4": HILL_GRID, "boltzmann2": BOLTZMANN_GRID}
HILL_GAMMA = 1 / 50
BOLTZMANN_GAMMA = 2 / 50
DEFAULT_PHI = 0.05


@dataclass(frozen=True)
class Noise:
    kind: str           # "cauchy" or "gaussian"
    amplitude: float    # Cauchy scale gamma, or Gaussian factor phi

    def __post_init__(self):
        if self.kind not in ("cauchy", "gaussian"):
            raise ValueError(f"noise must be cauchy or gaussian, got {self.kind!r}")
        if not self.amplitude >= 0:
            raise ValueError("noise amplitude must be >= 0")

    def draw(self, rng: MT19937, size: int) -> np.ndarray:
        if self.amplitude == 0:
            return np.zeros(size)
        if self.kind == "cauchy":
            return self.amplitude * rng.cauchy_array(size, CauchyParams(0.0, 1.0))
        return self.amplitude * rng.gaussian_array(size)


@dataclass(frozen=True)
class ExperimentPlan:
    family: str
    true_params: ParamVector
    noise: Noise
    x_grid: tuple[float, ...]
    replicates: int
    fit_config: SimplexConfig
    seed: int | None = None
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        spec = get_model(self.family)
        spec.check_theta(self.true_params)
        spec.check_theta(self.fit_config.theta_init)
        spec.check_x(np.asarray(self.x_grid, dtype=float))
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ValueError(f"replicates r must be an integer >= 1, got {self.replicates}")

    @property
    def spec(self) -> ModelSpec:
        return get_model(self.family)


@dataclass(frozen=True)
class ParamRow:
    name: str
    simulated: float
    predicted: float
    ci95: tuple[float, float]
    range: tuple[float, float]
    sk: float | None
    kr: float | None
    upsilon: float
    m_kept: int
    dropped: int


@dataclass(frozen=True)
class ExperimentRow:
    family: str
    noise: str
    replicates: int
    params: list[ParamRow]
    loops: int
    stop_reason: str
    seed: int
    report: FdaoReport

    def __getitem__(self, name: str) -> ParamRow:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)


def _generate(spec: ModelSpec, plan: ExperimentPlan, rng: MT19937) -> Dataset:
    x = np.repeat(np.asarray(plan.x_grid, dtype=float), plan.replicates)
    clean = spec.curve(x, plan.true_params.values)
    return Dataset(x, clean + plan.noise.draw(rng, x.size))


def _require(plan: ExperimentPlan, family: str, noise: str) -> None:
    if plan.family != family or plan.noise.kind != noise:
        raise ValueError(f"plan is {plan.family}/{plan.noise.kind}, expected {family}/{noise}")


def gen_hill_cauchy(plan: ExperimentPlan, rng: MT19937) -> Dataset:
    _require(plan, "hill4", "cauchy")
    return _generate(HILL4, plan, rng)


def gen_hill_gauss(plan: ExperimentPlan, rng: MT19937) -> Dataset:
    _require(plan, "hill4", "gaussian")
    return _generate(HILL4, plan, rng)


def gen_boltzmann_gauss(plan: ExperimentPlan, rng: MT19937) -> Dataset:
    _require(plan, "boltzmann2", "gaussian")
    return _generate(BOLTZMANN2, plan, rng)


def gen_boltzmann_cauchy(plan: ExperimentPlan, rng: MT19937) -> Dataset:
    _require(plan, "boltzmann2", "cauchy")
    return _generate(BOLTZMANN2, plan, rng)


GENERATORS = {
    ("hill4", "cauchy"): gen_hill_cauchy,
    ("hill4", "gaussian"): gen_hill_gauss,
    ("boltzmann2", "gaussian"): gen_boltzmann_gauss,
    ("boltzmann2", "cauchy"): gen_boltzmann_cauchy,
}


def generate(plan: ExperimentPlan, rng: MT19937) -> Dataset:
    return GENERATORS[plan.family, plan.noise.kind](plan, rng)


def run_experiment(plan: ExperimentPlan) -> ExperimentRow:
    """Generate, fit and summarize one plan.

    The data stream uses the plan seed directly; Walsh subsampling uses streams
    derived from it, so summaries never perturb the simulated data.
    """
    rng = MT19937(plan.seed)
    data = generate(plan, rng)
    report = analyze(plan.spec, data, plan.fit_config, alpha=plan.alpha, seed=rng.seed)
    rows = [
        ParamRow(p.name, plan.true_params[p.name], p.median, p.ci95, p.range,
                 p.sk, p.kr, p.upsilon, p.m_kept, p.dropped)
        for p in report.params
    ]
    return ExperimentRow(plan.family, plan.noise.kind, plan.replicates, rows,
                         report.loops, report.stop_reason, rng.seed, report)


def plan_from_kv(kv: dict[str, str]) -> ExperimentPlan:
    """Build a plan from parsed ``key = value`` pairs (see README for the keys)."""
    family = kv.get("family") or kv.get("model")
    if family is None:
        raise cfg.ConfigError("missing required key 'family'")
    try:
        spec = get_model(family)
    except ValueError as exc:
        raise cfg.ConfigError(str(exc)) from None
    kind = kv.get("noise")
    if kind == "cauchy":
        default = HILL_GAMMA if family == "hill4" else BOLTZMANN_GAMMA
        noise = Noise("cauchy", cfg.get_float(kv, "gamma", default))
    elif kind == "gaussian":
        noise = Noise("gaussian", cfg.get_float(kv, "phi", DEFAULT_PHI))
    else:
        raise cfg.ConfigError(f"key 'noise' must be cauchy or gaussian, got {kind!r}")
    grid = tuple(cfg.get_list(kv, "grid")) if "grid" in kv else DEFAULT_GRIDS[family]
    seed = cfg.get_int(kv, "seed") if "seed" in kv else None
    try:
        fit_config = SimplexConfig(
            spec.params(cfg.get_params(kv, "theta_init", spec.names)),
            delta_init=cfg.get_float(kv, "delta_init", 0.1),
            epsilon_stop=cfg.get_float(kv, "epsilon_stop", 1e-8),
            loop_cap=cfg.get_int(kv, "loop_cap", 1_024_000),
        )
        return ExperimentPlan(
            family, spec.params(cfg.get_params(kv, "theta_true", spec.names)), noise, grid,
            cfg.get_int(kv, "r"), fit_config, seed, cfg.get_float(kv, "alpha", DEFAULT_ALPHA),
        )
    except cfg.ConfigError:
        raise
    except ValueError as exc:
        raise cfg.ConfigError(str(exc)) from None
