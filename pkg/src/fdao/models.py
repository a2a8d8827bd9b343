"""Modified Hill and Boltzmann regression functions with analytic derivatives.

Every curve function takes ``x`` as a scalar or array and the parameters as a
plain sequence in model order, so the optimizer can call them on raw vertices.
Invalid vertices (e.g. ``Km <= 0``) produce NaN rather than raising.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit


class ModelError(ValueError):
    """Bad model family, parameter arity or parameter value."""


class DomainError(ValueError):
    """An independent-variable value outside the model's domain."""


@dataclass(frozen=True)
class ParamVector:
    names: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.names) < 1 or len(self.names) != len(self.values):
            raise ModelError("ParamVector needs k >= 1 names and as many values")
        if len(set(self.names)) != len(self.names):
            raise ModelError(f"duplicate parameter names in {self.names}")
        if not all(np.isfinite(self.values)):
            raise ModelError(f"non-finite parameter value in {dict(zip(self.names, self.values))}")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def as_array(self) -> np.ndarray:
        return np.array(self.values)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


@dataclass(frozen=True)
class HillParams:
    y0: float
    ym: float
    Km: float
    n: float

    def __post_init__(self):
        if not all(np.isfinite([self.y0, self.ym, self.Km, self.n])):
            raise ModelError("Hill parameters must be finite")
        if self.Km <= 0:
            raise ModelError(f"Km must be positive, got {self.Km}")

    def as_array(self) -> np.ndarray:
        return np.array([self.y0, self.ym, self.Km, self.n])


@dataclass(frozen=True)
class BoltzmannParams:
    vhalf: float
    kappa: float

    def __post_init__(self):
        if not all(np.isfinite([self.vhalf, self.kappa])):
            raise ModelError("Boltzmann parameters must be finite")
        if self.kappa == 0:
            raise ModelError("kappa must be nonzero")

    def as_array(self) -> np.ndarray:
        return np.array([self.vhalf, self.kappa])


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError(f"x and y lengths differ ({x.size} vs {y.size})")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.x.size

    @classmethod
    def from_pairs(cls, pairs) -> "Dataset":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])


# Hill

def _hill_log_zeta(d, Km, n):
    # log((Km/d)^n) without forming the power; exactly 0 when d == Km
    with np.errstate(invalid="ignore", divide="ignore"):
        return n * (np.log(Km) - np.log(d))


def hill_curve(d, theta: Sequence[float]):
    y0, ym, Km, n = theta
    t = _hill_log_zeta(np.asarray(d, dtype=float), Km, n)
    return y0 + ym * expit(-t)


def hill_jacobian(d, theta: Sequence[float]) -> np.ndarray:
    """Rows are (d/dy0, d/dym, d/dKm, d/dn) evaluated at each ``d``."""
    y0, ym, Km, n = theta
    d = np.asarray(d, dtype=float)
    t = _hill_log_zeta(d, Km, n)
    s = expit(-t)            # 1/(1+zeta)
    mho = s * expit(t)       # zeta/(1+zeta)^2
    with np.errstate(invalid="ignore", divide="ignore"):
        d_km = -mho * n * ym / Km
        d_n = -mho * ym * t / n
    return np.stack(np.broadcast_arrays(np.ones_like(s), s, d_km, d_n))


def _check_conc(d):
    if np.any(np.asarray(d) <= 0):
        raise DomainError("Hill concentration must be > 0")


def hill_eval(d, p: HillParams):
    _check_conc(d)
    return hill_curve(d, p.as_array())


def hill_grad(d, p: HillParams) -> np.ndarray:
    _check_conc(d)
    return hill_jacobian(d, p.as_array())


def hill_hessian(d: float, p: HillParams) -> np.ndarray:
    """4x4 matrix of second partials in (y0, ym, Km, n) order."""
    _check_conc(d)
    ym, Km, n = p.ym, p.Km, p.n
    t = float(_hill_log_zeta(d, Km, n))
    s = float(expit(-t))
    mho = s * float(expit(t))
    tanh_term = 1.0 - 2.0 * s   # (zeta - 1)/(zeta + 1)
    h = np.zeros((4, 4))
    h[1, 2] = h[2, 1] = -mho * n / Km
    h[1, 3] = h[3, 1] = -mho * t / n
    h[2, 2] = mho * n * ym / Km**2 * (1.0 + n * tanh_term)
    h[2, 3] = h[3, 2] = -mho * ym / Km * (1.0 - tanh_term * t)
    h[3, 3] = mho * ym * t * t * tanh_term / n**2
    return h


# Boltzmann

def boltzmann_curve(v, theta: Sequence[float]):
    vhalf, kappa = theta
    with np.errstate(invalid="ignore", divide="ignore"):
        return expit((np.asarray(v, dtype=float) - vhalf) / kappa)


def boltzmann_jacobian(v, theta: Sequence[float]) -> np.ndarray:
    vhalf, kappa = theta
    nu = np.asarray(v, dtype=float) - vhalf
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        d_vhalf = -1.0 / (2.0 * kappa * np.cosh(nu / kappa) + 2.0 * kappa)
        d_kappa = -nu / np.cosh(nu / (2.0 * kappa)) ** 2 / (4.0 * kappa**2)
    return np.stack(np.broadcast_arrays(d_vhalf, d_kappa))


def boltzmann_eval(v, p: BoltzmannParams):
    return boltzmann_curve(v, p.as_array())


def boltzmann_grad(v, p: BoltzmannParams) -> np.ndarray:
    return boltzmann_jacobian(v, p.as_array())


def boltzmann_param_gradient_sum(v, p: BoltzmannParams):
    nu = np.asarray(v, dtype=float) - p.vhalf
    k = p.kappa
    with np.errstate(over="ignore"):
        return -(k + nu) / np.cosh(nu / (2.0 * k)) ** 2 / (4.0 * k**2)


# uniform dispatch

@dataclass(frozen=True)
class ModelSpec:
    family: str
    names: tuple[str, ...]
    curve: Callable = field(repr=False)
    jacobian: Callable = field(repr=False)
    admissible: Callable = field(repr=False)
    x_label: str = "x"

    @property
    def arity(self) -> int:
        return len(self.names)

    def params(self, values) -> ParamVector:
        return ParamVector(self.names, values)

    def check_theta(self, theta: ParamVector) -> None:
        if tuple(theta.names) != self.names:
            raise ModelError(f"{self.family} expects parameters {self.names}, got {theta.names}")

    def check_x(self, x) -> None:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        bad = np.flatnonzero(~self.admissible(x))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"{self.family}: {self.x_label} = {float(x[i])!r} at data row {i + 1} is not admissible")


HILL4 = ModelSpec(
    "hill4", ("y0", "ym", "Km", "n"), hill_curve, hill_jacobian,
    lambda x: np.isfinite(x) & (x > 0), x_label="concentration",
)
BOLTZMANN2 = ModelSpec(
    "boltzmann2", ("Vhalf", "kappa"), boltzmann_curve, boltzmann_jacobian,
    np.isfinite, x_label="potential",
)
MODELS = {spec.family: spec for spec in (HILL4, BOLTZMANN2)}


def get_model(family: str) -> ModelSpec:
    try:
        return MODELS[family]
    except KeyError:
        raise ModelError(f"unknown model family {family!r}; expected one of {sorted(MODELS)}") from None


def model_eval(spec: ModelSpec, x, theta: ParamVector):
    spec.check_theta(theta)
    spec.check_x(x)
    return spec.curve(x, theta.values)


def model_grad(spec: ModelSpec, x, theta: ParamVector) -> np.ndarray:
    """Shape ``(k,)`` for scalar ``x``, ``(k, m)`` for an array of m points."""
    spec.check_theta(theta)
    spec.check_x(x)
    return spec.jacobian(x, theta.values)
