"""Curve fitting by L1 simplex with per-parameter uncertainty from first derivatives at the optimum."""
from .analysis import FdaoReport, ParamUncertainty, analyze
from .models import BOLTZMANN2, HILL4, Dataset, ParamVector, get_model
from .prng import MT19937
from .simplex import FitResult, SimplexConfig, fit

__all__ = [
    "BOLTZMANN2", "HILL4", "Dataset", "FdaoReport", "FitResult", "MT19937",
    "ParamUncertainty", "ParamVector", "SimplexConfig", "analyze", "fit", "get_model",
]
