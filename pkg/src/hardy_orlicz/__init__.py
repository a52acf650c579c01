"""Hardy-Orlicz and Bergman-Orlicz numerics for composition operators."""

from .errors import CapacityError, ConvergenceError, DomainError, HardyOrliczError, NumericError
from .measures import BoundarySample, EmpiricalMeasure, luxemburg_norm, modular
from .orlicz import OrliczFunction, catalog, catalog_names, classify_growth
from .symbols import Symbol, boundary_trace, construct, from_spec

__version__ = "0.1.0"

__all__ = [
    "BoundarySample",
    "CapacityError",
    "ConvergenceError",
    "DomainError",
    "EmpiricalMeasure",
    "HardyOrliczError",
    "NumericError",
    "OrliczFunction",
    "Symbol",
    "boundary_trace",
    "catalog",
    "catalog_names",
    "classify_growth",
    "construct",
    "from_spec",
    "luxemburg_norm",
    "modular",
]
