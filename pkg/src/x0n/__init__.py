"""Exact computation of equations of the modular curves X_0(N).

Generators of the function field are traces of quotients of Weierstrass
p-values; from their q-expansions the package derives a plane model
F_N(X, Y) = 0 and a representation of the modular invariant J.
"""
from .exact import CycNum
from .modcurve import CuspClass, WVector, cusps_gamma0, genus0
from .pipeline import PipelineConfig, PipelineResult, run, verify_against_reference
from .series import LaurentSeries
from .weier import ModFuncExpr, parse_expr

__version__ = "0.1.0"

__all__ = [
    "CycNum",
    "CuspClass",
    "WVector",
    "cusps_gamma0",
    "genus0",
    "LaurentSeries",
    "ModFuncExpr",
    "parse_expr",
    "PipelineConfig",
    "PipelineResult",
    "run",
    "verify_against_reference",
]
