"""Exact arithmetic substrate: rationals, sparse polynomials, rational functions."""

from .delta import ChartMismatch, DeltaScalar, HalfPowerParity, delta_scalar_mul
from .mpoly import ArityError, MPoly, mpoly_arith, mpoly_eval, mpoly_partial, parse_mpoly, variables
from .ratfn import RatFn, as_ratfn, ratfn_equal
from .rational import Q, Rational

__all__ = [
    "ArityError",
    "ChartMismatch",
    "DeltaScalar",
    "HalfPowerParity",
    "MPoly",
    "Q",
    "RatFn",
    "Rational",
    "as_ratfn",
    "delta_scalar_mul",
    "mpoly_arith",
    "mpoly_eval",
    "mpoly_partial",
    "parse_mpoly",
    "ratfn_equal",
    "variables",
]
