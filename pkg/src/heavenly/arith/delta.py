"""Scalars of the form coeff * |Delta|^(k/2) on a fixed chart.

On the chart with sign s = sign(Delta) the absolute value is |Delta| = s*Delta,
so an even half-power collapses to an ordinary rational function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .mpoly import MPoly
from .ratfn import RatFn
from .rational import Rational


class ChartMismatch(ValueError):
    pass


class HalfPowerParity(ValueError):
    pass


def _abs_delta_power(delta: RatFn, sign: int, m: int) -> RatFn:
    """(s*Delta)**m for integer m."""
    base = delta * sign
    if m >= 0:
        return base ** m
    return base.inverse() ** (-m)


@dataclass(frozen=True, eq=False)
class DeltaScalar:
    coeff: RatFn
    half_power: int
    sign: int
    delta: RatFn

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("chart sign must be +1 or -1")
        if not isinstance(self.coeff, RatFn):
            object.__setattr__(self, "coeff", RatFn.coerce(self.coeff, self.delta.nvars))

    @classmethod
    def of(cls, coeff, half_power: int, sign: int, delta) -> DeltaScalar:
        return cls(RatFn.coerce(coeff), half_power, sign, RatFn.coerce(delta))

    # -- structure --------------------------------------------------------
    def _check(self, other: DeltaScalar) -> None:
        if other.sign != self.sign:
            raise ChartMismatch("scalars live on different charts")

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def is_collapsible(self) -> bool:
        return self.half_power % 2 == 0

    def collapse(self) -> RatFn:
        """The pure rational function coeff * (s*Delta)^(k/2); k must be even."""
        if self.coeff.is_zero() or self.half_power == 0:
            return self.coeff
        if self.half_power % 2:
            raise HalfPowerParity("odd half-power does not collapse to a rational function")
        return self.coeff * _abs_delta_power(self.delta, self.sign, self.half_power // 2)

    def normalized(self) -> DeltaScalar:
        if self.half_power and self.half_power % 2 == 0:
            return DeltaScalar(self.collapse(), 0, self.sign, self.delta)
        return self

    def at_half_power(self, k: int) -> DeltaScalar:
        """Re-express with half-power ``k`` (same parity)."""
        diff = self.half_power - k
        if diff % 2:
            raise HalfPowerParity("half-powers of different parity cannot be aligned")
        if diff == 0:
            return self
        return DeltaScalar(
            self.coeff * _abs_delta_power(self.delta, self.sign, diff // 2), k, self.sign, self.delta
        )

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other) -> DeltaScalar | None:
        if isinstance(other, DeltaScalar):
            self._check(other)
            return other
        if isinstance(other, (RatFn, MPoly, int, Rational)):
            return DeltaScalar(RatFn.coerce(other, self.delta.nvars), 0, self.sign, self.delta)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        k = min(self.half_power, o.half_power)
        a = self.at_half_power(k)
        b = o.at_half_power(k)
        return DeltaScalar(a.coeff + b.coeff, k, self.sign, self.delta)

    __radd__ = __add__

    def __neg__(self) -> DeltaScalar:
        return DeltaScalar(-self.coeff, self.half_power, self.sign, self.delta)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = DeltaScalar(self.coeff * o.coeff, self.half_power + o.half_power, self.sign, self.delta)
        return out.normalized()

    __rmul__ = __mul__

    def diff(self, i: int) -> DeltaScalar:
        """d(c |D|^(k/2)) = |D|^(k/2) (dc + (k/2) c dD / D), since s/|D| = 1/D."""
        dc = self.coeff.diff(i)
        if self.half_power:
            extra = self.coeff * self.delta.diff(i) / self.delta
            dc = dc + extra * Rational(self.half_power) / 2
        return DeltaScalar(dc, self.half_power, self.sign, self.delta)

    def evaluate_float(self, point: Sequence[float]) -> float:
        d = self.delta.evaluate_float(point)
        if d == 0 or (d > 0) != (self.sign > 0):
            raise ChartMismatch(f"point has Delta={d}, outside the chart s={self.sign}")
        return self.coeff.evaluate_float(point) * abs(d) ** (self.half_power / 2)

    def __repr__(self) -> str:
        return f"DeltaScalar({self.coeff.to_str()!r}, k={self.half_power}, s={self.sign})"


def delta_scalar_mul(s1: DeltaScalar, s2: DeltaScalar, delta: RatFn | None = None) -> DeltaScalar:
    if s1.sign != s2.sign:
        raise ChartMismatch("scalars live on different charts")
    if delta is not None and not (s1.delta.equals(delta) and s2.delta.equals(delta)):
        raise ChartMismatch("scalars refer to a different Delta")
    return s1 * s2
