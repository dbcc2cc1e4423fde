"""Rational functions over MPoly without multivariate gcd.

The denominator is kept as a product of powers of monic, nonconstant
polynomial factors; constants are folded into the numerator.  New
denominators are trial-divided by the factors already present, and
numerators are trial-divided by the factors after every operation.  In this
code base every denominator is a power of a few linear forms, so this keeps
operands small without any gcd machinery.

Equality is decided by cross-multiplication and never relies on the
representation being canonical.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import gmpy2

from .mpoly import MPoly
from .rational import Q, Rational


def _split_power(q: MPoly) -> tuple[MPoly, int]:
    """Write q = base**k, recognising powers of linear forms and exact squares."""
    lin = q.linear_root()
    if lin is not None:
        return lin
    k = 1
    while True:
        r = q.sqrt()
        if r is None or r.is_constant():
            return q, k
        q, k = r, 2 * k


def _merge_factor(factors: dict[MPoly, int], q: MPoly, exp: int) -> Rational:
    """Multiply ``factors`` by ``q**exp`` in place; return the constant left over."""
    if q.is_constant():
        return q.constant_value() ** exp
    for f in list(factors):
        while True:
            r = q.divexact(f)
            if r is None:
                break
            factors[f] += exp
            q = r
            if q.is_constant():
                return q.constant_value() ** exp
    lc, m = q.monic()
    const = lc ** exp
    base, k = _split_power(m)
    if k > 1:
        lb, base = base.monic()
        const = const * lb ** (k * exp)  # m = lb^k * base^k
    exp *= k
    # an older factor may be a power (or multiple) of the new base
    for f in list(factors):
        if f == base:
            continue
        r = f.divexact(base)
        if r is not None and not r.is_constant():
            e = factors.pop(f)
            exp_r = e
            factors[base] = factors.get(base, 0) + e
            const = const * _merge_factor(factors, r, exp_r)
        elif r is not None:
            e = factors.pop(f)
            factors[base] = factors.get(base, 0) + e
            const = const * r.constant_value() ** e
    factors[base] = factors.get(base, 0) + exp
    return const


class RatFn:
    __slots__ = ("num", "factors")

    def __init__(self, num, den=None, *, _factors: Mapping[MPoly, int] | None = None):
        if not isinstance(num, MPoly):
            nv = den.nvars if isinstance(den, MPoly) else 4
            num = MPoly.const(num, nv)
        factors: dict[MPoly, int] = dict(_factors) if _factors else {}
        if den is not None:
            if not isinstance(den, MPoly):
                den = MPoly.const(den, num.nvars)
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if den.nvars != num.nvars:
                raise ValueError("numerator and denominator arity differ")
            c = _merge_factor(factors, den, 1)
            num = num.scale(1 / c)
        self.num = num
        self.factors = factors
        self._reduce()

    # -- helpers ----------------------------------------------------------
    @classmethod
    def _raw(cls, num: MPoly, factors: dict[MPoly, int]) -> RatFn:
        obj = cls.__new__(cls)
        obj.num = num
        obj.factors = factors
        obj._reduce()
        return obj

    def _reduce(self) -> None:
        if self.num.is_zero():
            self.factors = {}
            return
        num = self.num
        for f, e in list(self.factors.items()):
            while e > 0:
                r = num.divexact(f)
                if r is None:
                    break
                num = r
                e -= 1
            if e:
                self.factors[f] = e
            else:
                del self.factors[f]
        self.num = num

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def den(self) -> MPoly:
        d = MPoly.const(1, self.nvars)
        for f, e in self.factors.items():
            d = d * f ** e
        return d

    @classmethod
    def coerce(cls, x, nvars: int = 4) -> RatFn:
        if isinstance(x, RatFn):
            return x
        if isinstance(x, MPoly):
            return cls._raw(x, {})
        return cls._raw(MPoly.const(x, nvars), {})

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.factors

    def is_constant(self) -> bool:
        return not self.factors and self.num.is_constant()

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError("rational function is not constant")
        return self.num.constant_value()

    def den_degree_in(self, factor: MPoly) -> int:
        """Exponent of the monic form of ``factor`` in the denominator."""
        _, m = factor.monic()
        return self.factors.get(m, 0)

    # -- arithmetic -------------------------------------------------------
    def _other(self, other) -> RatFn | None:
        if isinstance(other, RatFn):
            return other
        if isinstance(other, MPoly):
            return RatFn._raw(other, {})
        if isinstance(other, (int, Rational)):
            return RatFn._raw(MPoly.const(other, self.nvars), {})
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.factors == o.factors:
            return RatFn._raw(self.num + o.num, dict(self.factors))
        common = dict(self.factors)
        for f, e in o.factors.items():
            if common.get(f, 0) < e:
                common[f] = e
        a = self.num
        for f, e in common.items():
            k = e - self.factors.get(f, 0)
            if k:
                a = a * f ** k
        b = o.num
        for f, e in common.items():
            k = e - o.factors.get(f, 0)
            if k:
                b = b * f ** k
        return RatFn._raw(a + b, common)

    __radd__ = __add__

    def __neg__(self) -> RatFn:
        obj = RatFn.__new__(RatFn)
        obj.num = -self.num
        obj.factors = dict(self.factors)
        return obj

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            if not other:
                return RatFn._raw(MPoly.zero(self.nvars), {})
            obj = RatFn.__new__(RatFn)
            obj.num = self.num.scale(other)
            obj.factors = dict(self.factors)
            return obj
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RatFn._raw(MPoly.zero(self.nvars), {})
        factors = dict(self.factors)
        for f, e in o.factors.items():
            factors[f] = factors.get(f, 0) + e
        return RatFn._raw(self.num * o.num, factors)

    __rmul__ = __mul__

    def inverse(self) -> RatFn:
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        num = self.den
        factors: dict[MPoly, int] = {}
        c = _merge_factor(factors, self.num, 1)
        return RatFn._raw(num.scale(1 / c), factors)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / Q(other))
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> RatFn:
        if n < 0:
            return self.inverse() ** (-n)
        result = RatFn.coerce(1, self.nvars)
        for _ in range(n):
            result = result * self
        return result

    # -- calculus ---------------------------------------------------------
    def diff(self, i: int) -> RatFn:
        """Partial derivative; each denominator factor gains one power."""
        if not self.factors:
            return RatFn._raw(self.num.diff(i), {})
        fs = list(self.factors.items())
        prod_all = MPoly.const(1, self.nvars)
        for f, _ in fs:
            prod_all = prod_all * f
        new_num = self.num.diff(i) * prod_all
        for j, (f, e) in enumerate(fs):
            df = f.diff(i)
            if df.is_zero():
                continue
            others = MPoly.const(e, self.nvars)
            for k, (g, _) in enumerate(fs):
                if k != j:
                    others = others * g
            new_num = new_num - self.num * df * others
        return RatFn._raw(new_num, {f: e + 1 for f, e in fs})

    # -- evaluation -------------------------------------------------------
    def evaluate(self, point: Sequence) -> Rational:
        den = gmpy2.mpq(1)
        for f, e in self.factors.items():
            den *= f.evaluate(point) ** e
        if not den:
            raise ZeroDivisionError("denominator vanishes at this point")
        return self.num.evaluate(point) / den

    def evaluate_float(self, point: Sequence[float]) -> float:
        den = 1.0
        for f, e in self.factors.items():
            den *= f.evaluate_float(point) ** e
        if den == 0.0:
            raise ZeroDivisionError("denominator vanishes at this point")
        return self.num.evaluate_float(point) / den

    def compose(self, subs: Sequence[MPoly]) -> RatFn:
        num = RatFn.coerce(self.num.compose(subs))
        den = RatFn.coerce(self.den.compose(subs))
        return num / den

    # -- comparison -------------------------------------------------------
    def equals(self, other) -> bool:
        o = self._other(other)
        if o is None:
            return False
        return ratfn_equal(self, o)

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ratfn_equal(self, o)

    __hash__ = None

    def to_str(self) -> str:
        num = self.num.to_str()
        if not self.factors:
            return num
        den = " * ".join(
            f"({f.to_str()})" + (f"^{e}" if e > 1 else "")
            for f, e in sorted(self.factors.items(), key=lambda fe: fe[0].to_str())
        )
        return f"({num}) / ({den})"

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"RatFn({self.to_str()!r})"


def ratfn_equal(r1: RatFn, r2: RatFn) -> bool:
    """Exact equality by cross-multiplication: num1*den2 == num2*den1."""
    return (r1.num * r2.den - r2.num * r1.den).is_zero()


def as_ratfn(x, nvars: int = 4) -> RatFn:
    return RatFn.coerce(x, nvars)
