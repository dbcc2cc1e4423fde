"""Sparse multivariate polynomials with exact rational coefficients.

Exponent vectors are dense, fixed length (arity) and packed into one Python
int, 16 bits per variable, first variable in the most significant field.
Packing turns monomial multiplication into integer addition and makes the
integer order of keys coincide with lexicographic order z1 > z2 > ... .

Variables are addressed 0-based: index 0 is z1, index 3 is z4 and, for arity
5, index 4 is the dependent variable u.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Sequence

import gmpy2

from .rational import Q, Rational, fmt, sqrt_exact

BITS = 16
FIELD = (1 << BITS) - 1
VAR_NAMES = ("z1", "z2", "z3", "z4", "u")


class ArityError(ValueError):
    pass


def _shift(nvars: int, i: int) -> int:
    return BITS * (nvars - 1 - i)


def pack(exps: Sequence[int]) -> int:
    key = 0
    for e in exps:
        if e < 0 or e > FIELD:
            raise ValueError(f"exponent {e} out of range")
        key = (key << BITS) | e
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = key & FIELD
        key >>= BITS
    return tuple(out)


def var_name(i: int, nvars: int) -> str:
    if nvars <= len(VAR_NAMES):
        return VAR_NAMES[i]
    return f"x{i + 1}"


class MPoly:
    """Immutable sparse polynomial.

    ``terms`` maps packed exponent keys to nonzero ``mpq`` coefficients.  Build
    instances through the classmethods; the raw constructor trusts its input.
    """

    __slots__ = ("nvars", "terms", "_hash", "_deg")

    def __init__(self, terms: dict[int, Rational], nvars: int):
        self.nvars = nvars
        self.terms = terms
        self._hash = None
        self._deg = None

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int = 4) -> MPoly:
        return cls({}, nvars)

    @classmethod
    def const(cls, value, nvars: int = 4) -> MPoly:
        value = Q(value)
        return cls({0: value} if value else {}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int = 4) -> MPoly:
        if not 0 <= i < nvars:
            raise ArityError(f"variable index {i} invalid for arity {nvars}")
        return cls({1 << _shift(nvars, i): gmpy2.mpq(1)}, nvars)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> MPoly:
        coeff = Q(coeff)
        return cls({pack(exps): coeff} if coeff else {}, len(exps))

    @classmethod
    def from_dict(cls, data: Mapping[Sequence[int], object], nvars: int | None = None) -> MPoly:
        terms: dict[int, Rational] = {}
        for exps, c in data.items():
            if nvars is None:
                nvars = len(exps)
            elif len(exps) != nvars:
                raise ArityError("exponent vectors must share one arity")
            k = pack(exps)
            v = terms.get(k, 0) + Q(c)
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
        return cls(terms, 4 if nvars is None else nvars)

    @classmethod
    def parse(cls, text: str, nvars: int = 4) -> MPoly:
        return parse_mpoly(text, nvars)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], Rational]]:
        for k in sorted(self.terms, reverse=True):
            yield unpack(k, self.nvars), self.terms[k]

    def coeff(self, exps: Sequence[int]) -> Rational:
        return self.terms.get(pack(exps), gmpy2.mpq(0))

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(0, gmpy2.mpq(0))

    def total_degree(self) -> int:
        if self._deg is None:
            if not self.terms:
                self._deg = -1
            else:
                self._deg = max(sum(unpack(k, self.nvars)) for k in self.terms)
        return self._deg

    def degree(self, i: int) -> int:
        if not self.terms:
            return -1
        s = _shift(self.nvars, i)
        return max((k >> s) & FIELD for k in self.terms)

    def depends_on(self, i: int) -> bool:
        return self.degree(i) > 0

    def variables(self) -> set[int]:
        return {i for i in range(self.nvars) if self.depends_on(i)}

    def leading_term(self) -> tuple[int, Rational]:
        k = max(self.terms)
        return k, self.terms[k]

    def leading_coeff(self) -> Rational:
        return self.terms[max(self.terms)]

    # -- comparison -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.is_constant() and self.terms.get(0, 0) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> MPoly:
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise ArityError(f"arity mismatch: {self.nvars} vs {other.nvars}")
            return other
        return MPoly.const(other, self.nvars)

    def __add__(self, other):
        if not isinstance(other, (MPoly, int, Rational)):
            return NotImplemented
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        res = dict(big)
        for k, c in small.items():
            v = res.get(k)
            if v is None:
                res[k] = c
            else:
                v = v + c
                if v:
                    res[k] = v
                else:
                    del res[k]
        return MPoly(res, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly({k: -c for k, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        if not isinstance(other, (MPoly, int, Rational)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> MPoly:
        c = Q(c)
        if not c:
            return MPoly({}, self.nvars)
        return MPoly({k: v * c for k, v in self.terms.items()}, self.nvars)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return MPoly({}, self.nvars)
        if self.total_degree() + other.total_degree() > FIELD:
            raise OverflowError("degree exceeds packed exponent capacity")
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            return MPoly({ka + kb: ca * cb for ka, ca in a.items()}, self.nvars)
        res: dict[int, Rational] = {}
        get = res.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                res[k] = get(k, 0) + ca * cb
        return MPoly({k: v for k, v in res.items() if v}, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> MPoly:
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.const(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(1 / Q(other))
        if isinstance(other, MPoly) and other.is_constant() and other:
            return self.scale(1 / other.constant_value())
        return NotImplemented

    # -- calculus ---------------------------------------------------------
    def diff(self, i: int) -> MPoly:
        """Formal partial derivative with respect to variable ``i`` (0-based)."""
        if not 0 <= i < self.nvars:
            raise ArityError(f"variable index {i} invalid for arity {self.nvars}")
        s = _shift(self.nvars, i)
        unit = 1 << s
        res = {}
        for k, c in self.terms.items():
            e = (k >> s) & FIELD
            if e:
                res[k - unit] = c * e
        return MPoly(res, self.nvars)

    def diff_multi(self, *indices: int) -> MPoly:
        p = self
        for i in indices:
            p = p.diff(i)
        return p

    # -- evaluation and substitution -------------------------------------
    def evaluate(self, point: Sequence) -> Rational:
        if len(point) != self.nvars:
            raise ArityError(f"point has {len(point)} coordinates, arity is {self.nvars}")
        pt = [Q(x) for x in point]
        return self._eval(pt, gmpy2.mpq(0))

    def evaluate_float(self, point: Sequence[float]) -> float:
        if len(point) != self.nvars:
            raise ArityError(f"point has {len(point)} coordinates, arity is {self.nvars}")
        return float(self._eval([float(x) for x in point], 0.0))

    def _eval(self, pt, zero):
        n = self.nvars
        total = zero
        for k, c in self.terms.items():
            term = c if not isinstance(zero, float) else float(c)
            for i in range(n - 1, -1, -1):
                e = k & FIELD
                k >>= BITS
                if e:
                    term = term * pt[i] ** e
            total = total + term
        return total

    __call__ = evaluate

    def compose(self, subs: Sequence[MPoly]) -> MPoly:
        """Substitute polynomial ``subs[i]`` for variable ``i``.

        The result lives in the arity of the substituted polynomials.
        """
        if len(subs) != self.nvars:
            raise ArityError("need one substitution per variable")
        target = subs[0].nvars
        if any(s.nvars != target for s in subs):
            raise ArityError("substitutions must share an arity")
        cache: list[dict[int, MPoly]] = [{0: MPoly.const(1, target)} for _ in subs]

        def power(i, e):
            tbl = cache[i]
            if e not in tbl:
                tbl[e] = power(i, e - 1) * subs[i]
            return tbl[e]

        acc: dict[int, Rational] = {}
        for exps, c in self.items():
            term = MPoly.const(c, target)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            for k, v in term.terms.items():
                acc[k] = acc.get(k, 0) + v
        return MPoly({k: v for k, v in acc.items() if v}, target)

    def extend(self, nvars: int) -> MPoly:
        """Embed into a larger arity by appending unused variables."""
        if nvars < self.nvars:
            raise ArityError("cannot shrink arity with extend")
        shift = BITS * (nvars - self.nvars)
        return MPoly({k << shift: c for k, c in self.terms.items()}, nvars)

    def restrict(self, nvars: int) -> MPoly:
        """Drop trailing variables, which must not occur."""
        if any(self.depends_on(i) for i in range(nvars, self.nvars)):
            raise ArityError("polynomial depends on a dropped variable")
        shift = BITS * (self.nvars - nvars)
        return MPoly({k >> shift: c for k, c in self.terms.items()}, nvars)

    # -- exact division ---------------------------------------------------
    def _divides_key(self, small: int, big: int) -> bool:
        for _ in range(self.nvars):
            if (small & FIELD) > (big & FIELD):
                return False
            small >>= BITS
            big >>= BITS
        return True

    def divexact(self, other: MPoly) -> MPoly | None:
        """Return ``self / other`` if the division is exact, else None."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self.terms:
            return self
        lk, lc = other.leading_term()
        if len(other.terms) == 1:
            if not all(self._divides_key(lk, k) for k in self.terms):
                return None
            inv = 1 / lc
            return MPoly({k - lk: c * inv for k, c in self.terms.items()}, self.nvars)
        rem = dict(self.terms)
        quot: dict[int, Rational] = {}
        inv = 1 / lc
        others = [(k - lk, c) for k, c in other.terms.items() if k != lk]
        while rem:
            k = max(rem)
            if not self._divides_key(lk, k):
                return None
            t = k - lk
            tc = rem.pop(k) * inv
            quot[t] = tc
            for dk, c in others:
                kk = t + lk + dk
                v = rem.get(kk, 0) - tc * c
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        return MPoly(quot, self.nvars)

    def sqrt(self) -> MPoly | None:
        """Exact polynomial square root (sign fixed by a positive leading coefficient)."""
        if not self.terms:
            return self
        lk, lc = self.leading_term()
        exps = unpack(lk, self.nvars)
        if any(e % 2 for e in exps):
            return None
        rc = sqrt_exact(lc)
        if rc is None:
            return None
        root = MPoly({pack([e // 2 for e in exps]): rc}, self.nvars)
        lead_root = root.terms
        rk = max(lead_root)
        bound = 1
        for i in range(self.nvars):
            bound *= self.degree(i) // 2 + 1
        for _ in range(bound + 1):
            rem = self - root * root
            if not rem.terms:
                return root
            k, c = rem.leading_term()
            if not self._divides_key(rk, k):
                return None
            root = root + MPoly({k - rk: c / (2 * rc)}, self.nvars)
        return None

    def linear_root(self) -> tuple[MPoly, int] | None:
        """(L, n) with self == L**n for an affine-linear L and n >= 2, else None."""
        n = self.total_degree()
        if n < 2:
            return None
        lead = next((i for i in range(self.nvars) if self.degree(i) == n), None)
        if lead is None:
            return None
        top = [0] * self.nvars
        top[lead] = n
        lc = self.coeff(top)
        terms = {}
        for j in range(self.nvars):
            e = [0] * self.nvars
            e[lead] = n - 1
            if j != lead:
                e[j] += 1
                c = self.coeff(e)
                if c:
                    terms[tuple(1 if k == j else 0 for k in range(self.nvars))] = c / (n * lc)
        e = [0] * self.nvars
        e[lead] = n - 1
        c0 = self.coeff(e)
        if c0:
            terms[(0,) * self.nvars] = c0 / (n * lc)
        terms[tuple(1 if k == lead else 0 for k in range(self.nvars))] = gmpy2.mpq(1)
        L = MPoly.from_dict(terms, self.nvars)
        if (L ** n).scale(lc) != self:
            return None
        return L, n

    # -- normalisation ----------------------------------------------------
    def monic(self) -> tuple[Rational, MPoly]:
        """Return (leading coefficient, self / leading coefficient)."""
        lc = self.leading_coeff()
        return lc, self.scale(1 / lc)

    def content(self) -> Rational:
        """Positive rational gcd of the coefficients."""
        if not self.terms:
            return gmpy2.mpq(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gmpy2.gcd(num, c.numerator)
            den = gmpy2.lcm(den, c.denominator)
        return gmpy2.mpq(num, den)

    # -- text -------------------------------------------------------------
    def to_str(self) -> str:
        """Sparse text form ``coef*z1^i z2^j + ...``."""
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = " ".join(
                var_name(i, self.nvars) + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e
            )
            mag = fmt(abs(c))
            if mono:
                body = mono if mag == "1" else f"{mag}*{mono}"
            else:
                body = mag
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"MPoly({self.to_str()!r}, nvars={self.nvars})"


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")
_FACTOR = re.compile(r"^([A-Za-z]\w*)(?:\^(\d+))?$")


def parse_mpoly(text: str, nvars: int = 4) -> MPoly:
    """Parse a sum of monomials, e.g. ``"3/2*z1^2 z4 - z2*z3 + 5"``.

    Factors inside a monomial are separated by ``*`` or whitespace.  Only
    expanded input is accepted; there are no parentheses.
    """
    names = {var_name(i, nvars): i for i in range(nvars)}
    src = text.strip()
    if not src:
        raise ValueError("empty polynomial")
    pieces = []
    cur = ""
    sign = 1
    for ch in src:
        if ch in "+-":
            prev = cur.rstrip()
            if not prev:
                sign = -sign if ch == "-" else sign
                continue
            if prev[-1] not in "^*/":
                pieces.append((sign, cur))
                cur = ""
                sign = -1 if ch == "-" else 1
                continue
        cur += ch
    if not cur.strip():
        raise ValueError(f"dangling sign in {text!r}")
    pieces.append((sign, cur))
    result = MPoly.zero(nvars)
    for sgn, body in pieces:
        coeff = Q(1)
        exps = [0] * nvars
        for fac in re.split(r"[\s*]+", body.strip()):
            if not fac:
                continue
            m = _FACTOR.match(fac)
            if m and m.group(1) in names:
                exps[names[m.group(1)]] += int(m.group(2) or 1)
            else:
                coeff *= Q(fac)
        result = result + MPoly.monomial(exps, sgn * coeff)
    return result


def variables(nvars: int = 4) -> tuple[MPoly, ...]:
    return tuple(MPoly.var(i, nvars) for i in range(nvars))


def mpoly_arith(p: MPoly, q: MPoly, op: str) -> MPoly:
    if p.nvars != q.nvars:
        raise ArityError(f"arity mismatch: {p.nvars} vs {q.nvars}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def mpoly_partial(p: MPoly, i: int) -> MPoly:
    return p.diff(i)


def mpoly_eval(p: MPoly, point: Iterable) -> Rational:
    return p.evaluate(list(point))
