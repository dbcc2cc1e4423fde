"""Vector fields and differential forms on the 4-dimensional chart.

Coefficients are any of the exact scalar types (MPoly, RatFn, DeltaScalar).
A k-form stores one coefficient per strictly increasing index tuple, i.e.
``omega = sum_{I increasing} omega_I dz^I``.  Evaluation on vectors carries the
1/k! factor, so ``(dz1^dz2^dz3^dz4)(d1, d2, d3, d4) == 1/24``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import factorial
from typing import Iterable, Sequence

import gmpy2

from .arith import DeltaScalar, MPoly, RatFn, Rational

DIM = 4


def _zero():
    return RatFn.coerce(0)


def _scalar(x):
    if isinstance(x, (RatFn, DeltaScalar)):
        return x
    return RatFn.coerce(x)


def _is_zero(x) -> bool:
    return x.is_zero()


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if an index repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# vector fields


@dataclass(frozen=True, eq=False)
class VField:
    """X = sum_i X^i d_i (+ eta d_u when ``u_component`` is set)."""

    components: tuple
    u_component: MPoly | None = None

    def __post_init__(self):
        comps = tuple(_scalar(c) for c in self.components)
        if len(comps) != DIM:
            raise ValueError("a vector field needs four components")
        object.__setattr__(self, "components", comps)

    @classmethod
    def coordinate(cls, i: int) -> VField:
        return cls(tuple(1 if j == i else 0 for j in range(DIM)))

    @classmethod
    def zero(cls) -> VField:
        return cls((0, 0, 0, 0))

    def __getitem__(self, i: int):
        return self.components[i]

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.components) and (
            self.u_component is None or self.u_component.is_zero()
        )

    def __add__(self, other: VField) -> VField:
        return VField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: VField) -> VField:
        return VField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> VField:
        return VField(tuple(-a for a in self.components))

    def scale(self, s) -> VField:
        return VField(tuple(c * s for c in self.components))

    __rmul__ = scale

    def apply(self, f):
        """Directional derivative X(f) of a scalar function."""
        total = None
        for i, c in enumerate(self.components):
            if _is_zero(c):
                continue
            t = c * f.diff(i)
            total = t if total is None else total + t
        return _zero() if total is None else total

    def is_constant(self) -> bool:
        for c in self.components:
            if isinstance(c, DeltaScalar):
                if c.half_power != 0 and not c.is_zero():
                    return False
                c = c.coeff
            if not c.is_constant():
                return False
        return True

    def equals(self, other: VField) -> bool:
        return all(_is_zero(a - b) for a, b in zip(self.components, other.components))

    def __repr__(self) -> str:
        parts = [f"({c})*d{i + 1}" for i, c in enumerate(self.components) if not _is_zero(c)]
        return "VField(" + (" + ".join(parts) or "0") + ")"


def vf_bracket(x: VField, y: VField) -> VField:
    """Lie bracket [X, Y]^i = X(Y^i) - Y(X^i)."""
    return VField(tuple(x.apply(y[i]) - y.apply(x[i]) for i in range(DIM)))


@dataclass(frozen=True, eq=False)
class LaxOperator:
    """First-order operator constant_part + lambda * lambda_part."""

    constant_part: VField
    lambda_part: VField


def vf_commutator(x: LaxOperator, y: LaxOperator) -> tuple[VField, VField, VField]:
    """Commutator collected by powers of lambda: (lambda^0, lambda^1, lambda^2) slots."""
    a, b = x.constant_part, x.lambda_part
    c, d = y.constant_part, y.lambda_part
    return (
        vf_bracket(a, c),
        vf_bracket(a, d) + vf_bracket(b, c),
        vf_bracket(b, d),
    )


# ---------------------------------------------------------------------------
# differential forms


@dataclass(frozen=True, eq=False)
class KForm:
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= DIM:
            raise ValueError("form degree out of range")
        clean = {}
        for idx, c in self.coeffs.items():
            idx = tuple(idx)
            if len(idx) != self.degree or list(idx) != sorted(set(idx)):
                raise ValueError(f"index {idx} is not strictly increasing of length {self.degree}")
            if any(not 0 <= i < DIM for i in idx):
                raise ValueError(f"index {idx} out of range")
            c = _scalar(c)
            if not _is_zero(c):
                clean[idx] = c
        object.__setattr__(self, "coeffs", clean)

    # -- constructors -----------------------------------------------------
    @classmethod
    def dz(cls, i: int) -> KForm:
        return cls(1, {(i,): 1})

    @classmethod
    def one_form(cls, components: Sequence) -> KForm:
        return cls(1, {(i,): c for i, c in enumerate(components)})

    @classmethod
    def scalar(cls, f) -> KForm:
        return cls(0, {(): f})

    @classmethod
    def zero(cls, degree: int) -> KForm:
        return cls(degree, {})

    @classmethod
    def volume(cls, f=1) -> KForm:
        return cls(4, {(0, 1, 2, 3): f})

    @classmethod
    def from_antisymmetric(cls, comps) -> KForm:
        """2-form from an antisymmetric 4x4 array F with omega = 1/2 F_ij dz^i^dz^j."""
        return cls(2, {(i, j): comps[i][j] for i, j in combinations(range(DIM), 2)})

    # -- access -----------------------------------------------------------
    def __getitem__(self, idx):
        return self.coeffs.get(tuple(idx), _zero())

    def component(self, *idx: int):
        """Antisymmetric component omega_{i j ...} for any index order."""
        s = _perm_sign(idx)
        if s == 0:
            return _zero()
        c = self[tuple(sorted(idx))]
        return c if s > 0 else -c

    def antisymmetric_matrix(self) -> list[list]:
        if self.degree != 2:
            raise ValueError("only for 2-forms")
        return [[self.component(i, j) for j in range(DIM)] for i in range(DIM)]

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs.values())

    def equals(self, other: KForm) -> bool:
        return self.degree == other.degree and (self - other).is_zero()

    def map(self, fn) -> KForm:
        return KForm(self.degree, {k: fn(v) for k, v in self.coeffs.items()})

    # -- linear structure -------------------------------------------------
    def __add__(self, other: KForm) -> KForm:
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return KForm(self.degree, out)

    def __neg__(self) -> KForm:
        return KForm(self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: KForm) -> KForm:
        return self + (-other)

    def scale(self, s) -> KForm:
        return KForm(self.degree, {k: v * s for k, v in self.coeffs.items()})

    def __mul__(self, s):
        if isinstance(s, KForm):
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, s):
        return self.scale(s)

    def __xor__(self, other: KForm) -> KForm:
        return wedge(self, other)

    def __repr__(self) -> str:
        parts = []
        for idx, c in sorted(self.coeffs.items()):
            basis = "^".join(f"dz{i + 1}" for i in idx) or "1"
            parts.append(f"({c}) {basis}")
        return f"KForm[{self.degree}](" + (" + ".join(parts) or "0") + ")"


def wedge(a: KForm, b: KForm) -> KForm:
    deg = a.degree + b.degree
    if deg > DIM:
        # no nonzero forms above the top degree
        return KForm.zero(DIM)
    out: dict = {}
    for I, x in a.coeffs.items():
        for J, y in b.coeffs.items():
            s = _perm_sign(I + J)
            if s == 0:
                continue
            key = tuple(sorted(I + J))
            term = x * y if s > 0 else -(x * y)
            out[key] = out[key] + term if key in out else term
    return KForm(deg, out)


def ext_deriv(a: KForm) -> KForm:
    """Exterior derivative; coefficients must support ``diff``."""
    if a.degree == DIM:
        return KForm.zero(DIM)
    out: dict = {}
    for I, c in a.coeffs.items():
        for j in range(DIM):
            if j in I:
                continue
            dc = c.diff(j)
            if _is_zero(dc):
                continue
            s = _perm_sign((j,) + I)
            key = tuple(sorted((j,) + I))
            term = dc if s > 0 else -dc
            out[key] = out[key] + term if key in out else term
    return KForm(a.degree + 1, out)


def evaluate_form(a: KForm, *vectors: VField):
    """omega(v1, ..., vk) with the 1/k! normalisation."""
    k = a.degree
    if len(vectors) != k:
        raise ValueError(f"a {k}-form takes {k} vectors")
    if k == 0:
        return a[()]
    total = None
    for I, c in a.coeffs.items():
        det = None
        for perm in permutations(range(k)):
            s = _perm_sign(perm)
            prod = None
            for row, col in enumerate(perm):
                f = vectors[row][I[col]]
                prod = f if prod is None else prod * f
            prod = prod if s > 0 else -prod
            det = prod if det is None else det + prod
        t = c * det
        total = t if total is None else total + t
    if total is None:
        return _zero()
    return total * gmpy2.mpq(1, factorial(k))


def pair(a: KForm, v: VField):
    if a.degree != 1:
        raise ValueError("pair takes a 1-form")
    return evaluate_form(a, v)


def pair4(a: KForm, v1: VField, v2: VField, v3: VField, v4: VField):
    if a.degree != 4:
        raise ValueError("pair4 takes a 4-form")
    return evaluate_form(a, v1, v2, v3, v4)


def symmetric_product(a: KForm, b: KForm) -> list[list]:
    """Matrix of the symmetric product a*b = (a(x)b + b(x)a)/2 of two 1-forms."""
    ac = [a[(i,)] for i in range(DIM)]
    bc = [b[(i,)] for i in range(DIM)]
    return [[(ac[i] * bc[j] + ac[j] * bc[i]) * gmpy2.mpq(1, 2) for j in range(DIM)] for i in range(DIM)]


def lie_metric_const(g, k: VField) -> list[list[RatFn]]:
    """(L_k g)_{mu nu} = k^a d_a g_{mu nu}, valid only for constant k."""
    if not k.is_constant():
        raise ValueError("lie_metric_const requires a constant vector field")
    comps = g.components if hasattr(g, "components") else g
    kc = []
    for c in k.components:
        if isinstance(c, DeltaScalar):
            c = c.collapse()
        kc.append(c)
    out = []
    for mu in range(DIM):
        row = []
        for nu in range(DIM):
            acc = RatFn.coerce(0)
            for a in range(DIM):
                if not kc[a].is_zero():
                    acc = acc + comps[mu][nu].diff(a) * kc[a]
            row.append(acc)
        out.append(row)
    return out
