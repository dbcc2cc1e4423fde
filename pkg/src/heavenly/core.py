"""Asymmetric heavenly equation: residual, Lax pair, null tetrad, coframe,
metric, diagonal forms and signature.

Index convention: 0-based, so ``jet.d(0, 3)`` is u_14 and ``dz(1)`` is dz^2.
The chart sign ``s`` is +1 on Delta > 0 and -1 on Delta < 0; there
|Delta| = s*Delta, so every even power of sqrt|Delta| is a rational function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import gmpy2

from .arith import DeltaScalar, MPoly, Q, RatFn, Rational
from .arith.delta import ChartMismatch
from .forms import DIM, KForm, LaxOperator, VField, _perm_sign, evaluate_form, symmetric_product

HALF = gmpy2.mpq(1, 2)


class DegenerateSolution(ValueError):
    """Delta = a*u44 + b*u14 vanishes identically."""


class DegenerateDiagonalization(ValueError):
    def __init__(self, pivots: Sequence[str]):
        self.pivots = list(pivots)
        super().__init__("vanishing pivot(s): " + ", ".join(self.pivots))


class SingularPoint(ValueError):
    pass


@dataclass(frozen=True)
class EquationConstants:
    a: Rational
    b: Rational
    c: Rational

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, Q(getattr(self, name)))

    @property
    def is_modified(self) -> bool:
        return self.a == 0 and self.c == 0 and self.b == 1

    @property
    def is_generic(self) -> bool:
        return self.a * self.b * self.c != 0


MODIFIED = EquationConstants(0, 1, 0)


class SolutionJet:
    """A polynomial u with its second partials and Delta = a u44 + b u14."""

    def __init__(self, consts: EquationConstants, u: MPoly):
        if u.nvars != DIM:
            raise ValueError("u must be a polynomial in z1..z4")
        self.consts = consts
        self.u = u
        first = [u.diff(i) for i in range(DIM)]
        self._second = {}
        for i in range(DIM):
            for j in range(i, DIM):
                self._second[(i, j)] = first[i].diff(j)
        self.delta = self.d(3, 3) * consts.a + self.d(0, 3) * consts.b

    def d(self, i: int, j: int) -> MPoly:
        return self._second[(min(i, j), max(i, j))]

    u11 = property(lambda self: self.d(0, 0))
    u12 = property(lambda self: self.d(0, 1))
    u13 = property(lambda self: self.d(0, 2))
    u14 = property(lambda self: self.d(0, 3))
    u24 = property(lambda self: self.d(1, 3))
    u34 = property(lambda self: self.d(2, 3))
    u44 = property(lambda self: self.d(3, 3))

    def require_nondegenerate(self) -> None:
        if self.delta.is_zero():
            raise DegenerateSolution("Delta = a*u44 + b*u14 vanishes identically")


def residual_phi(consts: EquationConstants, u: MPoly) -> MPoly:
    """u14 u24 - u12 u44 + a u34 + b u13 + c u11."""
    if u.nvars != DIM:
        raise ValueError("u must have arity 4")
    j = SolutionJet(consts, u)
    return j.u14 * j.u24 - j.u12 * j.u44 + j.u34 * consts.a + j.u13 * consts.b + j.u11 * consts.c


def build_lax(consts: EquationConstants, jet: SolutionJet) -> tuple[LaxOperator, LaxOperator]:
    a, b, c = consts.a, consts.b, consts.c
    L0 = LaxOperator(
        VField((0, jet.u14, a, -jet.u12)),
        VField.coordinate(0),
    )
    M0 = LaxOperator(
        VField((-c, jet.u44, -b, -jet.u24)),
        VField.coordinate(3),
    )
    return L0, M0


# ---------------------------------------------------------------------------
# tetrad and coframe


@dataclass(frozen=True, eq=False)
class Tetrad:
    W: VField
    Z: VField
    Wt: VField
    Zt: VField
    sign: int

    def vectors(self) -> tuple[VField, VField, VField, VField]:
        return (self.W, self.Z, self.Wt, self.Zt)

    def normalization_order(self) -> tuple[VField, VField, VField, VField]:
        """Order used in 24 nu(...) = 1; odd permutation on the Delta < 0 chart."""
        if self.sign > 0:
            return (self.W, self.Z, self.Wt, self.Zt)
        return (self.Z, self.Zt, self.W, self.Wt)


def _half(jet: SolutionJet, sign: int, coeff, k: int = -1) -> DeltaScalar:
    return DeltaScalar(RatFn.coerce(coeff), k, sign, RatFn.coerce(jet.delta))


def build_tetrad(consts: EquationConstants, jet: SolutionJet, sign: int = 1) -> Tetrad:
    jet.require_nondegenerate()
    a, b, c = consts.a, consts.b, consts.c

    def vf(*comps):
        return VField(tuple(_half(jet, sign, x) for x in comps))

    return Tetrad(
        W=vf(0, jet.u14, a, -jet.u12),
        Z=vf(-c, jet.u44, -b, -jet.u24),
        Wt=vf(0, 0, 0, -1),
        Zt=vf(-1, 0, 0, 0),
        sign=sign,
    )


def coframe_polynomials(consts: EquationConstants, jet: SolutionJet) -> list[list[MPoly]]:
    """Polynomial parts of omega^1..omega^4 (rows) in the dz basis (columns)."""
    a, b, c = consts.a, consts.b, consts.c
    zero = MPoly.zero()
    one = MPoly.const(1)
    D = jet.delta
    return [
        [zero, one * b, jet.u44, zero],
        [zero, one * a, -jet.u14, zero],
        [zero, -(jet.u24 * a + jet.u12 * b), -(jet.u12 * jet.u44 - jet.u14 * jet.u24), -D],
        [-D, one * (-a * c), jet.u14 * c, zero],
    ]


def build_coframe(consts: EquationConstants, jet: SolutionJet, sign: int = 1) -> tuple[KForm, ...]:
    """omega^i = (s/sqrt|Delta|) * (displayed polynomial 1-form).

    The factor s = sign(Delta) makes omega^i(e_j) = delta^i_j hold on both
    charts; on the Delta > 0 chart it is the plain 1/sqrt|Delta| prefactor.
    """
    jet.require_nondegenerate()
    rows = coframe_polynomials(consts, jet)
    return tuple(KForm.one_form([_half(jet, sign, p * sign) for p in row]) for row in rows)


def biorthogonality_matrix(coframe: Sequence[KForm], tetrad: Tetrad) -> list[list[RatFn]]:
    """M[i][j] = omega^i(e_j) with e = (W, Z, W~, Z~), collapsed to RatFn."""
    return [[evaluate_form(w, e).collapse() for e in tetrad.vectors()] for w in coframe]


def nu_form(jet: SolutionJet, sign: int = 1) -> KForm:
    """nu = Omega^2 dz1^dz2^dz3^dz4 with Omega^2 = |Delta| = s*Delta."""
    return KForm.volume(RatFn.coerce(jet.delta) * sign)


def normalization_value(consts: EquationConstants, jet: SolutionJet, sign: int = 1) -> RatFn:
    """24 * nu evaluated on the chart's tetrad ordering; equals 1 on solutions."""
    t = build_tetrad(consts, jet, sign)
    val = evaluate_form(nu_form(jet, sign), *t.normalization_order())
    if isinstance(val, DeltaScalar):
        val = val.collapse()
    return val * 24


# ---------------------------------------------------------------------------
# metric


def _det(m: Sequence[Sequence]):
    n = len(m)
    total = None
    for perm in permutations(range(n)):
        s = _perm_sign(perm)
        prod = None
        for i, j in enumerate(perm):
            x = m[i][j]
            if x.is_zero():
                prod = None
                break
            prod = x if prod is None else prod * x
        if prod is None:
            continue
        prod = prod if s > 0 else -prod
        total = prod if total is None else total + prod
    return RatFn.coerce(0) if total is None else total


def _minor(m, i, j):
    return [[m[r][c] for c in range(len(m)) if c != j] for r in range(len(m)) if r != i]


@dataclass(frozen=True, eq=False)
class MetricTensor:
    """Symmetric 4x4 metric g_{mu nu}; ds^2 = g_{mu nu} dz^mu dz^nu.

    The 2/|Delta| prefactor is folded into the components as 2 s / Delta.
    """

    components: tuple
    sign: int = 1
    delta: RatFn | None = None
    coframe: tuple | None = None
    tetrad: Tetrad | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(RatFn.coerce(x) for x in row) for row in self.components)
        if len(rows) != DIM or any(len(r) != DIM for r in rows):
            raise ValueError("metric must be 4x4")
        for i in range(DIM):
            for j in range(i + 1, DIM):
                if not (rows[i][j] - rows[j][i]).is_zero():
                    raise ValueError(f"metric not symmetric at ({i},{j})")
        object.__setattr__(self, "components", rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.components[i][j]

    def equals(self, other) -> bool:
        comps = other.components if isinstance(other, MetricTensor) else other
        return all(
            (self.components[i][j] - RatFn.coerce(comps[i][j])).is_zero()
            for i in range(DIM)
            for j in range(DIM)
        )

    def det(self) -> RatFn:
        if "det" not in self._cache:
            self._cache["det"] = _det(self.components)
        return self._cache["det"]

    def inverse(self) -> tuple:
        """Inverse metric g^{mu nu} via adjugate / determinant."""
        if "inv" not in self._cache:
            d = self.det()
            if d.is_zero():
                raise ZeroDivisionError("metric is identically singular")
            dinv = d.inverse()
            inv = [[None] * DIM for _ in range(DIM)]
            for i in range(DIM):
                for j in range(i, DIM):
                    cof = _det(_minor(self.components, j, i))
                    if (i + j) % 2:
                        cof = -cof
                    inv[i][j] = inv[j][i] = cof * dinv
            self._cache["inv"] = tuple(tuple(r) for r in inv)
        return self._cache["inv"]

    def matrix_at(self, point: Sequence) -> list[list[Rational]]:
        return [[self.components[i][j].evaluate(point) for j in range(DIM)] for i in range(DIM)]

    def matrix_at_float(self, point: Sequence[float]) -> list[list[float]]:
        return [[self.components[i][j].evaluate_float(point) for j in range(DIM)] for i in range(DIM)]

    def volume_density(self) -> RatFn:
        """Oriented sqrt|det g|: det of the coframe matrix if known, else an exact root."""
        if "vol" not in self._cache:
            if self.coframe is not None:
                rows = [[w[(j,)] for j in range(DIM)] for w in self.coframe]
                v = _det(rows)
                self._cache["vol"] = v.collapse() if isinstance(v, DeltaScalar) else v
            else:
                self._cache["vol"] = sqrt_ratfn(self.det())
        return self._cache["vol"]


def sqrt_ratfn(r: RatFn) -> RatFn:
    """Exact square root of a rational function (up to sign); ValueError if none."""
    num = r.num
    factors = {}
    for f, e in r.factors.items():
        if e % 2:
            num = num * f
            e += 1
        factors[f] = e // 2
    root = num.sqrt()
    if root is None:
        root = (-num).sqrt()
    if root is None:
        raise ValueError("determinant is not a perfect square")
    den = MPoly.const(1, r.nvars)
    for f, e in factors.items():
        den = den * f ** e
    return RatFn(root, den)


def metric_from_alphas(consts: EquationConstants, jet: SolutionJet, sign: int = 1) -> MetricTensor:
    """Expanded metric: (2/|Delta|){a1 dz2^2 + a2 dz3^2 + a3 dz2 dz3 + Delta(...)}."""
    jet.require_nondegenerate()
    a, b = consts.a, consts.b
    al = alphas(consts, jet)
    D = RatFn.coerce(jet.delta)
    pref = D.inverse() * (2 * sign)
    g = [[RatFn.coerce(0)] * DIM for _ in range(DIM)]

    def put(i, j, val):
        g[i][j] = g[i][j] + val
        if i != j:
            g[j][i] = g[j][i] + val

    put(1, 1, pref * al.alpha1)
    put(2, 2, pref * al.alpha2)
    put(1, 2, pref * al.alpha3 * HALF)
    # Delta * (b dz2dz4 - a dz1dz2 + u14 dz1dz3 + u44 dz3dz4); 2/|Delta|*Delta = 2s
    put(1, 3, RatFn.coerce(b * sign))
    put(0, 1, RatFn.coerce(-a * sign))
    put(0, 2, RatFn.coerce(jet.u14 * sign))
    put(2, 3, RatFn.coerce(jet.u44 * sign))
    return MetricTensor(tuple(tuple(r) for r in g), sign, D)


def metric_from_coframe(coframe: Sequence[KForm], sign: int = 1, delta=None, tetrad=None) -> MetricTensor:
    """ds^2 = 2(omega^2 omega^4 - omega^1 omega^3)."""
    w1, w2, w3, w4 = coframe
    p24 = symmetric_product(w2, w4)
    p13 = symmetric_product(w1, w3)
    comps = []
    for i in range(DIM):
        row = []
        for j in range(DIM):
            v = (p24[i][j] - p13[i][j]) * 2
            row.append(v.collapse() if isinstance(v, DeltaScalar) else v)
        comps.append(tuple(row))
    return MetricTensor(tuple(comps), sign, RatFn.coerce(delta) if delta is not None else None, tuple(coframe), tetrad)


def build_metric(consts: EquationConstants, jet: SolutionJet, sign: int = 1) -> MetricTensor:
    """Metric built from the coframe, cross-checked against the alpha expansion."""
    tetrad = build_tetrad(consts, jet, sign)
    cof = build_coframe(consts, jet, sign)
    g = metric_from_coframe(cof, sign, jet.delta, tetrad)
    expanded = metric_from_alphas(consts, jet, sign)
    if not g.equals(expanded):
        raise AssertionError("coframe metric and alpha expansion disagree")
    return g


def frame_metric(g: MetricTensor) -> list[list[RatFn]]:
    """g(e_a, e_b) over the tetrad (W, Z, W~, Z~)."""
    if g.tetrad is None:
        raise ValueError("metric carries no tetrad")
    vecs = g.tetrad.vectors()
    out = []
    for A in vecs:
        row = []
        for B in vecs:
            acc = None
            for i in range(DIM):
                for j in range(DIM):
                    if A[i].is_zero() or B[j].is_zero():
                        continue
                    t = A[i] * B[j] * g.components[i][j]
                    acc = t if acc is None else acc + t
            if acc is None:
                row.append(RatFn.coerce(0))
            else:
                row.append(acc.collapse() if isinstance(acc, DeltaScalar) else acc)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# diagonalisation


@dataclass(frozen=True, eq=False)
class Alphas:
    alpha1: RatFn
    alpha2: RatFn
    alpha3: RatFn


def alphas(consts: EquationConstants, jet: SolutionJet) -> Alphas:
    a, b, c = consts.a, consts.b, consts.c
    u12, u14, u24, u44 = jet.u12, jet.u14, jet.u24, jet.u44
    minor = u12 * u44 - u14 * u24
    return Alphas(
        RatFn.coerce((u24 * a + u12 * b) * b - a * a * c),
        RatFn.coerce(u44 * minor - u14 * u14 * c),
        RatFn.coerce(minor * b + u44 * (u24 * a + u12 * b) + u14 * (2 * a * c)),
    )


def quadratic_form(l: Sequence) -> list[list[RatFn]]:
    """Matrix of (sum_i l_i dz^i)^2."""
    l = [RatFn.coerce(x) for x in l]
    return [[l[i] * l[j] for j in range(DIM)] for i in range(DIM)]


def _combine(terms) -> list[list[RatFn]]:
    out = [[RatFn.coerce(0)] * DIM for _ in range(DIM)]
    for coeff, mat in terms:
        for i in range(DIM):
            for j in range(DIM):
                if not mat[i][j].is_zero():
                    out[i][j] = out[i][j] + mat[i][j] * coeff
    return out


def _matrices_equal(m1, m2) -> bool:
    return all((RatFn.coerce(m1[i][j]) - RatFn.coerce(m2[i][j])).is_zero() for i in range(DIM) for j in range(DIM))


@dataclass(frozen=True, eq=False)
class DiagonalizationData:
    alpha1: RatFn
    alpha2: RatFn
    alpha3: RatFn
    beta1: RatFn
    beta2: RatFn
    alpha14: RatFn
    alpha44: RatFn
    beta: RatFn
    l_forms: tuple  # l1, l2, l3 as 1-form component lists
    l4: RatFn
    diag_coefficients: tuple  # coefficients of l1^2, l2^2, l3^2, (dz4)^2 in (diag)
    simple_coefficients: tuple  # same for the simplified form as printed
    diag_matrix: list
    simple_matrix: list
    corrected_simple_matrix: list
    diag_equals_metric: bool
    simple_equals_metric: bool
    corrected_simple_equals_metric: bool
    u12_identity: bool

    @property
    def all_identities_hold(self) -> bool:
        return self.diag_equals_metric and self.simple_equals_metric and self.u12_identity


def diagonalize(consts: EquationConstants, jet: SolutionJet, sign: int = 1, metric: MetricTensor | None = None) -> DiagonalizationData:
    jet.require_nondegenerate()
    a, b, c = consts.a, consts.b, consts.c
    al = alphas(consts, jet)
    a1, a2, a3 = al.alpha1, al.alpha2, al.alpha3
    u12 = RatFn.coerce(jet.u12)
    u14 = RatFn.coerce(jet.u14)
    u24 = RatFn.coerce(jet.u24)
    u44 = RatFn.coerce(jet.u44)
    D = RatFn.coerce(jet.delta)
    disc = u24 * u24 + u12 * (4 * c)

    bad = [name for name, v in (("alpha1", a1), ("u12", u12)) if v.is_zero()]
    if bad:
        raise DegenerateDiagonalization(bad)
    beta1 = a2 - a3 * a3 / (a1 * 4)
    if beta1.is_zero():
        raise DegenerateDiagonalization(["beta1"])
    beta2 = D * D / 4 * ((u14 + a * a3 / (a1 * 2)) ** 2 / beta1 + a * a / a1)
    bad = [name for name, v in (("beta2", beta2), ("u24^2+4c*u12", disc)) if v.is_zero()]
    if bad:
        raise DegenerateDiagonalization(bad)

    alpha14 = u14 * a1 * 2 + a3 * a
    alpha44 = u44 * a1 * 2 - a3 * b
    beta = alpha14 * alpha44 - a1 * beta1 * (4 * a * b)

    zero = RatFn.coerce(0)
    l1 = [D * (-a) * HALF, a1, a3 * HALF, D * b * HALF]
    k2 = D / (a1 * 4)
    l2 = [k2 * alpha14, zero, beta1, k2 * alpha44]
    l3 = [beta2, zero, zero, D * D * beta / (a1 * a1 * beta1 * 16)]
    l4 = D * D / 4 * (
        D * D * beta * beta / (a1 ** 4 * beta1 * beta1 * beta2 * 64)
        - alpha44 * alpha44 / (a1 * a1 * beta1 * 4)
        - RatFn.coerce(b * b) / a1
    )
    dz4 = [zero, zero, zero, RatFn.coerce(1)]

    pref = D.inverse() * (2 * sign)
    diag_coeffs = (a1.inverse(), beta1.inverse(), -beta2.inverse(), l4)
    simple_coeffs = (
        a1.inverse(),
        -a1 * 4 / (D * D * disc),
        disc / (u12 * D * D),
        -(u12 * 4).inverse(),
    )
    squares = [quadratic_form(l) for l in (l1, l2, l3, dz4)]
    diag = _combine([(pref * k, sq) for k, sq in zip(diag_coeffs, squares)])
    simple = _combine([(pref * k, sq) for k, sq in zip(simple_coeffs, squares)])
    # l4 itself simplifies to -Delta^2/(4 u12); the printed (dz4)^2 term lacks Delta^2
    corrected_coeffs = simple_coeffs[:3] + (-(D * D) / (u12 * 4),)
    corrected = _combine([(pref * k, sq) for k, sq in zip(corrected_coeffs, squares)])

    g = metric if metric is not None else metric_from_alphas(consts, jet, sign)
    identity = (alpha14 * alpha14 + a1 * beta1 * (4 * a * a)) / (D * D * a1 * 4)
    return DiagonalizationData(
        alpha1=a1,
        alpha2=a2,
        alpha3=a3,
        beta1=beta1,
        beta2=beta2,
        alpha14=alpha14,
        alpha44=alpha44,
        beta=beta,
        l_forms=(tuple(l1), tuple(l2), tuple(l3)),
        l4=l4,
        diag_coefficients=diag_coeffs,
        simple_coefficients=simple_coeffs,
        diag_matrix=diag,
        simple_matrix=simple,
        corrected_simple_matrix=corrected,
        diag_equals_metric=_matrices_equal(diag, g.components),
        simple_equals_metric=_matrices_equal(simple, g.components),
        corrected_simple_equals_metric=_matrices_equal(corrected, g.components),
        u12_identity=(identity - u12).is_zero(),
    )


def modified_metric_matrix(jet: SolutionJet, data: DiagonalizationData, sign: int = 1) -> list[list[RatFn]]:
    """The a=c=0, b=1 form 2/(u12 |u14|^3)[u14^2 l1^2 - 4u12^2/u24^2 l2^2 + u24^2 l3^2 - u14^2/4 dz4^2].

    It is the a=c=0, b=1 specialisation of ``simple_matrix`` (as printed).
    """
    u12 = RatFn.coerce(jet.u12)
    u14 = RatFn.coerce(jet.u14)
    u24 = RatFn.coerce(jet.u24)
    zero = RatFn.coerce(0)
    dz4 = [zero, zero, zero, RatFn.coerce(1)]
    pref = (u12 * u14 ** 3 * sign).inverse() * 2
    coeffs = (u14 * u14, -u12 * u12 * 4 / (u24 * u24), u24 * u24, -u14 * u14 / 4)
    squares = [quadratic_form(l) for l in (*data.l_forms, dz4)]
    return _combine([(pref * k, sq) for k, sq in zip(coeffs, squares)])


# ---------------------------------------------------------------------------
# signature


@dataclass(frozen=True)
class SignatureCase:
    case: str
    signature: str
    excluded: bool = False


_CASES = {
    (1, 1): SignatureCase("i", "(+-+-)"),
    (-1, 1): SignatureCase("ii", "(+--+)"),
    (1, -1): SignatureCase("iii", "(++--)"),
    (-1, -1): SignatureCase("iv", "(++++)", excluded=True),
}


def classify_signature(sign_u12: int, sign_disc: int, consts: EquationConstants | None = None) -> SignatureCase:
    """Case table for the signs of u12 and u24^2 + 4 c u12 (alpha1 > 0 assumed).

    Case (iv) is returned with ``excluded=True``: the identity
    u12 = (alpha14^2 + 4 a^2 alpha1 beta1) / (4 Delta^2 alpha1) rules it out.
    """
    if sign_u12 == 0 or sign_disc == 0:
        raise SingularPoint("boundary case: zero sign")
    key = (1 if sign_u12 > 0 else -1, 1 if sign_disc > 0 else -1)
    if consts is not None and key[1] < 0:
        # u24^2 + 4 c u12 < 0 forces c u12 < 0
        if (key[0] > 0 and consts.c >= 0) or (key[0] < 0 and consts.c <= 0):
            raise ValueError("sign pattern incompatible with the constant c")
    return _CASES[key]


@dataclass(frozen=True)
class Inertia:
    signs: tuple
    n_plus: int
    n_minus: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.n_plus, self.n_minus)


def inertia(matrix: Sequence[Sequence]) -> Inertia:
    """Exact inertia of a real symmetric matrix by symmetric elimination.

    Uses congruence transformations only (law of inertia); when no diagonal
    pivot is available, row/column i is replaced by row/column i + j to
    create one.  A zero remaining block means the matrix is singular.
    """
    A = [[Q(x) for x in row] for row in matrix]
    n = len(A)
    signs = []
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if A[i][j] != 0), None)
            if pair is None:
                raise SingularPoint("metric is degenerate at this point")
            i, j = pair
            for r in range(n):
                A[r][i] += A[r][j]
            for r in range(n):
                A[i][r] += A[j][r]
            p = i
        if p != k:
            A[k], A[p] = A[p], A[k]
            for row in A:
                row[k], row[p] = row[p], row[k]
        piv = A[k][k]
        signs.append(1 if piv > 0 else -1)
        for i in range(k + 1, n):
            if A[i][k] == 0:
                continue
            f = A[i][k] / piv
            for j in range(k, n):
                A[i][j] -= f * A[k][j]
        for j in range(k + 1, n):
            A[k][j] = gmpy2.mpq(0)
        for i in range(k + 1, n):
            A[i][k] = gmpy2.mpq(0)
    return Inertia(tuple(signs), signs.count(1), signs.count(-1))


def signature_at_point(g: MetricTensor, point: Sequence) -> Inertia:
    pt = [Q(x) for x in point]
    if g.delta is not None:
        d = g.delta.evaluate(pt)
        if d == 0:
            raise SingularPoint("Delta vanishes at this point")
        if (d > 0) != (g.sign > 0):
            raise ChartMismatch(f"Delta={d} lies outside the chart s={g.sign}")
    try:
        m = g.matrix_at(pt)
    except ZeroDivisionError as exc:
        raise SingularPoint(str(exc)) from exc
    return inertia(m)
