"""Point symmetries of the equation, their action on cubic solutions, the two
generators that leave a modified-branch cubic invariant, and Killing checks.

Generators are X = xi^i d_i + eta d_u with polynomial xi^i(z) and eta(z, u)
linear in u.  Arbitrary functions are passed as polynomials in their own
arguments: one variable for F(z), H(z), m, g, l, n and two for (z2, z3)
functions, e.g. ``MPoly.parse("z1 z2", 2)`` stands for f(z2, z3) = z2 z3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .arith import MPoly, Q, RatFn, Rational
from .core import EquationConstants, MetricTensor, SolutionJet, residual_phi
from .forms import DIM, VField, lie_metric_const

U = 4  # index of u in the 5-variable ring


class WrongBranch(ValueError):
    pass


class NotASolution(ValueError):
    pass


def _z(i: int, nvars: int = 4) -> MPoly:
    return MPoly.var(i, nvars)


def _c(v, nvars: int = 4) -> MPoly:
    return MPoly.const(v, nvars)


@dataclass(frozen=True, eq=False)
class PointSymmetry:
    xi: tuple  # four MPoly in z1..z4
    eta: MPoly  # MPoly in z1..z4, u
    name: str = ""

    def __post_init__(self):
        xi = tuple(x if isinstance(x, MPoly) else _c(x) for x in self.xi)
        if len(xi) != DIM or any(x.nvars != 4 for x in xi):
            raise ValueError("xi needs four polynomials in z1..z4")
        eta = self.eta if isinstance(self.eta, MPoly) else _c(self.eta, 5)
        if eta.nvars == 4:
            eta = eta.extend(5)
        if eta.nvars != 5:
            raise ValueError("eta must be a polynomial in z1..z4, u")
        if eta.degree(U) > 1:
            raise ValueError("eta must be at most linear in u")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)

    def __add__(self, other: PointSymmetry) -> PointSymmetry:
        return PointSymmetry(tuple(a + b for a, b in zip(self.xi, other.xi)), self.eta + other.eta)

    def scale(self, k) -> PointSymmetry:
        k = Q(k)
        return PointSymmetry(tuple(x * k for x in self.xi), self.eta * k, self.name)

    def equals(self, other: PointSymmetry) -> bool:
        return all(a == b for a, b in zip(self.xi, other.xi)) and self.eta == other.eta

    @property
    def spacetime_part(self) -> VField:
        return VField(self.xi)

    def has_constant_spacetime_part(self) -> bool:
        return all(x.is_constant() for x in self.xi)

    def u_part(self) -> MPoly:
        """eta with u = 0 (all generators used here have no u-term)."""
        return self.eta.compose([_z(i) for i in range(4)] + [_c(0)])

    def __repr__(self) -> str:
        parts = [f"({x})*d{i + 1}" for i, x in enumerate(self.xi) if not x.is_zero()]
        if not self.eta.is_zero():
            parts.append(f"({self.eta})*du")
        return f"PointSymmetry[{self.name}](" + (" + ".join(parts) or "0") + ")"


def _sym(xi: Sequence, eta=0, name: str = "") -> PointSymmetry:
    return PointSymmetry(tuple(xi), eta, name)


def _uvar() -> MPoly:
    return MPoly.var(U, 5)


def _lift5(p: MPoly) -> MPoly:
    return p.extend(5)


def _compose1(f: MPoly | None, arg: MPoly) -> MPoly:
    """f(arg) for a one-variable polynomial f (None means 0)."""
    if f is None:
        return _c(0)
    if f.nvars != 1:
        raise ValueError("expected a polynomial in one variable")
    return f.compose([arg])


def _compose2(f: MPoly | None) -> MPoly:
    """f(z2, z3) for a two-variable polynomial f."""
    if f is None:
        return _c(0)
    if f.nvars != 2:
        raise ValueError("expected a polynomial in two variables (z2, z3)")
    return f.compose([_z(1), _z(2)])


def _d1(f: MPoly | None) -> MPoly | None:
    return None if f is None else f.diff(0)


# ---------------------------------------------------------------------------
# generators


def make_generic_symmetry(
    consts: EquationConstants,
    F: MPoly | None = None,
    H: MPoly | None = None,
    m: MPoly | None = None,
    N: MPoly | None = None,
    d=0,
    f: MPoly | None = None,
    g: MPoly | None = None,
) -> dict[str, PointSymmetry]:
    """X1, X2 (with f), X3 (with g) and X_inf (with F, H, m, N, d) for a b c != 0.

    F and H take z = b z1 - c z3; m takes z3; N, f, g take (z2, z3);
    zeta = a z1 - b z4.
    """
    a, b, c = consts.a, consts.b, consts.c
    if a * b * c == 0:
        raise WrongBranch("the generic generators need a*b*c != 0")
    d = Q(d)
    z1, z2, z3, z4 = (_z(i) for i in range(4))
    zz = z1 * b - z3 * c
    zeta = z1 * a - z4 * b
    u = _uvar()

    fz = _compose2(f)
    X1 = _sym([0, z2, 0, 0], u, "X1")
    X2 = _sym([0, 0, 0, -fz.diff(1)], _lift5(zeta * fz.diff(2)), "X2")
    X3 = _sym([0, 0, 0, 0], _lift5(_compose2(g)), "X3")

    Hp = _compose1(_d1(H), zz)
    Fz = _compose1(F, zz)
    mz = _compose1(m, z3)
    mp = _compose1(_d1(m), z3)
    Nz = _compose2(N)
    N3 = Nz.diff(2)
    N33 = N3.diff(2)
    r = b * d / (a * c)
    xi1 = Hp * (1 / (2 * a)) + mz * (c / b)
    xi2 = -(N3 + z2 * r)
    xi3 = mz
    xi4 = (Hp + mz * (2 * a * c / b) - (mp + _c(r)) * zeta * 2) * (1 / (2 * b))
    eta0 = (
        Fz
        + z2 * Hp * (a * c / (2 * b * b))
        + zeta * zeta * N33 * (1 / (2 * b))
        - z1 * N3 * (a * a * c / (b * b))
        - z2 * z4 * (2 * d)
    )
    Xinf = _sym([xi1, xi2, xi3, xi4], _lift5(eta0) + u * r, "Xinf")
    return {"X1": X1, "X2": X2, "X3": X3, "Xinf": Xinf}


def make_modified_symmetries(
    g: MPoly | None = None,
    l: MPoly | None = None,
    m: MPoly | None = None,
    n: MPoly | None = None,
    f: MPoly | None = None,
    h: MPoly | None = None,
    corrected: bool = False,
) -> list[PointSymmetry]:
    """X1..X8 for a=c=0, b=1: g(z3), l(z1), m(z1), n(z3), f(z2,z3), h(z2,z3).

    As displayed, X6 is a symmetry only for constant n.  ``corrected=True``
    adds the missing n'(z3) z4 d4 term, after which X6 is a symmetry for
    every n.
    """
    z1, z2, z3, z4 = (_z(i) for i in range(4))
    u = _uvar()
    gz = _compose1(g, z3)
    gp = _compose1(_d1(g), z3)
    nz = _compose1(n, z3)
    np_ = _compose1(_d1(n), z3)
    npp = _compose1(_d1(_d1(n)), z3)
    hz = _compose2(h)
    return [
        _sym([0, z2 * 2, 0, -z4], 0, "X1"),
        _sym([0, z2, 0, 0], u, "X2"),
        _sym([0, gz, 0, 0], _lift5(-(z4 * z4) * gp * Q(1, 2)), "X3"),
        _sym([0, 0, 0, 0], _lift5(_compose1(l, z1)), "X4"),
        _sym([_compose1(m, z1), 0, 0, 0], 0, "X5"),
        _sym([0, -np_ * z2, nz, np_ * z4 if corrected else 0], _lift5(z2 * z4 * z4 * npp * Q(1, 2)), "X6"),
        _sym([0, 0, 0, hz.diff(1)], _lift5(hz.diff(2) * z4), "X7"),
        _sym([0, 0, 0, 0], _lift5(_compose2(f)), "X8"),
    ]


def xinf_obstruction(m: MPoly | None = None, N: MPoly | None = None) -> MPoly:
    """N_{,23} - m'(z3) as a polynomial in (z2, z3).

    The displayed X_inf is a symmetry exactly when this vanishes, i.e. when
    N = z2 m(z3) + B(z3) up to a function of z2 alone.
    """
    N = N if N is not None else MPoly.zero(2)
    mp = _d1(m).compose([MPoly.var(1, 2)]) if m is not None else MPoly.zero(2)
    return N.diff(0).diff(1) - mp


def coupled_N(m: MPoly | None, B: MPoly | None = None) -> MPoly:
    """N = z2 m(z3) + B(z3), the form for which X_inf is a symmetry."""
    y2, y3 = MPoly.var(0, 2), MPoly.var(1, 2)
    out = y2 * m.compose([y3]) if m is not None else MPoly.zero(2)
    return out + B.compose([y3]) if B is not None else out


# ---------------------------------------------------------------------------
# action on solutions


def characteristic(X: PointSymmetry, u: MPoly) -> MPoly:
    """Q = eta(z, u(z)) - xi^i u_i."""
    subs = [_z(i) for i in range(4)] + [u]
    Qv = X.eta.compose(subs)
    for i in range(4):
        if not X.xi[i].is_zero():
            Qv = Qv - X.xi[i] * u.diff(i)
    return Qv


def linearized_residual(consts: EquationConstants, u: MPoly, Qv: MPoly, check: bool = True) -> MPoly:
    """u14 Q24 + u24 Q14 - u12 Q44 - u44 Q12 + a Q34 + b Q13 + c Q11."""
    if check and not residual_phi(consts, u).is_zero():
        raise NotASolution("u does not solve the equation")
    j = SolutionJet(consts, u)
    q = SolutionJet(consts, Qv)
    return (
        j.u14 * q.u24
        + j.u24 * q.u14
        - j.u12 * q.u44
        - j.u44 * q.u12
        + q.u34 * consts.a
        + q.u13 * consts.b
        + q.u11 * consts.c
    )


def symmetry_residual(consts: EquationConstants, u: MPoly, X: PointSymmetry) -> MPoly:
    return linearized_residual(consts, u, characteristic(X, u))


def invariance_residual(
    sol,
    C1=0,
    C2=0,
    g: MPoly | None = None,
    l: MPoly | None = None,
    m: MPoly | None = None,
    n: MPoly | None = None,
    f: MPoly | None = None,
    h: MPoly | None = None,
    corrected: bool = False,
) -> MPoly:
    """Left-hand side of the invariance condition for C1 X1 + C2 X2 + X3 + ... + X8.

    m P_1 + [(2C1 + C2) z2 + g - z2 n'] P_2 + n P_3 + (h_2 - C1 z4) P_4 - C2 P
    + (z4^2/2)[g' - z2 n''] - l - z4 h_3 - f

    ``corrected=True`` adds n' z4 to the P_4 coefficient, matching the
    corrected X6; the two agree whenever n is constant.
    """
    if not sol.consts.is_modified:
        raise WrongBranch("the invariance condition is stated for a=c=0, b=1")
    C1, C2 = Q(C1), Q(C2)
    P = sol.u
    z1, z2, z3, z4 = (_z(i) for i in range(4))
    P1, P2, P3, P4 = (P.diff(i) for i in range(4))
    gz, gp = _compose1(g, z3), _compose1(_d1(g), z3)
    nz, np_, npp = _compose1(n, z3), _compose1(_d1(n), z3), _compose1(_d1(_d1(n)), z3)
    hz = _compose2(h)
    return (
        _compose1(m, z1) * P1
        + (z2 * (2 * C1 + C2) + gz - z2 * np_) * P2
        + nz * P3
        + (hz.diff(1) - z4 * C1 + (z4 * np_ if corrected else 0)) * P4
        - P * C2
        + z4 * z4 * (gp - z2 * npp) * Q(1, 2)
        - _compose1(l, z1)
        - z4 * hz.diff(2)
        - _compose2(f)
    )


def combined_generator(C1=0, C2=0, corrected: bool = False, **funcs) -> PointSymmetry:
    """C1 X1 + C2 X2 + X3 + ... + X8 as a single generator."""
    gens = make_modified_symmetries(corrected=corrected, **funcs)
    total = gens[0].scale(C1) + gens[1].scale(C2)
    for X in gens[2:]:
        total = total + X
    return total


# ---------------------------------------------------------------------------
# the two generators leaving a modified-branch cubic invariant


def _uni(coeffs: Mapping[int, Rational]) -> MPoly:
    return MPoly.from_dict({(k,): v for k, v in coeffs.items() if v}, 1)


def _bi(coeffs: Mapping[tuple, Rational]) -> MPoly:
    return MPoly.from_dict({k: v for k, v in coeffs.items() if v}, 2)


@dataclass(eq=False)
class KillingData:
    K1: PointSymmetry  # re-derived, leaves the cubic invariant
    K2: PointSymmetry
    K1_printed: PointSymmetry
    K2_printed: PointSymmetry
    constants: dict  # "K1_22", ..., "K2_3"
    h1: MPoly  # in (z2, z3), re-derived
    h1_printed: MPoly
    h2: MPoly
    g0: Rational  # constant g of X3 per unit n0
    f1: MPoly  # f of X8 per unit n0, in (z2, z3)
    f2: MPoly  # per unit m0
    l2: MPoly  # l of X4 per unit m0, in z1
    k1: VField
    k2: VField
    invariant: dict = field(default_factory=dict)  # name -> characteristic vanishes
    discrepancies: list = field(default_factory=list)

    def generator_inputs(self, n0, m0) -> dict:
        """Inputs of the invariance condition realising n0 K1 + m0 K2."""
        n0, m0 = Q(n0), Q(m0)
        return dict(
            C1=0,
            C2=0,
            g=_uni({0: self.g0 * n0}),
            l=self.l2 * m0,
            m=_uni({0: m0}),
            n=_uni({0: n0}),
            f=self.f1 * n0 + self.f2 * m0,
            h=self.h1 * n0 + self.h2 * m0,
        )


def killing_constants(c: Mapping[int, Rational]) -> dict:
    d = 3 * c[17] * c[29] - c[19] ** 2
    gm = 3 * c[12] * c[29] - c[14] * c[19]
    c5, c8, c17, c19, c29 = c[5], c[8], c[17], c[19], c[29]
    return {
        "K1_22": 2 * c5 * c17 * (2 * c5 * c[16] * d + c8 * c17 * (c17 * c19 - 9 * c[15] * c29)),
        "K1_33": c5 * (12 * c5 * c17 * c[24] * d + 2 * c8 * c17 ** 2 * (c19 * c[25] - 3 * c[18] * c29)),
        "K1_23": c17 * (4 * c5 ** 2 * c[18] * d + c8 * c17 * (c8 * c17 * c19 - 6 * c5 * c[16] * c29)),
        "K1_2": c17
        * (4 * c5 ** 2 * c[22] * d + 2 * c8 * c17 * (c[12] * c17 * c19 - 6 * c5 * c[21] * c29) + c8 ** 2 * c17 ** 2 * c19 ** 2 / d),
        "K1_3": 2 * c5 * c17 * (4 * c5 * c[27] * d - c8 * c17 * (3 * c[22] * c29 - c19 * c[28])),
        "K2_33": 3 * c8 ** 2 * c17 ** 2 * c29 - 4 * c5 ** 2 * c[25] * d,
        "K2_2": -2 * c5 * c8 * c17 * c19,
        "K2_3": 2 * c8 * c17 ** 2 * gm - 4 * c5 ** 2 * c[28] * d,
    }


def _h1(c, linear_z3_factor) -> MPoly:
    d = 3 * c[17] * c[29] - c[19] ** 2
    gm = 3 * c[12] * c[29] - c[14] * c[19]
    c5, c8, c17, c19, c29 = c[5], c[8], c[17], c[19], c[29]
    k = 1 / (4 * c5 ** 2 * d)
    return _bi(
        {
            (0, 2): k * (4 * c5 ** 2 * c[25] * d - 3 * c8 ** 2 * c17 ** 2 * c29),
            (0, 1): k * linear_z3_factor * (2 * c5 ** 2 * c[28] * d - c8 * c17 ** 2 * gm),
            (1, 0): k * 2 * c5 * c8 * c17 * c19,
        }
    )


def killing_vectors(sol) -> KillingData:
    """K1, K2 for a modified-branch cubic, printed and re-derived, with checks."""
    if not sol.consts.is_modified:
        raise WrongBranch("K1, K2 are stated for a=c=0, b=1")
    c = sol.coeffs
    d = sol.delta_param
    if c[5] == 0 or c[17] == 0 or d == 0:
        raise ValueError("c5*c17*delta must be nonzero")
    c1, c5, c8, c11, c14, c17, c19, c29 = (c[i] for i in (1, 5, 8, 11, 14, 17, 19, 29))
    K = killing_constants(c)
    z1, z2, z3, z4 = (_z(i) for i in range(4))

    h1_printed = _h1(c, 2 / c17)
    h1 = _h1(c, Q(2))
    h2 = _bi({(1, 0): -c5 / c17, (0, 1): -3 * c8 * c29 / (2 * d)})

    kpoly1 = _bi({(2, 0): K["K1_22"], (0, 2): K["K1_33"], (1, 1): 2 * K["K1_23"], (1, 0): K["K1_2"], (0, 1): K["K1_3"]})
    kpoly2 = _bi({(0, 2): K["K2_33"], (1, 0): K["K2_2"], (0, 1): K["K2_3"]})
    f1 = kpoly1 * (1 / (4 * c17 * c5 ** 2 * d))
    f2 = kpoly2 * (1 / (4 * c5 * c17 * d))
    l2 = _uni({2: 3 * (c1 * c17 ** 3 - c29 * c5 ** 3) / c17 ** 3, 1: (2 * c11 * c17 - c5 * c14) / c17})
    g0 = -3 * c29 * c8 * c17 / (2 * c5 * d)

    xi1 = [_c(0), _c(g0), _c(1), _c(c8 * c17 * c19 / (2 * c5 * d))]
    xi2 = [_c(1), _c(0), _c(0), _c(-c5 / c17)]

    def lift(p2):
        return _compose2(p2)

    # printed K1: 1/(2 c5^2 delta) [z4 h1,3 + 1/(2 c17) (K-polynomial)]
    eta1_printed = (z4 * lift(h1_printed.diff(1)) + lift(kpoly1) * (1 / (2 * c17))) * (1 / (2 * c5 ** 2 * d))
    # re-derived: z4 h1,3 + f1, the X7 and X8 pieces with n0 = 1
    eta1 = z4 * lift(h1.diff(1)) + lift(f1)
    eta2 = _compose1(l2, z1) + z4 * lift(h2.diff(1)) + lift(f2)
    eta2_printed = (
        (z1 * z1 * (3 * (c1 * c17 ** 3 - c29 * c5 ** 3)) + z1 * (c17 ** 2 * (2 * c11 * c17 - c5 * c14))) * (1 / c17 ** 3)
        - z4 * (3 * c8 * c29 / (2 * d))
        + (z3 * z3 * K["K2_33"] + z2 * K["K2_2"] + z3 * K["K2_3"]) * (1 / (4 * c5 * c17 * d))
    )
    K1 = _sym(xi1, eta1, "K1")
    K2 = _sym(xi2, eta2, "K2")
    K1p = _sym(xi1, eta1_printed, "K1 (printed)")
    K2p = _sym(xi2, eta2_printed, "K2 (printed)")

    data = KillingData(
        K1=K1,
        K2=K2,
        K1_printed=K1p,
        K2_printed=K2p,
        constants=K,
        h1=h1,
        h1_printed=h1_printed,
        h2=h2,
        g0=g0,
        f1=f1,
        f2=f2,
        l2=l2,
        k1=VField(xi1),
        k2=VField(xi2),
    )
    for X in (K1, K2, K1p, K2p):
        data.invariant[X.name] = characteristic(X, sol.u).is_zero()
    if not data.invariant["K1 (printed)"]:
        data.discrepancies.append(
            "printed K1 does not leave the cubic invariant; its u-component is "
            "z4 h1,3 + (K-polynomial)/(4 c17 c5^2 delta), without the extra 1/(2 c5^2 delta) on z4 h1,3"
        )
    if h1 != h1_printed:
        data.discrepancies.append("in h1 the linear z3 term carries the factor 2, not 2/c17")
    if not data.invariant["K2 (printed)"]:
        data.discrepancies.append("printed K2 does not leave the cubic invariant")
    return data


# ---------------------------------------------------------------------------
# Killing vectors of the metric

METRIC_PARTIALS = ((0, 1), (0, 3), (1, 3), (3, 3))  # u12, u14, u24, u44


def second_partials_invariant(jet: SolutionJet, k: VField) -> bool:
    """k annihilates u12, u14, u24 and u44, the only second partials in the metric."""
    return all(k.apply(RatFn.coerce(jet.d(i, j))).is_zero() for i, j in METRIC_PARTIALS)


def killing_check(g: MetricTensor, k: VField, jet: SolutionJet | None = None) -> bool:
    """True iff L_k g = 0 exactly for a constant vector field k.

    With ``jet`` given, the invariance of the metric's second partials of u
    along k is asserted as well.
    """
    lie = lie_metric_const(g, k)
    ok = all(lie[i][j].is_zero() for i in range(DIM) for j in range(DIM))
    if jet is not None and ok != second_partials_invariant(jet, k):
        raise AssertionError("Lie derivative and second-partial invariance disagree")
    return ok
