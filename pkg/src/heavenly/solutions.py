"""The eighteen-parameter cubic solution family, its a=c=0, b=1 branch,
an independent sympy re-derivation of the coefficient constraints, and the
singular hyperplane Delta = 0.

Coefficient indices follow the monomial table ``MONOMIALS`` (c1 ... c30).
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .arith import MPoly, Q, Rational
from .core import MODIFIED, EquationConstants, SolutionJet, residual_phi

# exponent vector (z1, z2, z3, z4) of the monomial multiplying c_i
MONOMIALS: dict[int, tuple[int, int, int, int]] = {
    1: (3, 0, 0, 0), 2: (2, 1, 0, 0), 3: (2, 0, 1, 0), 4: (2, 0, 0, 1),
    5: (1, 2, 0, 0), 6: (1, 0, 2, 0), 7: (1, 0, 0, 2), 8: (1, 1, 1, 0),
    9: (1, 1, 0, 1), 10: (1, 0, 1, 1), 11: (2, 0, 0, 0), 12: (1, 1, 0, 0),
    13: (1, 0, 1, 0), 14: (1, 0, 0, 1), 15: (0, 3, 0, 0), 16: (0, 2, 1, 0),
    17: (0, 2, 0, 1), 18: (0, 1, 2, 0), 19: (0, 1, 0, 2), 20: (0, 1, 1, 1),
    21: (0, 2, 0, 0), 22: (0, 1, 1, 0), 23: (0, 1, 0, 1), 24: (0, 0, 3, 0),
    25: (0, 0, 2, 1), 26: (0, 0, 1, 2), 27: (0, 0, 2, 0), 28: (0, 0, 1, 1),
    29: (0, 0, 0, 3), 30: (0, 0, 0, 2),
}  # fmt: skip

FREE = (1, 5, 8, 11, 12, 14, 15, 16, 17, 18, 19, 21, 22, 24, 25, 27, 28, 29)
DEPENDENT = (2, 3, 4, 6, 7, 9, 10, 13, 20, 23, 26, 30)


class ParameterError(ValueError):
    """A guard on the free parameters is violated; names the offending quantity."""

    def __init__(self, name: str, message: str):
        self.name = name
        super().__init__(f"{name}: {message}")


class FormulaDiscrepancy(AssertionError):
    pass


def _delta(c) -> Rational:
    return 3 * c[17] * c[29] - c[19] ** 2


def _gamma(c) -> Rational:
    return 3 * c[12] * c[29] - c[14] * c[19]


@dataclass(eq=False)
class CubicSolution:
    consts: EquationConstants
    coeffs: dict  # index -> Rational for 1..30
    u: MPoly
    notes: list = field(default_factory=list)

    @property
    def delta_param(self) -> Rational:
        return _delta(self.coeffs)

    @property
    def gamma_param(self) -> Rational:
        return _gamma(self.coeffs)

    @property
    def free_params(self) -> dict:
        return {i: self.coeffs[i] for i in FREE}

    def __getitem__(self, i: int) -> Rational:
        return self.coeffs[i]

    def jet(self) -> SolutionJet:
        return SolutionJet(self.consts, self.u)


def _normalize_free(free) -> dict:
    if isinstance(free, Mapping):
        unknown = set(free) - set(FREE)
        if unknown:
            raise ParameterError(f"c{min(unknown)}", "not a free parameter")
        return {i: Q(free.get(i, 0)) for i in FREE}
    free = list(free)
    if len(free) != len(FREE):
        raise ValueError(f"expected {len(FREE)} free parameters, got {len(free)}")
    return {i: Q(v) for i, v in zip(FREE, free)}


def check_guards(consts: EquationConstants, c: Mapping[int, Rational]) -> None:
    if consts.b == 0:
        raise ParameterError("b", "the cubic family needs b != 0")
    for i in (5, 17):
        if c[i] == 0:
            raise ParameterError(f"c{i}", "must be nonzero")
    if _delta(c) == 0:
        raise ParameterError("delta", "3*c17*c29 - c19^2 must be nonzero")


def dependent_coefficients(consts: EquationConstants, free: Mapping[int, Rational]) -> dict:
    """Dependent coefficients from the printed relations, c4 read with c5 for "c^5"."""
    a, b, cc = consts.a, consts.b, consts.c
    c = dict(free)
    c5, c17, c19, c29 = c[5], c[17], c[19], c[29]
    d = _delta(c)
    s = a * c17 + b * c5
    out = {
        2: c19 * c5 ** 2 / c17 ** 2,
        3: 3 * cc / (b * c17 ** 3) * (c29 * c5 ** 3 - c[1] * c17 ** 3),
        4: 3 * c29 * (c5 / c17) ** 2,
        7: 3 * c5 * c29 / c17,
        9: 2 * c5 * c19 / c17,
        10: Q(0),
        20: c17 * c[8] / c5,
        26: Q(0),
    }
    out[30] = c17 / (4 * c5 ** 2 * d) * (3 * c[8] * c29 * s + 2 * c5 * c[14] * d)
    out[23] = (c[8] * c19 * c17 ** 2 * s + 2 * c5 * d * (c[12] * c17 ** 2 - cc * c5 ** 2)) / (2 * c5 ** 2 * c17 * d)
    out[6] = (
        3 * cc ** 2 / b ** 2 * (c[1] - c29 * c5 ** 3 / c17 ** 3)
        - a / b * c[25]
        + 3 * c[8] ** 2 * c29 * c17 / (4 * b * c5 ** 2 * d) * s
    )
    out[13] = (2 * c[12] * out[30] - c[14] * out[23] - a * c[28] - 2 * cc * c[11]) / b
    return out


def dependent_coefficients_modified(free: Mapping[int, Rational]) -> dict:
    """The a=c=0, b=1 relations (shared ones plus the simplified five)."""
    c = dict(free)
    c5, c8, c17, c19, c29 = c[5], c[8], c[17], c[19], c[29]
    d = _delta(c)
    g = _gamma(c)
    return {
        2: c19 * c5 ** 2 / c17 ** 2,
        4: 3 * c29 * (c5 / c17) ** 2,
        7: 3 * c5 * c29 / c17,
        9: 2 * c5 * c19 / c17,
        10: Q(0),
        20: c17 * c8 / c5,
        26: Q(0),
        3: Q(0),
        6: 3 * c8 ** 2 * c29 * c17 / (4 * c5 * d),
        13: c8 * c17 / (2 * c5 * d) * g,
        23: c17 / (2 * c5 * d) * (c8 * c19 + 2 * c[12] * d),
        30: c17 / (4 * c5 * d) * (3 * c8 * c29 + 2 * c[14] * d),
    }


def assemble_cubic(coeffs: Mapping[int, Rational]) -> MPoly:
    return MPoly.from_dict({MONOMIALS[i]: v for i, v in coeffs.items() if v != 0}, 4)


def _finish(consts: EquationConstants, coeffs: dict, notes: list) -> CubicSolution:
    u = assemble_cubic(coeffs)
    res = residual_phi(consts, u)
    if not res.is_zero():
        report = rederive_constraints(consts)
        raise FormulaDiscrepancy(
            "assembled cubic is not a solution; residual "
            + res.to_str()
            + "; derived relations: "
            + "; ".join(f"c{k} = {v}" for k, v in sorted(report.derived.items()))
        )
    return CubicSolution(consts, coeffs, u, notes)


def instantiate_cubic(consts: EquationConstants, free) -> CubicSolution:
    c = _normalize_free(free)
    check_guards(consts, c)
    coeffs = dict(c)
    coeffs.update(dependent_coefficients(consts, c))
    return _finish(consts, coeffs, [C4_NOTE])


def instantiate_cubic_modified(free) -> CubicSolution:
    c = _normalize_free(free)
    check_guards(MODIFIED, c)
    coeffs = dict(c)
    coeffs.update(dependent_coefficients_modified(c))
    general = dependent_coefficients(MODIFIED, c)
    mismatched = [k for k in DEPENDENT if general[k] != coeffs[k]]
    if mismatched:
        raise FormulaDiscrepancy(f"specialised relations disagree for c{mismatched}")
    return _finish(MODIFIED, coeffs, [C4_NOTE])


C4_NOTE = 'c4 = 3 c29 (c5/c17)^2: the printed "c^5" is the coefficient c5'

WORKED_FREE = {5: 1, 17: 1, 19: 1, 29: 1}


def worked_instance() -> CubicSolution:
    """a=c=0, b=1 with c5=c17=c19=c29=1 and every other free parameter zero."""
    return instantiate_cubic_modified(WORKED_FREE)


# ---------------------------------------------------------------------------
# random admissible draws


def _small_rational(rng: random.Random, bound: int = 20, integer_bias: float = 0.6) -> Rational:
    num = rng.randint(-bound, bound)
    if rng.random() < integer_bias:
        return Q(num)
    return Q(num, rng.randint(1, bound))


def random_free_params(
    rng: random.Random,
    consts: EquationConstants,
    bound: int = 20,
    only: Sequence[int] | None = None,
) -> dict:
    """Admissible free parameters (b c5 c17 delta != 0, a c17 + b c5 != 0).

    ``only`` restricts the nonzero parameters to a subset of the free set.
    """
    keep = set(FREE if only is None else only)
    while True:
        c = {i: (_small_rational(rng, bound) if i in keep else Q(0)) for i in FREE}
        if c[5] == 0 or c[17] == 0 or _delta(c) == 0:
            continue
        if consts.a * c[17] + consts.b * c[5] == 0:
            continue
        return c


def random_constants(rng: random.Random, bound: int = 6) -> EquationConstants:
    """Random a, b, c with a*b*c != 0."""
    vals = []
    for _ in range(3):
        v = Q(0)
        while v == 0:
            v = _small_rational(rng, bound)
        vals.append(v)
    return EquationConstants(*vals)


def random_solution(seed: int, branch: str = "modified", bound: int = 20) -> CubicSolution:
    rng = random.Random(seed)
    if branch == "modified":
        return instantiate_cubic_modified(random_free_params(rng, MODIFIED, bound))
    if branch == "generic":
        consts = random_constants(rng)
        return instantiate_cubic(consts, random_free_params(rng, consts, bound))
    raise ValueError(f"unknown branch {branch!r}")


# ---------------------------------------------------------------------------
# independent re-derivation (sympy)


@dataclass
class ConstraintReport:
    derived: dict  # index -> sympy expression
    forced_zero: list
    comparisons: dict  # index -> "match" | "typo: ..." | "mismatch"
    modified_comparisons: dict
    equations: dict  # monomial exponent -> sympy expression
    c4_verdict: str
    branch_note: str
    residual_zero: bool
    extension: dict  # dependent coefficients with c10 kept symbolic
    extension_residual_zero: bool

    @property
    def resolved(self) -> list:
        return sorted(set(self.derived))

    def discrepancies(self) -> list[str]:
        out = [f"c{k}: {v}" for k, v in sorted(self.comparisons.items()) if v != "match"]
        out += [f"c{k} (a=c=0,b=1): {v}" for k, v in sorted(self.modified_comparisons.items()) if v != "match"]
        return out


def _symbols():
    import sympy as sp

    z = sp.symbols("z1:5")
    C = dict(zip(range(1, 31), sp.symbols("c1:31")))
    return sp, z, C


def printed_relations_sympy(a, b, c, C, c4_reading: str = "c5"):
    """The printed relations as sympy expressions; ``c4_reading`` picks the c^5 reading."""
    d = 3 * C[17] * C[29] - C[19] ** 2
    s = a * C[17] + b * C[5]
    c4 = {"c5": 3 * C[29] * (C[5] / C[17]) ** 2, "power": 3 * C[29] * (c ** 5 / C[17]) ** 2}[c4_reading]
    rel = {
        2: C[19] * C[5] ** 2 / C[17] ** 2,
        3: 3 * c / (b * C[17] ** 3) * (C[29] * C[5] ** 3 - C[1] * C[17] ** 3),
        4: c4,
        7: 3 * C[5] * C[29] / C[17],
        9: 2 * C[5] * C[19] / C[17],
        10: 0,
        20: C[17] * C[8] / C[5],
        26: 0,
        30: C[17] / (4 * C[5] ** 2 * d) * (3 * C[8] * C[29] * s + 2 * C[5] * C[14] * d),
        23: 1 / (2 * C[5] ** 2 * C[17] * d)
        * (C[8] * C[19] * C[17] ** 2 * s + 2 * C[5] * d * (C[12] * C[17] ** 2 - c * C[5] ** 2)),
        6: 3 * c ** 2 / b ** 2 * (C[1] - C[29] * C[5] ** 3 / C[17] ** 3)
        - a / b * C[25]
        + 3 * C[8] ** 2 * C[29] * C[17] / (4 * b * C[5] ** 2 * d) * s,
    }
    # c13 is printed in terms of c23 and c30, which are themselves dependent
    rel[13] = (2 * C[12] * C[30] - C[14] * C[23] - a * C[28] - 2 * c * C[11]) / b
    return rel


def printed_modified_sympy(C):
    d = 3 * C[17] * C[29] - C[19] ** 2
    g = 3 * C[12] * C[29] - C[14] * C[19]
    return {
        3: 0,
        6: 3 * C[8] ** 2 * C[29] * C[17] / (4 * C[5] * d),
        13: C[8] * C[17] / (2 * C[5] * d) * g,
        23: C[17] / (2 * C[5] * d) * (C[8] * C[19] + 2 * C[12] * d),
        30: C[17] / (4 * C[5] * d) * (3 * C[8] * C[29] + 2 * C[14] * d),
    }


@lru_cache(maxsize=8)
def rederive_constraints(consts: EquationConstants | None = None) -> ConstraintReport:
    """Re-derive the dependent coefficients from scratch by coefficient matching.

    Phi of a cubic is a quadratic polynomial in z; each of its 15 coefficients
    is an equation in the c's.  They are solved one at a time in a fixed,
    triangular order (no general polynomial-system solver):

    * (0,2,0,0) -> c9, (0,1,0,1) -> c7, then (1,1,0,0) & (1,0,0,1) -> c2, c4;
    * the three equations linear in c10, c20, c26 have rank 2; solving for
      c20, c26 makes the quadratic (0,0,2,0) vanish, so c10 stays free and the
      c10 = 0 slice is reported alongside the extension;
    * (0,1,0,0) & (0,0,0,1) -> c23, c30; (1,0,0,0) -> c3; (0,0,1,0) -> c6;
      (0,0,0,0) -> c13.

    With ``consts`` None the constants a, b, c stay symbolic.  Results are
    cached; treat the returned report as read-only.
    """
    sp, z, C = _symbols()
    if consts is None:
        a, b, c = sp.symbols("a b c")
    else:
        a, b, c = (sp.Rational(int(x.numerator), int(x.denominator)) for x in (consts.a, consts.b, consts.c))
    u = sum(C[i] * sp.Mul(*[zz ** e for zz, e in zip(z, MONOMIALS[i])]) for i in MONOMIALS)

    def d(i, j):
        return sp.diff(u, z[i], z[j])

    phi = sp.expand(d(0, 3) * d(1, 3) - d(0, 1) * d(3, 3) + a * d(2, 3) + b * d(0, 2) + c * d(0, 0))
    poly = sp.Poly(phi, *z)
    eqs = {m: poly.coeff_monomial(m) for m in poly.monoms()}

    def E(*m):
        return eqs.get(tuple(m), sp.Integer(0))

    sol: dict = {}

    def sub(expr):
        return sp.together(sp.expand(expr.subs(sol)))

    def solve_one(expr, var):
        expr = sp.numer(sub(expr))
        (root,) = sp.solve(expr, var)
        sol[var] = sp.factor(root)

    solve_one(E(0, 2, 0, 0), C[9])
    solve_one(E(0, 1, 0, 1), C[7])
    pair = sp.solve([sp.numer(sub(E(1, 1, 0, 0))), sp.numer(sub(E(1, 0, 0, 1)))], [C[2], C[4]], dict=True)
    sol[C[2]] = sp.factor(pair[0][C[2]])
    sol[C[4]] = sp.factor(pair[0][C[4]])

    lin = [sp.numer(sub(E(0, 1, 1, 0))), sp.numer(sub(E(0, 0, 1, 1))), sp.numer(sub(E(1, 0, 1, 0)))]
    mat, _ = sp.linear_eq_to_matrix(lin, [C[10], C[20], C[26]])
    rank = mat.rank(simplify=True)
    part = sp.solve(lin[:2], [C[20], C[26]], dict=True)[0]
    third_zero = sp.simplify(lin[2].subs(part)) == 0
    quad = sp.factor(sp.numer(sp.together(E(0, 0, 2, 0).subs(part).subs(sol))))
    sol[C[20]] = sp.factor(part[C[20]])
    sol[C[26]] = sp.factor(part[C[26]])

    # remaining unknowns, with c10 still symbolic
    pair = sp.solve([sp.numer(sub(E(0, 1, 0, 0))), sp.numer(sub(E(0, 0, 0, 1)))], [C[23], C[30]], dict=True)
    sol[C[23]] = sp.factor(pair[0][C[23]])
    sol[C[30]] = sp.factor(pair[0][C[30]])
    solve_one(E(1, 0, 0, 0), C[3])
    solve_one(E(0, 0, 1, 0), C[6])
    solve_one(E(0, 0, 0, 0), C[13])
    extension_ok = sp.simplify(phi.subs(sol)) == 0
    extension = {k: sol[C[k]] for k in DEPENDENT if k != 10}

    if quad == 0:
        branch_note = (
            f"the c10, c20, c26 equations have rank {rank} and the quadratic condition vanishes "
            f"identically, so c10 is not forced: c26 = {sol[C[26]]} and the residual "
            f"{'vanishes' if extension_ok else 'does not vanish'} for symbolic c10; "
            "the printed family is the slice c10 = 0"
        )
    else:
        branch_note = f"quadratic condition {quad} = 0; the root c10 = 0 is taken"
    if not third_zero:
        branch_note += " (third linear equation is independent)"
    sol = {k: sp.factor(v.subs(C[10], 0)) for k, v in sol.items()}
    sol[C[10]] = sp.Integer(0)

    residual_zero = sp.simplify(phi.subs(sol)) == 0
    derived = {k: sol[C[k]] for k in DEPENDENT}
    forced_zero = [k for k in DEPENDENT if derived[k] == 0 and k in (10, 26)]

    printed = printed_relations_sympy(a, b, c, C)
    comparisons = {}
    for k in DEPENDENT:
        p = printed[k].subs({C[23]: derived[23], C[30]: derived[30]}) if k == 13 else printed[k]
        comparisons[k] = "match" if sp.simplify(p - derived[k]) == 0 else "mismatch"
    literal_c4 = printed_relations_sympy(a, b, c, C, c4_reading="power")[4]
    literal_ok = sp.simplify(literal_c4 - derived[4]) == 0
    if comparisons[4] == "match" and not literal_ok:
        c4_verdict = 'the printed "c^5" must be read as the coefficient c5; the literal power of c does not solve the system'
        comparisons[4] = "match"
    elif literal_ok:
        c4_verdict = 'the literal power reading of "c^5" solves the system'
    else:
        c4_verdict = 'neither reading of "c^5" reproduces the derived c4'

    mod_subs = {a: 0, b: 1, c: 0} if consts is None else {}
    modified_comparisons = {}
    if consts is None or consts.is_modified:
        pm = printed_modified_sympy(C)
        for k, v in pm.items():
            dv = derived[k].subs(mod_subs) if mod_subs else derived[k]
            modified_comparisons[k] = "match" if sp.simplify(sp.sympify(v) - dv) == 0 else "mismatch"

    return ConstraintReport(
        derived=derived,
        forced_zero=forced_zero,
        comparisons=comparisons,
        modified_comparisons=modified_comparisons,
        equations=eqs,
        c4_verdict=c4_verdict,
        branch_note=branch_note,
        residual_zero=residual_zero,
        extension=extension,
        extension_residual_zero=extension_ok,
    )


# ---------------------------------------------------------------------------
# singular hyperplane


@dataclass(frozen=True, eq=False)
class LocusReport:
    delta: MPoly
    affine: bool
    z3_free: bool
    printed: MPoly
    printed_ratio: Rational | None  # printed = ratio * Delta, if proportional
    corrected: MPoly | None
    corrected_ratio: Rational | None
    nonsingular_condition: Rational  # a c17 + b c5

    @property
    def printed_matches(self) -> bool:
        return self.printed_ratio is not None

    def discrepancy(self) -> str | None:
        if self.printed_matches:
            return None
        return (
            "printed locus polynomial is not proportional to Delta; with 3 a c8 c29 c17^3 "
            "in place of 6 a c8 c29 c17^3 it is"
            if self.corrected_ratio is not None
            else "printed locus polynomial is not proportional to Delta"
        )


def _ratio(p: MPoly, q: MPoly) -> Rational | None:
    """r with p = r q, or None."""
    if q.is_zero():
        return None
    exps, lc = next(iter(q.items()))
    r = p.coeff(exps) / lc
    return r if (p - q * r).is_zero() and r != 0 else None


def printed_locus(sol: CubicSolution, a_term: int = 6) -> MPoly:
    c = sol.coeffs
    a = sol.consts.a
    z1, z2, z3, z4 = (MPoly.var(i) for i in range(4))
    d = sol.delta_param
    if sol.consts.is_modified:
        return (z2 * (c[17] * c[19]) + (z1 * c[5] + z4 * c[17]) * (3 * c[29])) * (2 * c[5]) + MPoly.const(c[14] * c[17] ** 2)
    inner = (z2 * (c[17] * c[19]) + (z1 * c[5] + z4 * c[17]) * (3 * c[29])) * (2 * c[5]) + MPoly.const(c[14] * c[17] ** 2)
    return inner * (2 * c[5] * d) + MPoly.const(a_term * a * c[8] * c[29] * c[17] ** 3)


def singular_locus(sol: CubicSolution) -> LocusReport:
    delta = sol.jet().delta
    affine = delta.total_degree() <= 1
    printed = printed_locus(sol)
    ratio = _ratio(printed, delta)
    corrected = corrected_ratio = None
    if not sol.consts.is_modified:
        corrected = printed_locus(sol, a_term=3)
        corrected_ratio = _ratio(corrected, delta)
    cons = sol.consts
    return LocusReport(
        delta=delta,
        affine=affine,
        z3_free=not delta.depends_on(2),
        printed=printed,
        printed_ratio=ratio,
        corrected=corrected,
        corrected_ratio=corrected_ratio,
        nonsingular_condition=cons.a * sol.coeffs[17] + cons.b * sol.coeffs[5],
    )
