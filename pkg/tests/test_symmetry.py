import itertools
import random

import pytest
import sympy as sp

from heavenly.arith import MPoly, Q, parse_mpoly
from heavenly.core import MODIFIED, EquationConstants, build_metric
from heavenly.forms import VField
from heavenly.solutions import random_solution, worked_instance
from heavenly.symmetry import (
    NotASolution,
    WrongBranch,
    characteristic,
    combined_generator,
    coupled_N,
    invariance_residual,
    killing_check,
    killing_vectors,
    linearized_residual,
    make_generic_symmetry,
    make_modified_symmetries,
    symmetry_residual,
    xinf_obstruction,
)

# -- second-prolongation oracle ---------------------------------------------------
# Works on the jet space directly, so it shares nothing with the
# characteristic / linearisation route used by the package.

Z = sp.symbols("z1:5")
U = sp.Symbol("u")
P1 = {i: sp.Symbol(f"p{i + 1}") for i in range(4)}
P2 = {}
for i, j in itertools.combinations_with_replacement(range(4), 2):
    P2[(i, j)] = P2[(j, i)] = sp.Symbol(f"p{i + 1}{j + 1}")
P3 = {}
for t in itertools.combinations_with_replacement(range(4), 3):
    s = sp.Symbol("p" + "".join(str(k + 1) for k in t))
    for perm in set(itertools.permutations(t)):
        P3[perm] = s


def total_d(f, i):
    out = sp.diff(f, Z[i]) + sp.diff(f, U) * P1[i]
    out += sum(sp.diff(f, P1[j]) * P2[(i, j)] for j in range(4))
    out += sum(sp.diff(f, s) * P3[tuple(sorted((i, a, b)))] for (a, b), s in P2.items() if a <= b)
    return out


def prolongation_condition(xi, eta, a, b, c):
    """pr^(2) X applied to the equation, restricted to its solution manifold."""
    Qc = eta - sum(xi[k] * P1[k] for k in range(4))

    def e(i, j):
        i, j = sorted((i, j))
        return total_d(total_d(Qc, i), j) + sum(xi[k] * P3[tuple(sorted((i, j, k)))] for k in range(4))

    p = lambda i, j: P2[(i, j)]  # noqa: E731
    cond = (
        e(0, 3) * p(1, 3) + p(0, 3) * e(1, 3) - e(0, 1) * p(3, 3) - p(0, 1) * e(3, 3)
        + a * e(2, 3) + b * e(0, 2) + c * e(0, 0)
    )
    eq = p(0, 3) * p(1, 3) - p(0, 1) * p(3, 3) + a * p(2, 3) + b * p(0, 2) + c * p(0, 0)
    sol13 = sp.solve(eq, p(0, 2))[0]
    return sp.expand(sp.together(cond.subs(p(0, 2), sol13)) * b)


def to_sympy(p: MPoly, names=None):
    names = names or (list(Z) + [U])[: p.nvars]
    return sum(
        (sp.Rational(int(c.numerator), int(c.denominator)) * sp.Mul(*[v**e for v, e in zip(names, ex)]) for ex, c in p.items()),
        sp.Integer(0),
    )


def oracle_is_symmetry(X, consts) -> bool:
    xi = [to_sympy(x) for x in X.xi]
    eta = to_sympy(X.eta)
    a, b, c = (sp.Rational(int(v.numerator), int(v.denominator)) for v in (consts.a, consts.b, consts.c))
    return prolongation_condition(xi, eta, a, b, c) == 0


def uni(text):
    return parse_mpoly(text.replace("z", "z1"), 1)


def bi(text):
    return parse_mpoly(text, 2)  # variables z1, z2 stand for (z2, z3)


# -- modified branch generators -------------------------------------------------------


FUNCS = dict(g=uni("z^2 + 1"), l=uni("z^3"), m=uni("2*z - z^2"), n=uni("z^2 + z"), f=bi("z1 z2^2"), h=bi("z1^2 z2 + z2^3"))


def test_oracle_corrected_modified_generators():
    for X in make_modified_symmetries(**FUNCS, corrected=True):
        assert oracle_is_symmetry(X, MODIFIED), X.name


def test_oracle_printed_x6_needs_constant_n():
    printed = {X.name: X for X in make_modified_symmetries(**FUNCS)}
    assert not oracle_is_symmetry(printed["X6"], MODIFIED)
    const_n = make_modified_symmetries(n=uni("5"))[5]
    assert oracle_is_symmetry(const_n, MODIFIED)
    for name in ("X1", "X2", "X3", "X4", "X5", "X7", "X8"):
        assert oracle_is_symmetry(printed[name], MODIFIED), name


@pytest.mark.parametrize("seed", range(3))
def test_linearised_residual_on_cubics(seed):
    sol = random_solution(seed, "modified")
    for X in make_modified_symmetries(**FUNCS, corrected=True):
        assert symmetry_residual(MODIFIED, sol.u, X).is_zero(), X.name
    printed_x6 = make_modified_symmetries(**FUNCS)[5]
    assert not symmetry_residual(MODIFIED, sol.u, printed_x6).is_zero()


def test_corrected_and_printed_agree_for_constant_n():
    a = make_modified_symmetries(n=uni("3"))[5]
    b = make_modified_symmetries(n=uni("3"), corrected=True)[5]
    assert a.equals(b)


# -- generic branch ----------------------------------------------------------------------


CONSTS = EquationConstants(2, Q(-1, 3), 5)


def test_oracle_generic_generators_with_coupled_n():
    m = uni("z^2 - 1")
    gens = make_generic_symmetry(CONSTS, F=uni("z^2"), H=uni("z + 3"), m=m, N=coupled_N(m, uni("z^3")), d=2, f=bi("z1 z2"), g=bi("z2^2"))
    for name, X in gens.items():
        assert oracle_is_symmetry(X, CONSTS), name


def test_oracle_xinf_fails_when_n_is_uncoupled():
    m = uni("z^2 - 1")
    N = bi("z1^2 z2")
    assert not xinf_obstruction(m, N).is_zero()
    X = make_generic_symmetry(CONSTS, m=m, N=N)["Xinf"]
    assert not oracle_is_symmetry(X, CONSTS)


def test_xinf_obstruction_vanishes_on_coupled_form():
    m = uni("3*z^3 + z")
    assert xinf_obstruction(m, coupled_N(m, uni("z^2"))).is_zero()
    assert xinf_obstruction(None, bi("z1^5 + z2^4")).is_zero()


@pytest.mark.parametrize("seed", range(3))
def test_generic_linearised_residual(seed):
    sol = random_solution(seed, "generic")
    m = uni("z^2 + 2")
    gens = make_generic_symmetry(sol.consts, F=uni("z^2"), H=uni("z"), m=m, N=coupled_N(m, uni("z")), d=1, f=bi("z1^2"), g=bi("z1 z2"))
    for X in gens.values():
        assert symmetry_residual(sol.consts, sol.u, X).is_zero()


def test_generic_generators_need_abc_nonzero():
    with pytest.raises(ValueError):
        make_generic_symmetry(MODIFIED)


def test_linearised_residual_rejects_non_solutions():
    with pytest.raises(NotASolution):
        linearized_residual(MODIFIED, parse_mpoly("z1^2 z3"), parse_mpoly("z1"))


# -- invariance condition and K1, K2 -------------------------------------------------


@pytest.mark.parametrize("corrected", [False, True])
def test_invariance_condition_is_minus_characteristic(corrected):
    sol = random_solution(2, "modified")
    lhs = invariance_residual(sol, 2, -1, corrected=corrected, **FUNCS)
    X = combined_generator(2, -1, corrected=corrected, **FUNCS)
    assert (lhs + characteristic(X, sol.u)).is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_k1_k2_leave_cubic_invariant(seed):
    sol = random_solution(seed, "modified")
    kd = killing_vectors(sol)
    assert kd.invariant["K1"] and kd.invariant["K2"]
    assert kd.invariant["K2 (printed)"]
    rng = random.Random(seed)
    n0, m0 = rng.randint(-9, 9), rng.randint(-9, 9)
    assert invariance_residual(sol, **kd.generator_inputs(n0, m0)).is_zero()
    assert invariance_residual(sol, corrected=True, **kd.generator_inputs(n0, m0)).is_zero()


def test_printed_k1_misprints():
    sol = random_solution(1, "modified")
    kd = killing_vectors(sol)
    assert not kd.invariant["K1 (printed)"]
    assert kd.h1 != kd.h1_printed
    assert len(kd.discrepancies) == 2


def test_k_vectors_wrong_branch():
    with pytest.raises(WrongBranch):
        killing_vectors(random_solution(0, "generic"))


def test_killing_vectors_of_worked_metric():
    sol = worked_instance()
    jet = sol.jet()
    g = build_metric(sol.consts, jet, 1)
    assert killing_check(g, VField.coordinate(2), jet)
    assert killing_check(g, VField((1, 0, 0, -1)), jet)
    assert not killing_check(g, VField.coordinate(0), jet)
    kd = killing_vectors(sol)
    assert killing_check(g, kd.k1, jet) and killing_check(g, kd.k2, jet)


@pytest.mark.parametrize("seed", range(4))
def test_killing_vectors_random(seed):
    sol = random_solution(seed, "modified")
    kd = killing_vectors(sol)
    for sign in (1, -1):
        g = build_metric(sol.consts, sol.jet(), sign)
        assert killing_check(g, kd.k1, sol.jet())
        assert killing_check(g, kd.k2, sol.jet())
