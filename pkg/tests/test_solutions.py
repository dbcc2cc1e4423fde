import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from heavenly.arith import MPoly, Q, parse_mpoly
from heavenly.core import MODIFIED, EquationConstants, residual_phi
from heavenly.solutions import (
    C4_NOTE,
    DEPENDENT,
    FREE,
    MONOMIALS,
    ParameterError,
    assemble_cubic,
    dependent_coefficients,
    dependent_coefficients_modified,
    instantiate_cubic,
    instantiate_cubic_modified,
    random_free_params,
    random_solution,
    rederive_constraints,
    singular_locus,
    worked_instance,
)

C = dict(zip(range(1, 31), sp.symbols("c1:31")))


def test_monomial_table_is_the_full_cubic_basis():
    exps = set(MONOMIALS.values())
    assert len(exps) == 30
    # linear and constant terms drop out of Phi
    assert {sum(e) for e in exps} == {2, 3}
    assert sorted(FREE + DEPENDENT) == list(range(1, 31))


@pytest.mark.parametrize("branch", ["modified", "generic"])
@pytest.mark.parametrize("seed", range(10))
def test_random_draws_solve_the_equation(branch, seed):
    sol = random_solution(seed, branch)
    assert residual_phi(sol.consts, sol.u).is_zero()
    assert sol.u.total_degree() == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_draw_property(seed):
    rng = random.Random(seed)
    c = random_free_params(rng, MODIFIED)
    sol = instantiate_cubic_modified(c)
    assert residual_phi(MODIFIED, sol.u).is_zero()
    # the specialised relations agree with the general ones at a=c=0, b=1
    general = dependent_coefficients(MODIFIED, c)
    special = dependent_coefficients_modified(c)
    assert all(general[k] == special[k] for k in DEPENDENT)


def test_worked_instance_frozen(worked):
    # frozen from the sympy elimination oracle
    assert worked.u == parse_mpoly("z1^2 z2 + 3*z1^2 z4 + z1 z2^2 + 2*z1 z2 z4 + 3*z1 z4^2 + z2^2 z4 + z2 z4^2 + z4^3")
    assert worked.jet().delta == parse_mpoly("6*z1 + 2*z2 + 6*z4")
    assert worked.delta_param == 2
    assert C4_NOTE in worked.notes


@pytest.mark.parametrize(
    "free, name",
    [({5: 0, 17: 1}, "c5"), ({5: 1, 17: 0}, "c17"), ({5: 1, 17: 3, 19: 3, 29: 1}, "delta")],
)
def test_guards_name_the_parameter(free, name):
    with pytest.raises(ParameterError) as exc:
        instantiate_cubic_modified(free)
    assert exc.value.name == name


def test_b_zero_rejected():
    with pytest.raises(ParameterError) as exc:
        instantiate_cubic(EquationConstants(1, 0, 1), {5: 1, 17: 1, 29: 1})
    assert exc.value.name == "b"


def test_floats_refused():
    with pytest.raises(TypeError):
        instantiate_cubic_modified({5: 1.0, 17: 1, 29: 1})


def test_unknown_free_parameter():
    with pytest.raises(ParameterError):
        instantiate_cubic_modified({2: 1, 5: 1, 17: 1, 29: 1})


# -- elimination oracle -----------------------------------------------------------


@pytest.fixture(scope="module")
def symbolic_report():
    return rederive_constraints(None)


def test_rederivation_matches_every_printed_relation(symbolic_report):
    r = symbolic_report
    assert r.resolved == sorted(DEPENDENT)
    assert all(v == "match" for v in r.comparisons.values())
    assert all(v == "match" for v in r.modified_comparisons.values())
    assert r.residual_zero
    assert sorted(r.forced_zero) == [10, 26]


def test_c4_reading(symbolic_report):
    assert "coefficient c5" in symbolic_report.c4_verdict
    assert sp.simplify(symbolic_report.derived[4] - 3 * C[29] * C[5] ** 2 / C[17] ** 2) == 0


def test_c10_is_free(symbolic_report):
    r = symbolic_report
    assert r.extension_residual_zero
    # frozen from the oracle: c26 follows c10 on the extension
    assert sp.simplify(r.extension[26] - C[10] * C[17] / (2 * C[5])) == 0
    assert "c10 is not forced" in r.branch_note


def test_modified_specialisation_frozen():
    r = rederive_constraints(MODIFIED)
    d = 3 * C[17] * C[29] - C[19] ** 2
    expected_c30 = C[17] * (6 * C[14] * C[17] * C[29] - 2 * C[14] * C[19] ** 2 + 3 * C[29] * C[8]) / (4 * C[5] * d)
    assert sp.simplify(r.derived[30] - expected_c30) == 0
    assert r.derived[3] == 0
    assert not r.discrepancies()


def test_numeric_constants_rederivation():
    r = rederive_constraints(EquationConstants(2, Q(1, 3), -1))
    assert r.residual_zero
    assert all(v == "match" for v in r.comparisons.values())


def test_exact_coefficients_agree_with_oracle():
    """Instantiated coefficients equal the oracle's formulas evaluated at the draw."""
    r = rederive_constraints(None)
    sol = random_solution(4, "generic")
    subs = {sp.Symbol("a"): sp.Rational(str(sol.consts.a)), sp.Symbol("b"): sp.Rational(str(sol.consts.b)), sp.Symbol("c"): sp.Rational(str(sol.consts.c))}
    subs.update({C[i]: sp.Rational(str(sol.coeffs[i])) for i in FREE})
    for k in DEPENDENT:
        assert r.derived[k].subs(subs) == sp.Rational(str(sol.coeffs[k]))


def test_perturbed_cubic_is_not_a_solution():
    sol = worked_instance()
    coeffs = dict(sol.coeffs)
    coeffs[9] += 1
    assert not residual_phi(MODIFIED, assemble_cubic(coeffs)).is_zero()


# -- singular hyperplane -----------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_locus_is_an_affine_hyperplane_free_of_z3(seed):
    for branch in ("modified", "generic"):
        rep = singular_locus(random_solution(seed, branch))
        assert rep.affine and rep.z3_free


@pytest.mark.parametrize("seed", range(4))
def test_printed_locus(seed):
    assert singular_locus(random_solution(seed, "modified")).printed_matches
    sol = random_solution(seed, "generic")
    gen = singular_locus(sol)
    # the printed generic polynomial needs 3a (not 6a) in its constant term
    assert gen.corrected_ratio is not None
    assert gen.printed_matches == (sol[8] * sol[29] == 0)
