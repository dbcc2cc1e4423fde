from fractions import Fraction

import gmpy2
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from heavenly.arith import (
    ArityError,
    ChartMismatch,
    DeltaScalar,
    HalfPowerParity,
    MPoly,
    Q,
    RatFn,
    delta_scalar_mul,
    mpoly_arith,
    mpoly_eval,
    mpoly_partial,
    parse_mpoly,
    ratfn_equal,
)
from heavenly.arith.mpoly import pack, unpack

Z = sp.symbols("z1:5")

rationals = st.builds(Q, st.integers(-20, 20), st.integers(1, 6))
exps = st.tuples(*[st.integers(0, 3)] * 4)
polys = st.dictionaries(exps, rationals, max_size=6).map(lambda d: MPoly.from_dict(d, 4))
nonzero = st.dictionaries(exps, st.builds(Q, st.integers(1, 20), st.integers(1, 6)), min_size=1, max_size=4).map(
    lambda d: MPoly.from_dict(d, 4)
)
points = st.tuples(*[rationals] * 4)


def to_sympy(p: MPoly):
    return sum(
        (sp.Rational(int(c.numerator), int(c.denominator)) * sp.Mul(*[z**e for z, e in zip(Z, ex)]) for ex, c in p.items()),
        sp.Integer(0),
    )


# -- rationals ---------------------------------------------------------------


def test_q_accepts_exact_inputs():
    assert Q(3) == gmpy2.mpq(3)
    assert Q("-3/4") == gmpy2.mpq(-3, 4)
    assert Q(Fraction(2, 6)) == gmpy2.mpq(1, 3)
    assert Q(1, 3) == gmpy2.mpq(1, 3)


@pytest.mark.parametrize("bad", [0.5, "0.5", "1e3", True])
def test_q_refuses_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        Q(bad)


# -- packed keys ---------------------------------------------------------------


@given(exps)
def test_pack_roundtrip(e):
    assert unpack(pack(e), 4) == e


# -- polynomial ring laws ---------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_laws(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_product_matches_sympy(p, q):
    assert sp.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.integers(0, 3))
def test_leibniz(p, q, i):
    assert (p * q).diff(i) == p.diff(i) * q + p * q.diff(i)


@settings(max_examples=60, deadline=None)
@given(polys, st.integers(0, 3), st.integers(0, 3))
def test_partials_commute(p, i, j):
    assert p.diff(i).diff(j) == p.diff(j).diff(i)


@settings(max_examples=60, deadline=None)
@given(polys, polys, points)
def test_evaluation_is_a_homomorphism(p, q, x):
    assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)
    assert (p + q).evaluate(x) == p.evaluate(x) + q.evaluate(x)


@settings(max_examples=60, deadline=None)
@given(polys, nonzero)
def test_divexact_inverts_product(p, q):
    assert (p * q).divexact(q) == p


@settings(max_examples=40, deadline=None)
@given(polys)
def test_to_str_parse_roundtrip(p):
    assert parse_mpoly(p.to_str()) == p


def test_parse_examples():
    p = parse_mpoly("z1^2 z2 - 3/2*z4 + 7")
    assert p.coeff((2, 1, 0, 0)) == 1
    assert p.coeff((0, 0, 0, 1)) == Q(-3, 2)
    assert p.coeff((0, 0, 0, 0)) == 7


def test_compose_substitution():
    z1, z2, z3, z4 = (MPoly.var(i) for i in range(4))
    p = z1 * z1 + z2
    out = p.compose([z3 + z4, z1, z2, z3])
    assert out == (z3 + z4) * (z3 + z4) + z1


def test_arity_mismatch_raises():
    with pytest.raises(ArityError):
        MPoly.var(0, 4) + MPoly.var(0, 2)
    with pytest.raises(ArityError):
        MPoly.var(5, 4)


def test_functional_api():
    p, q = parse_mpoly("z1 + z2"), parse_mpoly("z1 - z2")
    assert mpoly_arith(p, q, "mul") == parse_mpoly("z1^2 - z2^2")
    assert mpoly_partial(p, 0) == MPoly.const(1)
    assert mpoly_eval(p, [1, 2, 0, 0]) == 3


def test_sqrt_and_linear_root():
    p = parse_mpoly("z1 + 2*z2 - 1")
    assert (p * p).sqrt() in (p, -p)
    assert parse_mpoly("z1^2 + z2").sqrt() is None


# -- rational functions -----------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(polys, nonzero, nonzero)
def test_ratfn_cancellation(p, q, r):
    assert ratfn_equal(RatFn(p * r, q * r), RatFn(p, q))


@settings(max_examples=40, deadline=None)
@given(polys, nonzero, polys, nonzero, st.integers(0, 3))
def test_ratfn_quotient_rule(a, b, c, d, i):
    f, g = RatFn(a, b), RatFn(c, d)
    assert ((f * g).diff(i) - (f.diff(i) * g + f * g.diff(i))).is_zero()
    assert ((f + g) - (g + f)).is_zero()


def test_ratfn_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        RatFn(MPoly.const(1), MPoly.zero())


def test_ratfn_den_degree():
    d = parse_mpoly("z1 + z2")
    r = RatFn(MPoly.const(1), d * d * d)
    assert r.den_degree_in(d) == 3
    assert (r * RatFn.coerce(d)).den_degree_in(d) == 2


def test_ratfn_evaluate_matches_sympy():
    p, q = parse_mpoly("z1^2 - z3"), parse_mpoly("z2 + 2*z4 + 1")
    x = [Q(1, 2), Q(3), Q(-1), Q(2, 3)]
    val = RatFn(p, q).evaluate(x)
    expect = (to_sympy(p) / to_sympy(q)).subs(dict(zip(Z, [sp.Rational(int(v.numerator), int(v.denominator)) for v in x])))
    assert sp.Rational(int(val.numerator), int(val.denominator)) == expect


# -- |Delta| half powers ------------------------------------------------------------


def test_delta_scalar_even_powers_collapse():
    delta = RatFn.coerce(parse_mpoly("z1 + z2"))
    s = DeltaScalar.of(1, 2, -1, delta)
    assert s.is_collapsible()
    assert (s.collapse() + delta).is_zero()  # |Delta| = -Delta on s = -1


def test_delta_scalar_product_adds_powers():
    delta = RatFn.coerce(parse_mpoly("z1 + z2"))
    a = DeltaScalar.of(2, 1, 1, delta)
    b = DeltaScalar.of(3, -1, 1, delta)
    prod = delta_scalar_mul(a, b)
    assert prod.is_collapsible()
    assert (prod.collapse() - 6).is_zero()


def test_delta_scalar_chart_mismatch():
    delta = RatFn.coerce(parse_mpoly("z1"))
    with pytest.raises(ChartMismatch):
        delta_scalar_mul(DeltaScalar.of(1, 1, 1, delta), DeltaScalar.of(1, 1, -1, delta))


def test_delta_scalar_odd_power_does_not_collapse():
    delta = RatFn.coerce(parse_mpoly("z1"))
    with pytest.raises(HalfPowerParity):
        DeltaScalar.of(1, 1, 1, delta).collapse()
