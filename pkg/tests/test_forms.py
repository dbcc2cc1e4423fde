import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavenly.arith import MPoly, Q, RatFn, parse_mpoly
from heavenly.forms import (
    KForm,
    VField,
    evaluate_form,
    ext_deriv,
    lie_metric_const,
    pair,
    symmetric_product,
    vf_bracket,
    wedge,
)

coef = st.builds(Q, st.integers(-5, 5), st.integers(1, 3))
exps = st.tuples(*[st.integers(0, 2)] * 4)
polys = st.dictionaries(exps, coef, max_size=4).map(lambda d: RatFn.coerce(MPoly.from_dict(d, 4)))
one_forms = st.lists(polys, min_size=4, max_size=4).map(KForm.one_form)
vfields = st.lists(polys, min_size=4, max_size=4).map(lambda c: VField(tuple(c)))


@settings(max_examples=30, deadline=None)
@given(one_forms, one_forms)
def test_wedge_of_one_forms_is_antisymmetric(a, b):
    assert (wedge(a, b) + wedge(b, a)).is_zero()
    assert wedge(a, a).is_zero()


@settings(max_examples=20, deadline=None)
@given(one_forms, one_forms, one_forms)
def test_wedge_is_associative(a, b, c):
    assert (wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).is_zero()


@settings(max_examples=30, deadline=None)
@given(one_forms)
def test_d_squared_vanishes(a):
    assert ext_deriv(ext_deriv(a)).is_zero()
    f = KForm.scalar(a[(0,)])
    assert ext_deriv(ext_deriv(f)).is_zero()


@settings(max_examples=20, deadline=None)
@given(one_forms, one_forms)
def test_graded_leibniz(a, b):
    lhs = ext_deriv(wedge(a, b))
    rhs = wedge(ext_deriv(a), b) - wedge(a, ext_deriv(b))
    assert (lhs - rhs).is_zero()


def test_dz_pairs_with_coordinate_fields():
    for i in range(4):
        for j in range(4):
            val = pair(KForm.dz(i), VField.coordinate(j))
            assert (val - (1 if i == j else 0)).is_zero()


def test_evaluate_volume_form():
    vol = KForm.volume(1)
    e = [VField.coordinate(i) for i in range(4)]
    # 1/4! normalisation
    assert (evaluate_form(vol, *e) - Q(1, 24)).is_zero()
    assert (evaluate_form(vol, e[1], e[0], e[2], e[3]) + Q(1, 24)).is_zero()


@settings(max_examples=20, deadline=None)
@given(vfields, vfields)
def test_bracket_antisymmetric(x, y):
    assert (vf_bracket(x, y) + vf_bracket(y, x)).is_zero()


@settings(max_examples=10, deadline=None)
@given(vfields, vfields, vfields)
def test_jacobi(x, y, z):
    total = vf_bracket(x, vf_bracket(y, z)) + vf_bracket(y, vf_bracket(z, x)) + vf_bracket(z, vf_bracket(x, y))
    assert total.is_zero()


def test_symmetric_product_of_differentials():
    m = symmetric_product(KForm.dz(0), KForm.dz(2))
    assert (m[0][2] - Q(1, 2)).is_zero() and (m[2][0] - Q(1, 2)).is_zero()
    assert m[0][0].is_zero()


def test_lie_derivative_of_translation_invariant_metric():
    z = parse_mpoly("z2 + z3")
    g = [[RatFn.coerce(z if i == j else 0) for j in range(4)] for i in range(4)]
    assert all(x.is_zero() for row in lie_metric_const(g, VField.coordinate(0)) for x in row)
    lie = lie_metric_const(g, VField((0, 1, -1, 0)))
    assert all(x.is_zero() for row in lie for x in row)
    lie = lie_metric_const(g, VField.coordinate(1))
    assert (lie[0][0] - 1).is_zero()


def test_lie_derivative_rejects_nonconstant_field():
    with pytest.raises(ValueError):
        lie_metric_const([[RatFn.coerce(0)] * 4] * 4, VField((parse_mpoly("z1"), 0, 0, 0)))


def test_kform_rejects_bad_indices():
    with pytest.raises(ValueError):
        KForm(2, {(1, 0): 1})
    with pytest.raises(ValueError):
        KForm(5)
