import itertools

import pytest
from hypothesis import given, strategies as st

from qfactor.polynomial import BinaryPolynomial, format_poly, var_info, var_key

NAMES = ["p1", "p2", "q1", "q2", "c1_2", "z"]

monomials = st.frozensets(st.sampled_from(NAMES), max_size=3)
polys = st.dictionaries(monomials, st.integers(-5, 5), max_size=6).map(
    lambda d: sum((BinaryPolynomial.monomial(m, c) for m, c in d.items()), BinaryPolynomial())
)
assignments = st.fixed_dictionaries({v: st.integers(0, 1) for v in NAMES})


def test_idempotent_product():
    x = BinaryPolynomial.var("p1")
    assert x * x == x
    assert (1 - x) * x == 0


def test_format_matches_equation_syntax():
    q1, q3 = BinaryPolynomial.var("q1"), BinaryPolynomial.var("q3")
    assert format_poly(q1 + q3 - 2 * q1 * q3) == "q1 + q3 - 2 q1*q3"
    assert format_poly(BinaryPolynomial()) == "0"
    assert format_poly(-q1 + 1) == "-q1 + 1"


def test_variable_kinds_and_order():
    assert var_info("q12").kind == "factor-bit" and var_info("q12").bit == 12
    assert var_info("c3_5").kind == "carry" and var_info("c3_5").dest == 5
    assert var_info("z").kind == "aux"
    assert sorted(["c1_2", "z", "q1", "p2", "p10"], key=var_key) == ["p2", "p10", "q1", "z", "c1_2"]


@given(polys, polys, assignments)
def test_arithmetic_commutes_with_evaluation(a, b, x):
    assert (a + b).evaluate(x) == a.evaluate(x) + b.evaluate(x)
    assert (a - b).evaluate(x) == a.evaluate(x) - b.evaluate(x)
    assert (a * b).evaluate(x) == a.evaluate(x) * b.evaluate(x)


@given(polys, polys, assignments)
def test_substitute_matches_composed_evaluation(a, repl, x):
    mapping = {"p1": repl}
    x2 = dict(x, p1=repl.evaluate(x))
    # only a consistent 0/1 value is a valid substitution target
    if x2["p1"] in (0, 1):
        assert a.substitute(mapping).evaluate(x) == a.evaluate(x2)


@given(polys)
def test_bounds_enclose_every_value(a):
    lo, hi = a.bounds()
    for bits in itertools.product((0, 1), repeat=len(NAMES)):
        assert lo <= a.evaluate(dict(zip(NAMES, bits))) <= hi


@given(polys)
def test_normalized_has_same_zero_set(a):
    n = a.normalized()
    for bits in itertools.product((0, 1), repeat=len(NAMES)):
        x = dict(zip(NAMES, bits))
        assert (a.evaluate(x) == 0) == (n.evaluate(x) == 0)


def test_mixing_with_floats_is_rejected():
    with pytest.raises(TypeError):
        BinaryPolynomial.var("p1") + 0.5
