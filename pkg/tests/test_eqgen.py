import pytest
from hypothesis import given, strategies as st

from qfactor.eqgen import (
    EquationSyntaxError,
    FactorLayout,
    LayoutError,
    format_system,
    generate_biprime_system,
    infer_layout,
    layout_candidates,
    parse_equations,
    strip_twos,
)
from qfactor.pipeline import bundled_equations, read_equations
from qfactor.simplify import brute_force_solutions

from conftest import arithmetic_pairs, odd_semiprimes


def bits_of(value, width, letter):
    return {f"{letter}{i}": (value >> i) & 1 for i in range(1, width + 1)}


def carries_for(system, assignment):
    """Extend a factor-bit assignment with the carry values that satisfy the columns, by search."""
    from qfactor.simplify import search_solutions

    eqs = [eq.substitute(assignment) for eq in system.equations]
    rest = [v for v in system.variables if v not in assignment]
    sols = list(search_solutions(eqs, rest, limit=2))
    return [dict(assignment, **dict(zip(rest, s))) for s in sols]


def test_strip_twos():
    assert strip_twos(8176918) == (4088459, 1)
    assert strip_twos(7) == (7, 0)


def test_true_factors_satisfy_the_4088459_columns():
    system = generate_biprime_system(4088459, 9, 9)
    extended = carries_for(system, {**bits_of(2017, 9, "p"), **bits_of(2027, 9, "q")})
    assert len(extended) == 1
    assert system.is_satisfied(extended[0])


def test_wrong_factors_violate_the_columns():
    system = generate_biprime_system(4088459, 9, 9)
    assert carries_for(system, {**bits_of(2019, 9, "p"), **bits_of(2027, 9, "q")}) == []


@pytest.mark.parametrize("N", [143, 323, 437, 899])
def test_solutions_are_exactly_the_factor_pairs(N):
    for m, n in layout_candidates(N):
        system = generate_biprime_system(N, m, n)
        pairs = set()
        for sol in brute_force_solutions(system):
            x = dict(zip(system.variables, sol))
            p = 1 | (1 << (m + 1)) | sum(x[f"p{i}"] << i for i in range(1, m + 1))
            q = 1 | (1 << (n + 1)) | sum(x[f"q{i}"] << i for i in range(1, n + 1))
            pairs.add((p, q))
        assert pairs == arithmetic_pairs(N, m, n)


def test_layout_candidates_prefer_balanced():
    assert layout_candidates(4088459)[0] == (9, 9)
    assert layout_candidates(966887)[0] == (8, 8)
    for m, n in layout_candidates(999):
        assert m <= n and FactorLayout(999, (m, n)).admits()


def test_layout_errors():
    with pytest.raises(LayoutError):
        generate_biprime_system(7, 0, 0)
    with pytest.raises(LayoutError):
        generate_biprime_system(143, 3, 1)
    with pytest.raises(LayoutError):
        generate_biprime_system(143, 0, 0)


def test_even_input_keeps_the_twos():
    system = generate_biprime_system(8176918, 9, 9)
    assert system.layout.twos == 1 and system.layout.N == 4088459


@given(st.sampled_from(odd_semiprimes(2000)), st.data())
def test_format_parse_round_trip(N, data):
    m, n = data.draw(st.sampled_from(layout_candidates(N)))
    system = generate_biprime_system(N, m, n)
    assert parse_equations(format_system(system)) == system


def test_dsl_175():
    system = parse_equations(read_equations("175")[0])
    assert system.variables == ["p1", "q1", "r1"]
    assert [str(e) for e in system.equations] == ["p1 + q1 + r1 - 1", "p1*q1 + p1*r1 + q1*r1"]
    assert infer_layout(175, system.variables) == FactorLayout(175, (1, 1, 1))


def test_bundled_files_parse():
    assert bundled_equations() == ["175.eqs", "4088459.eqs", "966887.eqs"]
    for name in bundled_equations():
        parse_equations(read_equations(name)[0])


def test_dsl_statement_separators_and_comments():
    text = "vars a b  # two\na + b = 1; 2 a*b = 0\n\n3*a = 3 b"
    system = parse_equations(text)
    assert [str(e) for e in system.equations] == ["a + b - 1", "2 a*b", "3 a - 3 b"]


@pytest.mark.parametrize(
    "text, line, column, fragment",
    [
        ("vars a b\na + 1.5 b = 1", 2, 5, "non-integer"),
        ("vars a b\na + c = 1", 2, 5, "unknown variable"),
        ("vars a\na + = 1", 2, 5, "expected variable"),
        ("vars a\na 1", 2, 3, "expected '='"),
        ("a + b = 1", 1, 1, "vars"),
        ("vars a\na = 1 $", 2, 7, "unexpected character"),
    ],
)
def test_dsl_errors_report_position(text, line, column, fragment):
    with pytest.raises(EquationSyntaxError) as info:
        parse_equations(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert fragment in str(info.value)
