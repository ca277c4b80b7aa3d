import pytest
import sys
import os

# Adjust import path based on structure
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from fpure_cli.errors import ExponentOverflowError, PolynomialSyntaxError, UnknownVariableError
from fpure_cli.parser import parse_generators, parse_poly
from fpure_cli.poly import RingContext


# --- Fixtures ---

@pytest.fixture
def ring():
    return RingContext.create(3, "x,y,z,w")


# --- Parsing ---

def test_parse_quadric(ring):
    f = parse_poly("x^2 - w^2*(y^2 + z^2)", ring)
    assert len(f) == 3
    assert sorted(f.terms.values()) == [1, 2, 2]
    assert f.terms[(2, 0, 0, 0)] == 1
    assert f.terms[(0, 2, 0, 2)] == 2


def test_canonical_form_is_stable(ring):
    f = parse_poly("  -w^2*y^2 +x^2-   z^2 * w^2 ", ring)
    g = parse_poly("x^2 - w^2*(y^2 + z^2) + 3*x*y", ring)
    assert str(f) == str(g)
    assert str(parse_poly(str(f), ring)) == str(f)


@pytest.mark.parametrize("text,expected", [
    ("0", "0"),
    ("4", "1"),
    ("-x", "2*x"),
    ("-(x + y)^3", "2*x^3 + 2*y^3"),
    ("(x*y)^2*z", "x^2*y^2*z"),
    ("2*3*x", "0"),
    ("x - x", "0"),
    ("((x))", "x"),
])
def test_parse_values(ring, text, expected):
    assert str(parse_poly(text, ring)) == expected


@pytest.mark.parametrize("text,position", [
    ("x y", 2),
    ("2x", 1),
    ("x +", 3),
    ("", 0),
    ("x^y", 2),
    ("(x + y", 6),
    ("x $ y", 2),
    ("x)", 1),
])
def test_syntax_errors_report_position(ring, text, position):
    with pytest.raises(PolynomialSyntaxError) as excinfo:
        parse_poly(text, ring)
    assert excinfo.value.position == position
    assert f"at position {position}" in str(excinfo.value)


def test_implicit_multiplication_rejected(ring):
    with pytest.raises(PolynomialSyntaxError, match="expected an operator, found 'y'"):
        parse_poly("x y", ring)


def test_unknown_variable(ring):
    with pytest.raises(UnknownVariableError, match="'v'"):
        parse_poly("x + v", ring)


def test_exponent_overflow(ring):
    with pytest.raises(ExponentOverflowError):
        parse_poly("x^3000000000", ring)
    with pytest.raises(ExponentOverflowError):
        parse_poly("(x^70000)^70000", ring)


def test_huge_power_of_a_sum_rejected(ring):
    with pytest.raises(ExponentOverflowError, match="too large to expand"):
        parse_poly("(x+y)^2147483647", ring)
    assert parse_poly("(x+y)^3", ring) == parse_poly("x^3 + y^3", ring)
    assert parse_poly("(0)^5", ring) == 0


def test_non_string_input(ring):
    with pytest.raises(PolynomialSyntaxError):
        parse_poly(42, ring)


def test_parse_generators(ring):
    gens = parse_generators(["x*y", "z^2 - w"], ring)
    assert [str(g) for g in gens] == ["x*y", "z^2 + 2*w"]
