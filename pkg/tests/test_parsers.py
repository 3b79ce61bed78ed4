from fractions import Fraction

import pytest

from cli.services.expression_parser import ExpressionParser
from cli.services.theory_parser import TheoryParser
from core.errors import ParseError
from core.models.graded_coordinate import CoordinateSystem
from core.models.poly import Poly


@pytest.fixture
def system():
    return CoordinateSystem.from_specs([("x1", 0), ("x2", 0), ("p1", 1), ("p2", 1)])


def test_parse_bivector_term(system):
    """1/2 * x1 * p1 * p2 is the expected monomial"""
    poly = ExpressionParser.parse("1/2 * x1 * p1 * p2", system)
    assert poly.coefficient({"x1": 1, "p1": 1, "p2": 1}) == Fraction(1, 2)
    assert len(poly) == 1


def test_parse_respects_precedence(system):
    """Powers bind tighter than products, products tighter than sums"""
    x1 = Poly.coordinate(system, "x1")
    x2 = Poly.coordinate(system, "x2")
    assert ExpressionParser.parse("-x1^2 + 3*(x1 - x2)", system) == -(x1 * x1) + (x1 - x2) * 3


def test_parse_hbar_and_imaginary_unit(system):
    """hbar accepts negative powers, I is the imaginary unit"""
    poly = ExpressionParser.parse("I*hbar^-1*x1", system)
    expected = Poly.imaginary_unit(system) * Poly.hbar(system, -1) * Poly.coordinate(system, "x1")
    assert poly == expected


def test_odd_generators_anticommute_in_input(system):
    assert ExpressionParser.parse("p1*p2 + p2*p1", system).is_zero()


@pytest.mark.parametrize("text", ["x1^2 - 3/4*x2*p1*p2", "I*hbar*x1 - hbar^2", "-x2^3 + 5/3"])
def test_printed_form_parses_back(system, text):
    poly = ExpressionParser.parse(text, system)
    assert ExpressionParser.parse(str(poly), system) == poly


@pytest.mark.parametrize("text,column,fragment", [
    ("x1 + p1^2", 6, "odd power"),
    ("x1 + y", 6, "unknown identifier 'y'"),
    ("2 x1", 3, "implicit multiplication"),
    ("x1 / x2", 4, "rational constants"),
    ("x1 / 0", 4, "division by zero"),
    ("x1^-1", 5, "negative exponents"),
    ("(x1 + x2", 9, "expected ')'"),
    ("x1 $ 2", 4, "unexpected character"),
])
def test_expression_errors_are_located(system, text, column, fragment):
    """Errors point at the offending token"""
    with pytest.raises(ParseError) as info:
        ExpressionParser.parse(text, system, line=7)
    assert info.value.line == 7
    assert info.value.column == column
    assert fragment in info.value.message


def test_expression_column_offset(system):
    """A starting column shifts reported positions"""
    with pytest.raises(ParseError) as info:
        ExpressionParser.parse("z", system, column=10)
    assert info.value.column == 10


def test_empty_expression(system):
    with pytest.raises(ParseError):
        ExpressionParser.parse("   ", system)


THEORY_TEXT = """\
# comment line
[theory]
name = demo

[target]
kind = psm
dimension = 2
pi12 = 1   # trailing comment
"""


def test_theory_sections_and_positions():
    spec = TheoryParser.parse_text(THEORY_TEXT)
    assert list(spec.sections) == ["theory", "target"]
    assert spec.get("target", "pi12") == "1"
    entry = spec.entry("target", "dimension")
    assert (entry.line, entry.column) == (7, 13)
    assert spec.keys("target", "pi") == ["pi12"]
    assert spec.get("checks", "run", "cme") == "cme"


def test_missing_key_points_at_section():
    spec = TheoryParser.parse_text(THEORY_TEXT)
    with pytest.raises(ParseError) as info:
        spec.entry("target", "lie")
    assert info.value.line == 5


@pytest.mark.parametrize("text,line,fragment", [
    ("[theory]\nname = a\n[gauge]\n", 3, "unknown section"),
    ("[theory]\nname = a\nname = b\n", 3, "duplicate key"),
    ("[theory]\n[theory]\n", 2, "duplicate section"),
    ("name = a\n[theory]\n", 1, "before the first section"),
    ("[theory]\nname =\n", 2, "empty value"),
    ("[theory]\ncolour = red\n", 2, "unknown key"),
    ("[theory]\njust words\n", 2, "expected '[section]'"),
    ("# nothing\n\n", 1, "no sections"),
])
def test_theory_file_errors(text, line, fragment):
    with pytest.raises(ParseError) as info:
        TheoryParser.parse_text(text, "demo.theory")
    assert info.value.line == line
    assert fragment in info.value.message
    assert str(info.value).startswith("demo.theory: ")


def test_prefix_keys_need_a_suffix():
    """'pi' alone is not a bivector key"""
    with pytest.raises(ParseError):
        TheoryParser.parse_text("[target]\npi = 1\n")


def test_parse_missing_file(tmp_path):
    with pytest.raises(ParseError) as info:
        TheoryParser.parse_file(tmp_path / "absent.theory")
    assert "cannot read file" in info.value.message


def test_bundled_theories_parse(theories_dir):
    for path in sorted(theories_dir.glob("*.theory")):
        spec = TheoryParser.parse_file(path)
        assert spec.has("checks", "run")
