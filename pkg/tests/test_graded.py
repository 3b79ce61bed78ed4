from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from core.algorithms.graded.fiber_integration import FiberIntegration, all_pairings
from core.algorithms.graded.graded_algebra import GradedAlgebra
from core.errors import GradedAlgebraError
from core.models.derivation import Derivation
from core.models.graded_coordinate import CoordinateSystem
from core.models.poly import Poly
from core.models.scalar import Scalar


def to_sympy(poly, symbols):
    """Even polynomial without hbar or i as a sympy expression."""
    expr = sp.Integer(0)
    for (mono, k, im), value in poly.items():
        assert k == 0 and im == 0
        term = sp.Rational(value.numerator, value.denominator)
        for idx, exp in mono:
            term *= symbols[idx] ** exp
        expr += term
    return sp.expand(expr)


def test_scalar_imaginary_unit_squares_to_minus_one():
    """i * i = -1 and hbar powers add"""
    assert Scalar.i() * Scalar.i() == Scalar.of(-1)
    assert Scalar.hbar(2) * Scalar.hbar(-1) == Scalar.hbar()
    assert (Scalar.hbar() * 3).evaluate(0.5) == pytest.approx(1.5)


def test_scalar_rational_rejects_hbar():
    """Only purely rational scalars convert to Fraction"""
    assert Scalar.of(Fraction(2, 3)).rational() == Fraction(2, 3)
    with pytest.raises(ValueError):
        (Scalar.hbar() + 1).rational()


def test_odd_coordinates_anticommute(mixed_system):
    """xi eta = -eta xi and xi^2 = 0"""
    xi = Poly.coordinate(mixed_system, "xi")
    eta = Poly.coordinate(mixed_system, "eta")
    assert xi * eta == -(eta * xi)
    assert (xi * xi).is_zero()
    assert (xi * eta).degree() == 2


def test_odd_power_rejected(mixed_system):
    """A monomial with an odd coordinate squared cannot be built"""
    with pytest.raises(GradedAlgebraError):
        Poly.monomial(mixed_system, {"xi": 2})


def test_even_product_matches_sympy():
    """Products of even polynomials agree with sympy expansion"""
    system = CoordinateSystem.from_specs([("x", 0), ("y", 0)])
    x, y = (Poly.coordinate(system, n) for n in ("x", "y"))
    sx, sy = sp.symbols("x y")
    f = x * x + y * Fraction(3, 2) - 1
    g = x * y * 2 + y * y * y
    assert to_sympy(f * g, [sx, sy]) == sp.expand((sx**2 + sp.Rational(3, 2) * sy - 1) * (2 * sx * sy + sy**3))
    assert to_sympy(f ** 3, [sx, sy]) == sp.expand((sx**2 + sp.Rational(3, 2) * sy - 1) ** 3)


def test_left_derivative_signs(mixed_system):
    """The left derivative moves the coordinate to the front first"""
    xi = Poly.coordinate(mixed_system, "xi")
    eta = Poly.coordinate(mixed_system, "eta")
    x = Poly.coordinate(mixed_system, "x")
    f = x * xi * eta
    assert GradedAlgebra.derive("xi", f) == x * eta
    assert GradedAlgebra.derive("eta", f) == -(x * xi)
    assert f.right_derive("eta") == x * xi


def test_derivative_is_graded_leibniz(mixed_system):
    """d(fg) = d(f) g + (-1)^{|f|} f d(g) for an odd coordinate"""
    x, y, xi, eta = (Poly.coordinate(mixed_system, n) for n in ("x", "y", "xi", "eta"))
    f = x * xi + y * eta
    g = xi * eta * x + y * y
    lhs = (f * g).derive("eta")
    rhs = f.derive("eta") * g - f * g.derive("eta")
    assert lhs == rhs


def test_truncation_drops_high_fiber_weight():
    """Terms above the truncation order in fiber coordinates vanish"""
    system = CoordinateSystem.from_specs([("x", 0), ("p", 0, "fiber")])
    x = Poly.coordinate(system, "x", order=2)
    p = Poly.coordinate(system, "p", order=2)
    assert (p * p * p).is_zero()
    assert not (x * x * x * p * p).is_zero()
    assert (p * p + p).order == 2
    assert (p * p).truncate(1).is_zero()


def test_substitute_composes(mixed_system):
    """Substituting x -> x + y into x^2 gives the expanded square"""
    x, y = (Poly.coordinate(mixed_system, n) for n in ("x", "y"))
    result = GradedAlgebra.substitute(x * x, {"x": x + y})
    assert result == x * x + x * y * 2 + y * y


def test_substitute_rejects_wrong_degree(mixed_system):
    """Images must have the degree of the coordinate they replace"""
    x = Poly.coordinate(mixed_system, "x")
    xi = Poly.coordinate(mixed_system, "xi")
    with pytest.raises(GradedAlgebraError):
        GradedAlgebra.substitute(x * x, {"x": xi})


def test_system_mismatch_raises(mixed_system):
    """Products across coordinate systems are refused"""
    other = CoordinateSystem.from_specs([("x", 0)])
    with pytest.raises(GradedAlgebraError):
        GradedAlgebra.poly_mul(Poly.coordinate(mixed_system, "x"), Poly.coordinate(other, "x"))


def test_derivation_bracket_of_odd_field_with_itself(mixed_system):
    """[Q, Q] = 2 Q^2 for an odd derivation"""
    x, y, xi, eta = (Poly.coordinate(mixed_system, n) for n in ("x", "y", "xi", "eta"))
    q = Derivation(mixed_system, 1, {"x": xi, "y": eta * x})
    square = GradedAlgebra.lie_bracket(q, q)
    f = x * y
    assert square.apply(f) == q.apply(q.apply(f)) * 2


def test_berezin_integral_of_top_form(mixed_system):
    """The integral of xi d(xi) is 1 and lower forms integrate to 0"""
    xi = Poly.coordinate(mixed_system, "xi")
    eta = Poly.coordinate(mixed_system, "eta")
    x = Poly.coordinate(mixed_system, "x")
    assert FiberIntegration.berezin_integral(xi, ["xi"]) == 1
    assert FiberIntegration.berezin_integral(x * eta * xi, ["xi", "eta"]) == x
    assert FiberIntegration.berezin_integral(x * xi, ["xi", "eta"]).is_zero()


def test_berezin_over_even_coordinate_rejected(mixed_system):
    """Berezin integration needs odd variables"""
    with pytest.raises(GradedAlgebraError):
        FiberIntegration.berezin_integral(Poly.coordinate(mixed_system, "x"), ["x"])


@pytest.mark.parametrize("power,expected", [(0, 1), (1, 0), (2, 1), (4, 3), (6, 15)])
def test_wick_moments_of_unit_gaussian(power, expected):
    """Gaussian moments are the double factorials"""
    system = CoordinateSystem.from_specs([("x", 0)])
    x = Poly.coordinate(system, "x")
    assert FiberIntegration.wick_moment({("x", "x"): 1}, x ** power) == Scalar.of(expected)


def test_wick_moment_with_scalar_covariance():
    """A covariance of i hbar gives <x^2> = i hbar and <x y> from off-diagonal entries"""
    system = CoordinateSystem.from_specs([("x", 0), ("y", 0)])
    x, y = (Poly.coordinate(system, n) for n in ("x", "y"))
    cov = {("x", "x"): Scalar.hbar() * Scalar.i(), ("x", "y"): 2, ("y", "y"): 1}
    assert FiberIntegration.wick_moment(cov, x * x) == Scalar.hbar() * Scalar.i()
    assert FiberIntegration.wick_moment(cov, x * y) == Scalar.of(2)


def test_wick_moment_rejects_odd_and_missing(mixed_system):
    """Odd coordinates and coordinates without covariance are errors"""
    xi = Poly.coordinate(mixed_system, "xi")
    y = Poly.coordinate(mixed_system, "y")
    with pytest.raises(GradedAlgebraError):
        FiberIntegration.wick_moment({("x", "x"): 1}, xi)
    with pytest.raises(GradedAlgebraError):
        FiberIntegration.wick_moment({("x", "x"): 1}, y * y)


def test_all_pairings_count():
    """(2n-1)!! perfect matchings"""
    assert len(list(all_pairings("abcd"))) == 3
    assert len(list(all_pairings("abcdef"))) == 15


def random_poly(system, seed, terms=5):
    rng = np.random.default_rng(seed)
    result = Poly.zero(system)
    for _ in range(terms):
        exponents = {c.name: int(rng.integers(0, 2 if c.is_odd else 3)) for c in system}
        result = result + Poly.monomial(system, exponents, Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 3))))
    return result


@pytest.mark.parametrize("seed", range(5))
def test_product_is_associative(mixed_system, seed):
    f, g, h = (random_poly(mixed_system, seed + k) for k in (0, 10, 20))
    assert (f * g) * h == f * (g * h)


@pytest.mark.parametrize("seed", range(5))
def test_product_is_graded_commutative(mixed_system, seed):
    """f g = (-1)^{|f||g|} g f on homogeneous parts"""
    for df, f in random_poly(mixed_system, seed).homogeneous_parts().items():
        for dg, g in random_poly(mixed_system, seed + 10).homogeneous_parts().items():
            sign = -1 if (df * dg) % 2 else 1
            assert f * g == g * f * sign


@pytest.mark.parametrize("degree,components", [
    (1, {"x": "xi", "y": "eta*x"}),
    (0, {"x": "y", "xi": "eta*y"}),
    (-1, {"xi": "x", "eta": "y*y"}),
])
def test_derivation_leibniz_rule(mixed_system, degree, components):
    """D(fg) = D(f) g + (-1)^{|D||f|} f D(g)"""
    coords = {n: Poly.coordinate(mixed_system, n) for n in mixed_system.names}
    comps = {}
    for name, text in components.items():
        value = Poly.constant(mixed_system, 1)
        for factor in text.split("*"):
            value = value * coords[factor]
        comps[name] = value
    d = Derivation(mixed_system, degree, comps)
    g = random_poly(mixed_system, 13)
    for df, f in random_poly(mixed_system, 3).homogeneous_parts().items():
        sign = -1 if (degree * df) % 2 else 1
        assert d.apply(f * g) == d.apply(f) * g + f * d.apply(g) * sign


def test_lie_bracket_graded_jacobi(mixed_system):
    """[X, [Y, Z]] = [[X, Y], Z] + (-1)^{|X||Y|} [Y, [X, Z]]"""
    x, y, xi, eta = (Poly.coordinate(mixed_system, n) for n in ("x", "y", "xi", "eta"))
    fields = [
        Derivation(mixed_system, 1, {"x": xi, "y": eta * x}),
        Derivation(mixed_system, 0, {"x": x * y, "xi": eta * y}),
        Derivation(mixed_system, 1, {"y": xi * x, "x": eta}),
        Derivation(mixed_system, -1, {"xi": x, "eta": y * y}),
    ]
    bracket = GradedAlgebra.lie_bracket
    coords = [x, y, xi, eta]
    for a in fields:
        for b in fields:
            for c in fields:
                sign = -1 if (a.degree * b.degree) % 2 else 1
                lhs = bracket(a, bracket(b, c))
                rhs = bracket(bracket(a, b), c) + bracket(b, bracket(a, c)).scale(sign)
                for u in coords:
                    assert lhs.apply(u) == rhs.apply(u)


def test_lie_bracket_of_coordinate_fields():
    """[d/dx, x d/dx] = d/dx"""
    system = CoordinateSystem.from_specs([("x", 0)])
    x = Poly.coordinate(system, "x")
    dx = Derivation(system, 0, {"x": Poly.constant(system, 1)})
    euler = Derivation(system, 0, {"x": x})
    assert GradedAlgebra.lie_bracket(dx, euler) == dx


@pytest.mark.parametrize("seed", range(5))
def test_berezin_integration_by_parts(mixed_system, seed):
    """The integral of a derivative in an integrated odd variable vanishes"""
    f = random_poly(mixed_system, seed, terms=8)
    for name in ("xi", "eta"):
        assert FiberIntegration.berezin_integral(f.derive(name), ["xi", "eta"]).is_zero()


def gaussian_moment(cov, exponents):
    """Moment from derivatives of the generating function exp(t C t / 2)."""
    t = sp.symbols(f"t0:{len(exponents)}")
    quadratic = sum(cov[i][j] * t[i] * t[j] for i in range(len(t)) for j in range(len(t))) / 2
    expr = sp.exp(quadratic)
    for i, e in enumerate(exponents):
        if e:
            expr = sp.diff(expr, t[i], e)
    value = sp.Rational(expr.subs({ti: 0 for ti in t}))
    return Fraction(int(value.p), int(value.q))


@pytest.mark.parametrize("seed", range(6))
def test_wick_moments_match_generating_function(seed):
    """Wick pairings agree with the Gaussian generating function up to four variables and degree 8"""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    names = [f"z{i}" for i in range(n)]
    system = CoordinateSystem.from_specs([(name, 0) for name in names])
    cov = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            cov[i][j] = cov[j][i] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    entries = {(names[i], names[j]): cov[i][j] for i in range(n) for j in range(i, n)}
    for _ in range(3):
        exponents = [0] * n
        for _ in range(int(rng.integers(1, 5)) * 2):
            exponents[int(rng.integers(0, n))] += 1
        f = Poly.monomial(system, dict(zip(names, exponents)), 1)
        expected = gaussian_moment([[sp.Rational(v.numerator, v.denominator) for v in row] for row in cov],
                                   exponents)
        assert FiberIntegration.wick_moment(entries, f) == Scalar.of(expected)


def test_wick_mixed_fourth_moment():
    """<x^2 y^2> = 1 + 2 c^2 for unit variances and covariance c"""
    system = CoordinateSystem.from_specs([("x", 0), ("y", 0)])
    x, y = (Poly.coordinate(system, n) for n in ("x", "y"))
    c = Fraction(1, 3)
    cov = {("x", "x"): 1, ("y", "y"): 1, ("x", "y"): c}
    assert FiberIntegration.wick_moment(cov, x * x * y * y) == Scalar.of(1 + 2 * c * c)
