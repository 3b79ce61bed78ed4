from fractions import Fraction

import numpy as np
import pytest

from core.algorithms.bv.bv_operations import BVOperations, residual_by_hbar
from core.errors import GradedAlgebraError, ValidationError
from core.models.graded_coordinate import CoordinateSystem
from core.models.poly import Poly
from core.models.report import FAIL, PASS
from core.models.symplectic import BVLaplacian, ConstantSymplectic


def random_poly(system, seed, terms=6, max_exp=2):
    """Random rational polynomial with small exponents."""
    rng = np.random.default_rng(seed)
    result = Poly.zero(system)
    for _ in range(terms):
        exponents = {}
        for coord in system:
            limit = 1 if coord.is_odd else max_exp
            exponents[coord.name] = int(rng.integers(0, limit + 1))
        coefficient = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        result = result + Poly.monomial(system, exponents, coefficient)
    return result


def test_darboux_bracket_is_one(bv_system, bv_omega):
    """{x, xs} = 1 for a Darboux pair (x, xs)"""
    x = Poly.coordinate(bv_system, "x")
    xs = Poly.coordinate(bv_system, "xs")
    assert BVOperations.poisson_bracket(bv_omega, x, xs) == 1


def test_coordinate_paired_twice_rejected(bv_system):
    """A coordinate may appear in one Darboux pair only"""
    with pytest.raises(ValidationError):
        ConstantSymplectic.from_darboux_pairs(bv_system, -1, [("x", "xs"), ("x", "cs")])


def test_laplacian_needs_odd_structure():
    """The BV Laplacian is only defined for degree -1 structures"""
    system = CoordinateSystem.from_specs([("x", 0), ("p", 1)])
    omega = ConstantSymplectic.from_darboux_pairs(system, 1, [("x", "p")])
    with pytest.raises(GradedAlgebraError):
        BVLaplacian(omega)


@pytest.mark.parametrize("seed", range(5))
def test_laplacian_squares_to_zero(bv_system, laplacian, seed):
    """Delta^2 = 0 on random polynomials"""
    f = random_poly(bv_system, seed)
    assert laplacian.apply(laplacian.apply(f)).is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_laplacian_generates_bracket(bv_system, laplacian, seed):
    """Delta(fg) differs from the Leibniz terms by (-1)^{|f|} {f, g}"""
    f = random_poly(bv_system, seed)
    g = random_poly(bv_system, seed + 100)
    report = BVOperations.check_bv_leibniz(laplacian, f, g)
    assert report.status == PASS, report.residual


def test_master_equation_for_gauge_action(bv_system, bv_omega):
    """S = x c xs solves the classical master equation"""
    x, c, xs = (Poly.coordinate(bv_system, n) for n in ("x", "c", "xs"))
    action = x * c * xs
    report = BVOperations.check_master_equation(bv_omega, action)
    assert report.status == PASS
    assert report.check == "cme"


def test_master_equation_degree_checked(bv_system, bv_omega):
    """The classical master function must have degree n + 1"""
    with pytest.raises(ValidationError):
        BVOperations.check_master_equation(bv_omega, Poly.coordinate(bv_system, "c"))


def test_quantum_master_equation_residual_is_labelled(bv_system, laplacian):
    """S = x c xs has Delta S != 0, reported under the hbar^1*I label"""
    x, c, xs = (Poly.coordinate(bv_system, n) for n in ("x", "c", "xs"))
    action = x * c * xs
    report = BVOperations.check_qme(laplacian, action)
    assert report.status == FAIL
    assert report.residual
    assert all(term.startswith("hbar^1*I: ") for term in report.residual)


def test_quantum_master_equation_passes(bv_system, laplacian):
    """S = c xs has vanishing bracket and Laplacian"""
    c, xs = (Poly.coordinate(bv_system, n) for n in ("c", "xs"))
    assert BVOperations.check_qme(laplacian, c * xs).status == PASS


def test_quantum_master_equation_degree_checked(bv_system, laplacian):
    """The action must have degree 0"""
    with pytest.raises(ValidationError):
        BVOperations.check_qme(laplacian, Poly.coordinate(bv_system, "c"))


def test_residual_by_hbar_labels():
    """Rational parts are labelled by hbar power and reality"""
    system = CoordinateSystem.from_specs([("x", 0)])
    x = Poly.coordinate(system, "x")
    residual = x + Poly.hbar(system) * Poly.imaginary_unit(system) * x * 2
    labelled = residual_by_hbar(residual)
    assert set(labelled) == {"hbar^0", "hbar^1*I"}
    assert labelled["hbar^1*I"] == x * 2


def test_hamiltonian_field_round_trip(bv_system, bv_omega):
    """The Hamiltonian of Q_S is S again"""
    x, c, xs = (Poly.coordinate(bv_system, n) for n in ("x", "c", "xs"))
    action = x * c * xs
    field = BVOperations.hamiltonian_vf(bv_omega, action)
    assert field.degree == 1
    assert field.apply(x) == BVOperations.poisson_bracket(bv_omega, action, x)
    assert BVOperations.hamiltonian_function(bv_omega, field) == action


def test_bracket_system_mismatch(bv_omega):
    """Brackets refuse polynomials from another system"""
    other = CoordinateSystem.from_specs([("x", 0)])
    x = Poly.coordinate(other, "x")
    with pytest.raises(GradedAlgebraError):
        BVOperations.poisson_bracket(bv_omega, x, x)


def homogeneous_parts(system, seed):
    return list(random_poly(system, seed, terms=5).homogeneous_parts().items())


def shifted_sign(df, dg):
    return -1 if ((df + 1) * (dg + 1)) % 2 else 1


@pytest.mark.parametrize("seed", range(4))
def test_bracket_graded_antisymmetry(bv_system, bv_omega, seed):
    """{f, g} = -(-1)^{(|f|+1)(|g|+1)} {g, f}"""
    for df, f in homogeneous_parts(bv_system, seed):
        for dg, g in homogeneous_parts(bv_system, seed + 50):
            lhs = BVOperations.poisson_bracket(bv_omega, f, g)
            rhs = BVOperations.poisson_bracket(bv_omega, g, f) * (-shifted_sign(df, dg))
            assert lhs == rhs


@pytest.mark.parametrize("seed", range(3))
def test_bracket_graded_jacobi(bv_system, bv_omega, seed):
    """{f, {g, h}} = {{f, g}, h} + (-1)^{(|f|+1)(|g|+1)} {g, {f, h}}"""
    def bracket(a, b):
        return BVOperations.poisson_bracket(bv_omega, a, b)

    h = random_poly(bv_system, seed + 200, terms=4)
    for df, f in homogeneous_parts(bv_system, seed):
        for dg, g in homogeneous_parts(bv_system, seed + 100):
            lhs = bracket(f, bracket(g, h))
            rhs = bracket(bracket(f, g), h) + bracket(g, bracket(f, h)) * shifted_sign(df, dg)
            assert lhs == rhs


@pytest.mark.parametrize("seed", range(3))
def test_hamiltonian_field_is_lie_map(bv_system, bv_omega, seed):
    """X_{f, g} = [X_f, X_g]"""
    coords = [Poly.coordinate(bv_system, n) for n in bv_system.names]
    for _, f in homogeneous_parts(bv_system, seed):
        for _, g in homogeneous_parts(bv_system, seed + 100):
            fg = BVOperations.poisson_bracket(bv_omega, f, g)
            commutator = BVOperations.hamiltonian_vf(bv_omega, f).bracket(BVOperations.hamiltonian_vf(bv_omega, g))
            if fg.is_zero():
                assert all(commutator.apply(u).is_zero() for u in coords)
                continue
            field = BVOperations.hamiltonian_vf(bv_omega, fg)
            for u in coords:
                assert field.apply(u) == commutator.apply(u)


@pytest.mark.parametrize("seed", range(4))
def test_qme_at_order_zero_is_cme(bv_system, laplacian, seed):
    """The hbar^0 part of the QME residual is {S_0, S_0}"""
    classical = random_poly(bv_system, seed, terms=8).homogeneous_part(0)
    correction = random_poly(bv_system, seed + 10, terms=8).homogeneous_part(0)
    action = classical + Poly.hbar(bv_system) * correction
    labelled = residual_by_hbar(BVOperations.qme_residual(laplacian, action))
    expected = BVOperations.poisson_bracket(laplacian.omega, classical, classical)
    assert labelled.get("hbar^0", Poly.zero(bv_system)) == expected
