import pytest

from core.algorithms.formal.formal_geometry import FormalGeometry
from core.errors import ValidationError
from core.models.connection_one_form import FormalVolume
from core.models.formal_exp_map import FormalExpMap
from core.models.poly import Poly
from core.models.report import FAIL, PASS

BASE = ["x1", "x2"]


@pytest.fixture(params=range(4))
def random_map(request):
    return FormalExpMap.random(BASE, order=4, seed=request.param)


def test_components_of_quadratic_map():
    """A symmetric coefficient enters with its multiplicity factor"""
    phi = FormalExpMap(["x1"], order=4, coefficients={(0, (0, 0)): 2})
    x1 = Poly.coordinate(phi.system, "x1")
    p1 = Poly.coordinate(phi.system, "p1")
    assert phi.components()[0] == x1 + p1 + p1 * p1


@pytest.mark.parametrize("kwargs", [
    {"order": 0},
    {"coefficients": {(0, (0,)): 1}},
    {"coefficients": {(2, (0, 0)): 1}},
])
def test_invalid_exp_maps(kwargs):
    """Order, arity and index ranges are validated"""
    with pytest.raises(ValidationError):
        FormalExpMap(BASE, **kwargs)


def test_linear_map_has_constant_connection():
    """phi = x + p gives R_l = -d/dp_l"""
    phi = FormalExpMap.linear(BASE, order=3)
    R = FormalGeometry.compute_R(phi)
    assert R.matrix_entry(0, 0) == -1
    assert R.matrix_entry(0, 1).is_zero()
    assert FormalGeometry.check_flatness(R).status == PASS


def test_jacobian_inverse_of_quadratic_map():
    """J = 1 + 2p inverts to the geometric series 1 - 2p + 4p^2 - ..."""
    phi = FormalExpMap(["x1"], order=4, coefficients={(0, (0, 0)): 2})
    inverse = FormalGeometry.invert_fiber_jacobian(phi)[0][0]
    assert inverse.coefficient({}) == 1
    assert inverse.coefficient({"p1": 1}) == -2
    assert inverse.coefficient({"p1": 2}) == 4
    assert inverse.coefficient({"p1": 3}) == -8


def test_jacobian_inverse(random_map):
    """J^-1 J = 1 up to the truncation order"""
    residual = FormalGeometry.jacobian_residual(random_map)
    assert all(entry.is_zero() for row in residual for entry in row)


def test_connection_is_flat(random_map):
    """d_x R + 1/2 [R, R] vanishes for random maps"""
    report = FormalGeometry.check_flatness(FormalGeometry.compute_R(random_map))
    assert report.status == PASS, report.residual
    assert report.verified_order == 3


@pytest.mark.parametrize("seed", range(3))
def test_taylor_pullback_is_flat_section(random_map, seed):
    """Pullbacks of base functions are D-closed"""
    R = FormalGeometry.compute_R(random_map)
    f = FormalGeometry.random_base_function(random_map, 3, seed)
    report = FormalGeometry.check_d_closed(R, random_map, f)
    assert report.status == PASS, report.residual


def test_perturbed_section_is_not_closed():
    """Adding a fiber term to a pullback breaks D-closedness"""
    phi = FormalExpMap.random(BASE, order=4, seed=1)
    R = FormalGeometry.compute_R(phi)
    x1 = Poly.coordinate(phi.system, "x1")
    p2 = Poly.coordinate(phi.system, "p2")
    sigma = FormalGeometry.taylor_pullback(phi, x1 * x1) + p2
    assert FormalGeometry.check_d_closed(R, phi, sigma=sigma).status == FAIL


def test_d_closed_needs_input():
    phi = FormalExpMap.linear(BASE)
    with pytest.raises(ValidationError):
        FormalGeometry.check_d_closed(FormalGeometry.compute_R(phi), phi)


def test_taylor_pullback_rejects_fiber_functions():
    phi = FormalExpMap.linear(BASE)
    with pytest.raises(ValidationError):
        FormalGeometry.taylor_pullback(phi, Poly.coordinate(phi.system, "p1"))


@pytest.mark.parametrize("r,s", [(0, 1), (0, 3), (1, 0), (1, 2), (2, 1)])
def test_homotopy_identity(r, s):
    """delta delta* + delta* delta acts as r + s on bidegree (r, s)"""
    phi = FormalExpMap.linear(BASE, order=4)
    forms = phi.form_system
    sigma = (Poly.coordinate(forms, "p1") + Poly.coordinate(forms, "p2") * 2) ** s
    for dx in phi.differential_names[:r]:
        sigma = sigma * Poly.coordinate(forms, dx)
    report = FormalGeometry.homotopy_identity(sigma, phi)
    assert report.status == PASS
    assert f"bidegree ({r}, {s})" in report.notes


def test_homotopy_identity_rejects_mixed_bidegree():
    phi = FormalExpMap.linear(BASE)
    forms = phi.form_system
    sigma = Poly.coordinate(forms, "p1") + Poly.coordinate(forms, "p1") ** 2
    with pytest.raises(ValidationError):
        FormalGeometry.homotopy_identity(sigma, phi)


def test_family_generator(random_map):
    """The interpolating family from the linear map obeys the variation identities"""
    family = FormalExpMap.interpolate(FormalExpMap.linear(BASE, 4), random_map, "t")
    generator, report = FormalGeometry.family_generator(family, "t")
    assert report.status == PASS, report.residual
    assert generator.degree == 0


def test_interpolation_needs_same_base():
    with pytest.raises(ValidationError):
        FormalExpMap.interpolate(FormalExpMap.linear(["x1"]), FormalExpMap.linear(BASE))


def test_undeclared_parameter():
    with pytest.raises(ValidationError):
        FormalExpMap.linear(BASE).parameter_derivative("t")


def test_pullback_volume_is_compatible(random_map):
    """det J is preserved by D"""
    R = FormalGeometry.compute_R(random_map)
    volume = FormalGeometry.pullback_volume(random_map)
    report = FormalGeometry.check_volume_compatibility(R, volume, random_map)
    assert report.status == PASS, report.residual


def test_non_invariant_volume_fails():
    """1 + p1^2 is not preserved by the linear connection"""
    phi = FormalExpMap.linear(BASE, order=4)
    p1 = Poly.coordinate(phi.system, "p1")
    volume = FormalVolume(p1 * p1 + 1, phi.order)
    report = FormalGeometry.check_volume_compatibility(FormalGeometry.compute_R(phi), volume, phi)
    assert report.status == FAIL


def test_volume_must_be_invertible():
    phi = FormalExpMap.linear(BASE)
    with pytest.raises(ValidationError):
        FormalVolume(Poly.coordinate(phi.system, "p1"), phi.order)


def test_random_base_function_is_seeded():
    phi = FormalExpMap.linear(BASE)
    assert FormalGeometry.random_base_function(phi, 3, 7) == FormalGeometry.random_base_function(phi, 3, 7)
    assert FormalGeometry.random_base_function(phi, 3, 7).variables() <= set(BASE)
