from fractions import Fraction

import pytest

from core.algorithms.aksz.formal_global import FormalGlobal
from core.algorithms.aksz.targets import AKSZTargets
from core.algorithms.aksz.transgression import Transgression
from core.algorithms.bv.bv_operations import BVOperations
from core.algorithms.formal.formal_geometry import FormalGeometry
from core.algorithms.graded.fiber_integration import FiberIntegration
from core.algorithms.observables.auxiliary import PreObservables
from core.algorithms.observables.qbundles import QBundles
from core.algorithms.observables.quantum import GlobalObservable, QuantumObservables
from core.algorithms.observables.wilson_surface import WilsonSurfaces
from core.errors import UnsupportedIntegralError, ValidationError
from core.models.connection_one_form import FormalVolume
from core.models.embedding_model import EmbeddingModel
from core.models.finite_bv_theory import FiniteBVTheory
from core.models.formal_exp_map import FormalExpMap
from core.models.graded_coordinate import CoordinateSystem
from core.models.lie_structure import LieStructure
from core.models.poly import Poly
from core.models.report import FAIL, PASS, PRECONDITION_FAILED
from core.models.scalar import Scalar
from core.models.source_model import SourceModel
from core.models.symplectic import BVLaplacian, ConstantSymplectic


def so3_target():
    system = AKSZTargets.psm_system(3)
    x1, x2, x3 = (Poly.coordinate(system, f"x{i}") for i in (1, 2, 3))
    return AKSZTargets.build_psm_target({(0, 1): x3, (1, 2): x1, (2, 0): x2}, 3)


def bf_setup(g, d, k):
    """Wilson bundle, ambient theory over T^d and the slice T^k."""
    emb = EmbeddingModel.torus_slice(d, k)
    ambient = Transgression.transgress(AKSZTargets.build_bf_target(g, d), emb.ambient)
    return QBundles.build_bf_wilson_bundle(g, d), ambient, emb


# ----------------------------------------------------------------- Q-bundles

@pytest.mark.parametrize("d", [2, 3, 4])
def test_wilson_bundle_is_hamiltonian(d):
    """The BF Wilson bundle satisfies the Q-bundle condition and matches its quoted field"""
    spec = QBundles.build_bf_wilson_bundle(LieStructure.sl2(), d)
    report = QBundles.check_hamiltonian_qbundle(spec)
    assert report.status == PASS, report.residual
    assert spec.degree == d - 3


def test_perturbed_wilson_bundle_fails():
    """An extra xs1 y1 term spoils both the condition and the quoted field"""
    spec = QBundles.build_bf_wilson_bundle(LieStructure.sl2(), 3)
    system = spec.system
    extra = Poly.coordinate(system, "xs1") * Poly.coordinate(system, "y1")
    report = QBundles.check_hamiltonian_qbundle(spec.with_theta_e(spec.theta_e + extra))
    assert report.status == FAIL
    assert any(term.startswith("V[ys1]") for term in report.residual)


def test_wilson_bundle_orientation_is_opposite_to_quoted_form():
    """In even d the unsigned bracket term <ys, [x, y]> does not reproduce the field"""
    g = LieStructure.sl2()
    spec = QBundles.build_bf_wilson_bundle(g, 2)
    system = spec.system
    bracket = Poly.zero(system)
    for (k, i, j), value in g.items():
        bracket = bracket + (Poly.coordinate(system, f"ys{k + 1}") * Poly.coordinate(system, f"x{i + 1}")
                             * Poly.coordinate(system, f"y{j + 1}") * value)
    report = QBundles.check_hamiltonian_qbundle(spec.with_theta_e(spec.theta_e + bracket * 2))
    assert report.status == FAIL


@pytest.fixture
def fiber_omega():
    system = CoordinateSystem.from_specs([("s", 0), ("q", 0)])
    return ConstantSymplectic.from_darboux_pairs(system, 0, [("s", "q")])


def test_poisson_vector_field_is_vertical_field(fiber_omega):
    """The Hamiltonian field of x1 commutes with the so3 bivector"""
    target = so3_target()
    system = target.system
    vertical = {1: -Poly.coordinate(system, "x3"), 2: Poly.coordinate(system, "x2")}
    report = QBundles.check_psm_vertical_field(target, fiber_omega, vertical)
    assert report.status == PASS, report.residual


def test_non_poisson_vector_field_fails(fiber_omega):
    """x1 d/dx1 does not preserve the so3 bivector"""
    target = so3_target()
    vertical = {0: Poly.coordinate(target.system, "x1")}
    assert QBundles.check_psm_vertical_field(target, fiber_omega, vertical).status == FAIL


def test_vertical_field_in_formal_global_coordinates(fiber_omega):
    """The same field passes after the linear formal exponential map"""
    target = so3_target()
    system = target.system
    vertical = {1: -Poly.coordinate(system, "x3"), 2: Poly.coordinate(system, "x2")}
    phi = FormalExpMap.linear(target.base_names, order=3)
    report = QBundles.check_psm_vertical_field(target, fiber_omega, vertical, phi)
    assert report.status == PASS, report.residual
    assert "formal global" in report.notes


def test_vertical_field_rejects_momenta(fiber_omega):
    target = so3_target()
    with pytest.raises(ValidationError):
        QBundles.psm_bundle(target, fiber_omega, {0: Poly.coordinate(target.system, "p1")})


# ------------------------------------------------------------ pre-observables

@pytest.mark.parametrize("g,d,k", [
    (LieStructure.sl2(), 3, 1),
    (LieStructure.abelian(1), 2, 0),
    (LieStructure.so3(), 3, 2),
])
def test_wilson_bundle_gives_pre_observable(g, d, k):
    """Hamiltonian Q-bundles transgress to pre-observables"""
    spec, ambient, emb = bf_setup(g, d, k)
    aux = PreObservables.transgress_auxiliary(spec, ambient, emb)
    report = PreObservables.check_pre_observable(ambient, aux)
    assert report.status == PASS, report.residual


def test_pre_observable_needs_ambient_fields():
    """An auxiliary theory over a different ambient model is rejected"""
    spec, ambient, emb = bf_setup(LieStructure.sl2(), 3, 1)
    aux = PreObservables.transgress_auxiliary(spec, ambient, emb)
    other = Transgression.transgress(AKSZTargets.build_bf_target(LieStructure.so3(), 3), SourceModel.sphere3())
    with pytest.raises(ValidationError):
        PreObservables.check_pre_observable(other, aux)


def test_wilson_surface_routes_agree():
    """The explicit surface action equals the auxiliary theory of the Wilson bundle"""
    g = LieStructure.sl2()
    spec, ambient, emb = bf_setup(g, 3, 1)
    surface = WilsonSurfaces.surface_theory(g, ambient, emb)
    aux = PreObservables.transgress_auxiliary(spec, ambient, emb)
    assert surface.system == aux.system
    assert surface.action == aux.action


def test_wilson_surface_cme():
    g = LieStructure.sl2()
    _, ambient, emb = bf_setup(g, 3, 1)
    surface = WilsonSurfaces.surface_theory(g, ambient, emb)
    report = WilsonSurfaces.check_wilson_surface_cme(g, ambient, surface, emb)
    assert report.status == PASS, report.residual
    assert report.notes == ["fixed embedding"]
    assert [part['check'] for part in report.details['parts']] == [
        "pre_observable", "bf_generators", "curvature_shift"]


def test_formal_global_auxiliary_needs_matching_degree():
    """n = k - 1 is required for the formal global auxiliary theory"""
    spec, ambient, emb = bf_setup(LieStructure.sl2(), 3, 2)
    phi = FormalExpMap.linear([y for y, _ in spec.fiber_split], order=3)
    with pytest.raises(ValidationError):
        PreObservables.formal_global_auxiliary(spec, ambient, emb, phi)


def test_obstruction_report_shape():
    """The obstruction report carries the consistency of its three forms"""
    spec, ambient, emb = bf_setup(LieStructure.abelian(1), 2, 0)
    phi = FormalExpMap.linear([y for y, _ in spec.fiber_split], order=3)
    data = PreObservables.formal_global_auxiliary(spec, ambient, emb, phi)
    report = PreObservables.check_global_obstruction(data)
    assert report.check == "obstruction"
    assert report.verified_order == 2
    assert set(PreObservables.obstruction_residuals(data)) == {"direct", "obstruction_1", "obstruction_2"}



@pytest.mark.parametrize("seed", [0] + [pytest.param(s, marks=pytest.mark.slow) for s in range(1, 10)])
def test_obstruction_forms_agree_for_quadratic_fiber_maps(seed):
    """Random quadratic fiber maps on the sl2 Wilson bundle give one obstruction in three forms"""
    spec, ambient, emb = bf_setup(LieStructure.sl2(), 3, 1)
    phi = FormalExpMap.random([y for y, _ in spec.fiber_split], order=3, seed=seed, max_arity=2)
    data = PreObservables.formal_global_auxiliary(spec, ambient, emb, phi)
    residuals = PreObservables.obstruction_residuals(data)
    assert residuals["obstruction_2"] == residuals["obstruction_1"]
    assert residuals["direct"] == residuals["obstruction_1"]
    report = PreObservables.check_global_obstruction(data)
    assert report.details == {'consistent': True}
    assert not any(line.startswith("obstruction_consistency") for line in report.residual)


# ------------------------------------------------------------ fiber integrals

@pytest.fixture
def mixed_fiber():
    """Parameter x, even z and odd b, c."""
    return CoordinateSystem.from_specs([("x", 0, "fiber"), ("z", 0), ("b", -1), ("c", 1)])


def i_over_hbar(system):
    return Poly.imaginary_unit(system) * Poly.hbar(system, -1)


def test_mixed_odd_even_fiber_integral(mixed_fiber):
    """Berezin over b, c and a shifted Gaussian over z in 1/2 z^2 + x z + b c (1 + z)"""
    x, z, b, c = (Poly.coordinate(mixed_fiber, n, order=3) for n in ("x", "z", "b", "c"))
    action = z * z / 2 + x * z + b * c * (1 + z)
    integral = QuantumObservables.fiber_integral(action, ["c", "b", "z"])
    assert integral.prefactor == i_over_hbar(mixed_fiber) * (1 - x)
    assert integral.exponent == -(x * x) / 2
    assert integral.notes == ("gaussian normalization det(K)^(-1/2) dropped",)


def test_wick_prefactor_matches_moment(mixed_fiber):
    """z^4 against exp((i/hbar) z^2 / 2) is the Wick moment with covariance i hbar"""
    z = Poly.coordinate(mixed_fiber, "z")
    integral = QuantumObservables.fiber_integral(z * z / 2, ["z"], insertion=z ** 4)
    expected = FiberIntegration.wick_moment({("z", "z"): Scalar.i() * Scalar.hbar()}, z ** 4)
    assert expected == Scalar.hbar(2) * -3
    assert integral.prefactor == Poly.from_scalar(mixed_fiber, expected)


def test_shifted_gaussian_prefactor(mixed_fiber):
    """z^2 against 1/2 z^2 + x z becomes i hbar + x^2 after completing the square"""
    x, z = Poly.coordinate(mixed_fiber, "x"), Poly.coordinate(mixed_fiber, "z")
    integral = QuantumObservables.fiber_integral(z * z / 2 + x * z, ["z"], insertion=z * z)
    assert integral.prefactor == Poly.imaginary_unit(mixed_fiber) * Poly.hbar(mixed_fiber) + x * x


@pytest.mark.parametrize("power", [(1, 1), (2, 2), (3, 1), (2, 0)])
def test_quadratic_even_pair_via_wick_matches_wick_moment(power):
    """An off-diagonal kernel z w has covariance i hbar between z and w"""
    system = CoordinateSystem.from_specs([("z", 0), ("w", 0)])
    z, w = Poly.coordinate(system, "z"), Poly.coordinate(system, "w")
    insertion = z ** power[0] * w ** power[1]
    integral = QuantumObservables.fiber_integral(z * w, ["z", "w"], insertion=insertion)
    expected = FiberIntegration.wick_moment({("z", "w"): Scalar.i() * Scalar.hbar()}, insertion)
    assert integral.prefactor == Poly.from_scalar(system, expected)


# ---------------------------------------------------------- effective action

@pytest.fixture
def split_theory():
    """Fields x, c, b with antifields; b and c form the integrated factor."""
    system = CoordinateSystem.from_specs([("x", 0, "fiber"), ("xs", -1), ("c", 1), ("cs", -2), ("b", -1),
                                          ("bs", 0)])
    omega = ConstantSymplectic.from_darboux_pairs(system, -1, [("x", "xs"), ("c", "cs"), ("b", "bs")])
    x, c, b = (Poly.coordinate(system, n, order=3) for n in ("x", "c", "b"))
    return FiniteBVTheory("split", omega, b * c + b * c * x)


def test_berezin_effective_action(split_theory):
    """Integrating b c (1 + x) gives -i hbar log(1 + x), cut by the fiber order"""
    eff = QuantumObservables.effective_action(split_theory, ["c", "cs", "b", "bs"], ["cs", "bs"])
    i_hbar = Scalar.hbar() * Scalar.i()
    assert eff.system.names == ["x", "xs"]
    assert eff.action.coefficient({"x": 1}) == i_hbar * -1
    assert eff.action.coefficient({"x": 2}) == i_hbar / 2
    assert eff.action.coefficient({"x": 3}) == i_hbar * Fraction(-1, 3)
    assert eff.action.max_weight() == 3
    assert eff.reports[0].notes[0].startswith("normalization")


def test_log_of_non_nilpotent_integral_unsupported():
    """Without a fiber order, log(1 + x) does not terminate"""
    system = CoordinateSystem.from_specs([("x", 0), ("xs", -1), ("c", 1), ("cs", -2), ("b", -1), ("bs", 0)])
    omega = ConstantSymplectic.from_darboux_pairs(system, -1, [("x", "xs"), ("c", "cs"), ("b", "bs")])
    x, c, b = (Poly.coordinate(system, n) for n in ("x", "c", "b"))
    theory = FiniteBVTheory("split", omega, b * c + b * c * x)
    with pytest.raises(UnsupportedIntegralError):
        QuantumObservables.effective_action(theory, ["c", "cs", "b", "bs"], ["cs", "bs"])


def test_berezin_vanishing_normalization(split_theory):
    """A single odd variable with no constant pairing cannot be normalized"""
    system = split_theory.system
    action = Poly.coordinate(system, "xs") * Poly.coordinate(system, "c") * Poly.coordinate(system, "x")
    theory = split_theory.with_action(action)
    with pytest.raises(UnsupportedIntegralError):
        QuantumObservables.effective_action(theory, ["c", "cs"], ["cs"])


def test_gaussian_effective_action():
    """Completing the square in 1/2 z^2 + x z leaves -1/2 x^2"""
    system = CoordinateSystem.from_specs([("x", 0), ("xs", -1), ("z", 0), ("zs", -1)])
    omega = ConstantSymplectic.from_darboux_pairs(system, -1, [("x", "xs"), ("z", "zs")])
    x, z = Poly.coordinate(system, "x"), Poly.coordinate(system, "z")
    theory = FiniteBVTheory("gauss", omega, z * z / 2 + x * z)
    eff = QuantumObservables.effective_action(theory, ["z", "zs"], ["zs"])
    x_eff = Poly.coordinate(eff.system, "x")
    assert eff.action == -(x_eff * x_eff) / 2


def test_mixed_effective_action():
    """Odd and even fields integrated together: -x^2/2 - i hbar log(1 - x)"""
    system = CoordinateSystem.from_specs([("x", 0, "fiber"), ("xs", -1), ("z", 0), ("zs", -1), ("c", 1),
                                          ("cs", -2), ("b", -1), ("bs", 0)])
    omega = ConstantSymplectic.from_darboux_pairs(system, -1, [("x", "xs"), ("z", "zs"), ("c", "cs"),
                                                               ("b", "bs")])
    x, z, b, c = (Poly.coordinate(system, n, order=3) for n in ("x", "z", "b", "c"))
    theory = FiniteBVTheory("mixed", omega, z * z / 2 + x * z + b * c * (1 + z))
    eff = QuantumObservables.effective_action(theory, ["z", "zs", "c", "cs", "b", "bs"], ["zs", "cs", "bs"])
    i_hbar = Scalar.hbar() * Scalar.i()
    assert eff.system.names == ["x", "xs"]
    assert eff.action.coefficient({"x": 1}) == i_hbar
    assert eff.action.coefficient({"x": 2}) == i_hbar / 2 - Fraction(1, 2)
    assert eff.action.coefficient({"x": 3}) == i_hbar / 3


def test_non_gaussian_integral_unsupported():
    system = CoordinateSystem.from_specs([("x", 0), ("xs", -1), ("z", 0), ("zs", -1)])
    omega = ConstantSymplectic.from_darboux_pairs(system, -1, [("x", "xs"), ("z", "zs")])
    z = Poly.coordinate(system, "z")
    theory = FiniteBVTheory("quartic", omega, z ** 4)
    with pytest.raises(UnsupportedIntegralError):
        QuantumObservables.effective_action(theory, ["z", "zs"], ["zs"])


def test_splitting_must_keep_pairs(split_theory):
    with pytest.raises(ValidationError):
        QuantumObservables.effective_action(split_theory, ["c"], [])


# ---------------------------------------------------------------------- dQME

@pytest.fixture
def abelian_point():
    """Wilson point observable of abelian BF on the 2-torus with the linear fiber map."""
    spec, ambient, emb = bf_setup(LieStructure.abelian(1), 2, 0)
    phi = FormalExpMap.linear([y for y, _ in spec.fiber_split], order=4)
    return phi, ambient, PreObservables.formal_global_auxiliary(spec, ambient, emb, phi)


def compatible_volume(phi):
    return FormalGeometry.check_volume_compatibility(
        FormalGeometry.compute_R(phi), FormalGeometry.pullback_volume(phi), phi)


def test_global_observable_integrates_auxiliary_fields(abelian_point):
    """Integrating ys1h over y1h = 0 leaves -(i/hbar) dy1 exp((i/hbar) xs1_1 y1)"""
    _, ambient, data = abelian_point
    observable = QuantumObservables.formal_global_observable(data, ambient)
    system = observable.prefactor.system
    assert "ys1h_1" not in system and "y1h_1" not in system
    xs, y, dy = (Poly.coordinate(system, n) for n in ("xs1_1", "y1", "dy1"))
    assert observable.prefactor == -(i_over_hbar(system) * dy)
    assert observable.exponent.truncate(3) == (xs * y).truncate(3)
    assert observable.omega.degree == -1


def test_dqme_for_abelian_bf(abelian_point):
    """The integrated Wilson point observable is dQME-closed"""
    phi, ambient, data = abelian_point
    observable = QuantumObservables.formal_global_observable(data, ambient)
    report = QuantumObservables.check_dqme(observable, compatible_volume(phi))
    assert report.status == PASS, report.residual
    assert report.details == {'sign': 1}
    assert report.verified_order == 3
    assert report.notes == []


def test_dqme_fails_for_conjugate_insertion(abelian_point):
    """Inserting the partner of the restricted B field spoils the dQME"""
    phi, ambient, data = abelian_point
    insertion = Poly.coordinate(data.theory.system, "x1_th1th2")
    observable = QuantumObservables.formal_global_observable(data, ambient, insertion=insertion)
    report = QuantumObservables.check_dqme(observable, compatible_volume(phi))
    assert report.status == FAIL
    assert not any(note.startswith("convention") for note in report.notes)


def test_global_observable_needs_lagrangian(abelian_point):
    """Both fields of an auxiliary pair cannot be integrated"""
    _, ambient, data = abelian_point
    with pytest.raises(ValidationError):
        QuantumObservables.formal_global_observable(data, ambient, antifields=[])


def test_dqme_precondition_failed(abelian_point):
    """An incompatible volume makes the dQME check inapplicable"""
    phi, ambient, data = abelian_point
    p1 = Poly.coordinate(phi.system, "p1")
    precondition = FormalGeometry.check_volume_compatibility(
        FormalGeometry.compute_R(phi), FormalVolume(p1 * p1 + 1, phi.order), phi)
    observable = QuantumObservables.formal_global_observable(data, ambient)
    report = QuantumObservables.check_dqme(observable, precondition)
    assert report.status == PRECONDITION_FAILED
    assert report.notes[0] == "volume compatibility: fail"


def test_dqme_of_unit_prefactor_reduces_to_dcme():
    """For P = 1 in even dimension, E = (i/hbar)(d_x S + 1/2 {S, S}) + Delta S"""
    target = so3_target()
    phi = FormalExpMap.random(target.base_names, order=3, seed=0, max_arity=2)
    data = FormalGlobal.formal_global_action(target, SourceModel.torus(2), phi)
    system = data.action.system
    laplacian = BVLaplacian(data.omega)
    a = Poly.imaginary_unit(system) * Poly.hbar(system, -1)
    dcme = FormalGlobal.dcme_residual(data.action, data.omega, data.differentials, data.order)
    expected = (a * dcme + laplacian.apply(data.action)).truncate(data.order - 1)
    residual = QuantumObservables.dqme_residual(data.action, laplacian, data.differentials, 2)
    assert residual.truncate(data.order - 1) == expected


def test_dqme_residual_is_linear_in_prefactor(abelian_point):
    """An inhomogeneous prefactor gives the sum of its homogeneous residuals"""
    _, ambient, data = abelian_point
    observable = QuantumObservables.formal_global_observable(data, ambient)
    system = observable.exponent.system
    laplacian = BVLaplacian(observable.omega)
    odd, even = Poly.coordinate(system, "x1_th1th2"), Poly.coordinate(system, "xs1_1")

    def residual(p):
        return QuantumObservables.dqme_residual(observable.exponent, laplacian, observable.differentials, 2, p)

    assert residual(odd + even) == residual(odd) + residual(even)


def test_dqme_needs_bv_structure():
    target = so3_target()
    observable = GlobalObservable(target.theta, target.theta, target.omega, {}, 3, 2)
    with pytest.raises(ValidationError):
        QuantumObservables.check_dqme(observable, BVOperations.check_master_equation(target.omega, target.theta))
