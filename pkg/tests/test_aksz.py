import pytest
import sympy as sp

from core.algorithms.aksz.formal_global import FormalGlobal
from core.algorithms.aksz.linfty import Linfty
from core.algorithms.aksz.targets import AKSZTargets
from core.algorithms.aksz.transgression import Transgression
from core.algorithms.bv.bv_operations import BVOperations
from core.errors import ValidationError
from core.models.formal_exp_map import FormalExpMap
from core.models.lie_structure import LieStructure
from core.models.poly import Poly
from core.models.report import FAIL, PASS, Report
from core.models.source_model import SourceModel


def psm_target(entries, m=3):
    """PSM target from 1-based (i, j) -> coordinate name or number."""
    system = AKSZTargets.psm_system(m)
    pi = {}
    for (i, j), value in entries.items():
        pi[(i - 1, j - 1)] = Poly.coordinate(system, value) if isinstance(value, str) else value
    return AKSZTargets.build_psm_target(pi, m)


@pytest.fixture
def so3_target():
    return psm_target({(1, 2): "x3", (2, 3): "x1", (3, 1): "x2"})


def test_linear_poisson_target_is_certified(so3_target):
    """The so3 Lie-Poisson structure satisfies the master equation"""
    assert so3_target.certified
    assert so3_target.dimension == 2
    assert so3_target.theta.degree() == 2


def test_non_poisson_bivector_fails_certification():
    """pi12 = x3, pi23 = x2 violates the Jacobi identity"""
    target = psm_target({(1, 2): "x3", (2, 3): "x2"})
    assert not target.certified
    assert target.certification.status == FAIL


def test_constant_bivector_is_poisson():
    """Constant bivectors always pass"""
    assert psm_target({(1, 2): 1}, m=2).certified


def test_bivector_must_be_antisymmetric():
    """pi^{12} and pi^{21} must be opposite"""
    with pytest.raises(ValidationError):
        psm_target({(1, 2): 1, (2, 1): 1}, m=2)


def test_bivector_read_back(so3_target):
    """The coefficient of p1 p2 is pi^{12}"""
    x3 = Poly.coordinate(so3_target.system, "x3")
    assert AKSZTargets.bivector_entry(so3_target, 0, 1) == x3


@pytest.mark.parametrize("d", [2, 3, 4])
def test_bf_target_of_lie_algebra_is_certified(d):
    """BF targets of sl2 solve the master equation in every dimension"""
    target = AKSZTargets.build_bf_target(LieStructure.sl2(), d)
    assert target.certified
    assert target.is_split == (d == 2)


def test_bf_target_of_perturbed_constants_fails():
    """[e, f] = h + e breaks the Jacobi identity"""
    g = LieStructure.sl2().perturbed((1, 1, 2), 1)
    assert not AKSZTargets.build_bf_target(g, 3).certified


def test_unknown_lie_algebra():
    with pytest.raises(ValidationError):
        LieStructure.builtin("e8")


@pytest.mark.parametrize("model_name", ["torus2", "sphere2"])
def test_transgressed_psm_solves_master_equation(so3_target, model_name):
    """The transgressed action satisfies the CME on closed surfaces"""
    theory = Transgression.transgress(so3_target, SourceModel.builtin(model_name))
    assert theory.reports[0].status == PASS
    assert theory.action.degree() == 0
    assert theory.omega.degree == -1


@pytest.mark.parametrize("model_name", ["torus3", "sphere3"])
def test_transgressed_bf_solves_master_equation(model_name):
    """BF theory over three-dimensional models, including a nonzero differential"""
    target = AKSZTargets.build_bf_target(LieStructure.sl2(), 3)
    theory = Transgression.transgress(target, SourceModel.builtin(model_name))
    assert theory.reports[0].status == PASS


def test_transgression_dimension_mismatch(so3_target):
    """A surface target cannot be transgressed over a three-manifold"""
    with pytest.raises(ValidationError):
        Transgression.transgress(so3_target, SourceModel.torus(3))


def test_field_names_cover_model_basis(so3_target):
    """One component field per target coordinate and basis element"""
    model = SourceModel.torus(2)
    theory = Transgression.transgress(so3_target, model)
    assert len(theory.field_names) == len(so3_target.system) * len(model.labels)


def test_reparametrization_invariance(so3_target):
    """th1 -> th1 + th2 preserves the transgressed action and symplectic form"""
    model = SourceModel.torus(2)
    theory = Transgression.transgress(so3_target, model)
    shear = {model.index("th1"): {model.index("th1"): 1, model.index("th2"): 1}}
    report = Transgression.check_reparametrization(theory, model, shear)
    assert report.status == PASS, report.residual


def test_reparametrization_rejects_orientation_reversal(so3_target):
    """Swapping th1 and th2 flips the integral"""
    model = SourceModel.torus(2)
    theory = Transgression.transgress(so3_target, model)
    swap = {model.index("th1"): {model.index("th2"): 1}, model.index("th2"): {model.index("th1"): 1}}
    with pytest.raises(ValidationError):
        Transgression.check_reparametrization(theory, model, swap)


def test_bracket_residuals_are_kept_per_pair(bv_omega):
    """Opposite defects on two Darboux pairs are both reported"""
    system = bv_omega.system
    x, xs, cs = (Poly.coordinate(system, n) for n in ("x", "xs", "cs"))
    images = {"x": x * 2, "xs": xs, "c": Poly.zero(system), "cs": cs}
    residuals = Transgression.bracket_residuals(bv_omega, images, system.names)
    assert set(residuals) == {"omega(x,xs)", "omega(c,cs)"}
    assert residuals["omega(x,xs)"] == Poly.constant(system, 1)
    assert residuals["omega(c,cs)"] == Poly.constant(system, -1)
    assert Report.from_residual("reparametrization", residuals).status == FAIL


def test_ce_differential_squares_to_zero():
    """Q_CE^2 = 0 exactly when the constants satisfy Jacobi"""
    assert Linfty.check_ce_square(LieStructure.sl2()).status == PASS
    assert Linfty.check_ce_square(LieStructure.so3()).status == PASS
    assert Linfty.check_ce_square(LieStructure.sl2().perturbed((1, 1, 2), 1)).status == FAIL


def test_lie_algebra_homotopy_jacobi():
    """A Lie algebra is an L-infinity algebra with a single binary bracket"""
    g = Linfty.lie_algebra(LieStructure.sl2())
    report = Linfty.check_homotopy_jacobi(g)
    assert report.status == PASS
    assert g.arities() == [2]
    assert "arities [2]" in report.notes


def test_homotopy_jacobi_arity_limit():
    """Brackets above the allowed arity are rejected"""
    g = Linfty.lie_algebra(LieStructure.sl2())
    with pytest.raises(ValidationError):
        Linfty.check_homotopy_jacobi(g, max_arity=1)


def test_extract_linfty_from_ce_field():
    """Reading brackets off Q_CE reproduces a binary L-infinity algebra"""
    algebra = Linfty.extract_linfty(Linfty.ce_differential(LieStructure.so3()))
    assert algebra.arities() == [2]
    assert algebra.degrees == [0, 0, 0]


@pytest.mark.parametrize("model_name", ["circle", "torus2", "sphere3"])
def test_forms_tensor_lie_algebra(model_name):
    """Forms on a model tensored with sl2 satisfy the homotopy Jacobi identities"""
    g = Linfty.lie_algebra(LieStructure.sl2())
    forms = Linfty.forms_linfty(SourceModel.builtin(model_name), g)
    assert Linfty.check_homotopy_jacobi(forms).status == PASS


def test_maurer_cartan_action_on_circle():
    """The Maurer-Cartan action of forms on a circle solves the CME and varies to MC"""
    g = Linfty.lie_algebra(LieStructure.sl2())
    forms = Linfty.forms_linfty(SourceModel.circle(), g)
    action, report = Linfty.hmc_action(forms)
    assert report.status == PASS, report.residual
    assert Linfty.check_linfty_mc(forms, action).status == PASS


def test_maurer_cartan_action_needs_cyclic_structure():
    g = Linfty.lie_algebra(LieStructure.sl2(), cyclic=False)
    with pytest.raises(ValidationError):
        Linfty.hmc_action(g)


@pytest.mark.parametrize("model_name", [None, "circle", "torus2"])
def test_maurer_cartan_action_matches_euler_hamiltonian(model_name):
    """The action built from brackets and pairing is the Euler Hamiltonian of Q"""
    g = Linfty.lie_algebra(LieStructure.sl2())
    if model_name:
        g = Linfty.forms_linfty(SourceModel.builtin(model_name), g)
    action, report = Linfty.hmc_action(g)
    assert report.status == PASS, report.residual
    assert action == BVOperations.hamiltonian_function(g.omega, g.field)


def test_reconstructed_field_is_q():
    """Bracket tables rebuild the shifted vector field"""
    forms = Linfty.forms_linfty(SourceModel.circle(), Linfty.lie_algebra(LieStructure.sl2()))
    assert dict(forms.reconstruct_field().items()) == dict(forms.field.items())


def test_maurer_cartan_fails_for_non_invariant_pairing():
    """[X0, X1] = X1 has no invariant form, so the identity pairing is not cyclic"""
    aff = LieStructure(2, {(1, 0, 1): 1}, name="aff", invariant_form={(0, 0): 1, (1, 1): 1})
    g = Linfty.lie_algebra(aff)
    action, report = Linfty.hmc_action(g)
    assert report.status == FAIL
    assert Linfty.check_linfty_mc(g, action).status == FAIL


BIVECTORS = {
    "so3": (lambda x: x[2], lambda x: x[0], lambda x: x[1]),
    "curl-free": (lambda x: x[2] ** 2, lambda x: x[0], lambda x: x[1]),
    "quadratic": (lambda x: x[2] + x[0] ** 2, lambda x: x[0], lambda x: x[1]),
    "sheared": (lambda x: x[2], lambda x: x[1], lambda x: 0 * x[0]),
}


@pytest.mark.parametrize("name", sorted(BIVECTORS))
def test_master_equation_matches_jacobiator(name):
    """{Theta, Theta} is a constant multiple of the Jacobiator computed with sympy"""
    pi12, pi23, pi31 = BIVECTORS[name]
    system = AKSZTargets.psm_system(3)
    coords = [Poly.coordinate(system, f"x{i}") for i in (1, 2, 3)]
    target = AKSZTargets.build_psm_target(
        {(0, 1): pi12(coords), (1, 2): pi23(coords), (2, 0): pi31(coords)}, 3)

    x = sp.symbols("x1:4")
    pi = sp.zeros(3, 3)
    pi[0, 1], pi[1, 2], pi[2, 0] = pi12(x), pi23(x), pi31(x)
    pi = pi - pi.T
    jacobiator = sp.expand(sum(pi[0, l] * sp.diff(pi[1, 2], x[l]) + pi[1, l] * sp.diff(pi[2, 0], x[l])
                               + pi[2, l] * sp.diff(pi[0, 1], x[l]) for l in range(3)))

    bracket = BVOperations.poisson_bracket(target.omega, target.theta, target.theta)
    momenta = {system.index(f"p{i}") for i in (1, 2, 3)}
    base_part = sp.Integer(0)
    for (mono, _, _), value in bracket.items():
        assert {idx for idx, _ in mono if idx in momenta} == momenta
        term = sp.Rational(value.numerator, value.denominator)
        for idx, exp in mono:
            if idx not in momenta:
                term *= x[idx] ** exp
        base_part += term

    assert target.certified == (jacobiator == 0)
    if jacobiator == 0:
        assert bracket.is_zero()
    else:
        ratio = sp.simplify(base_part / jacobiator)
        assert ratio.is_number and ratio != 0


@pytest.mark.parametrize("seed", range(3))
def test_formal_global_action_solves_dcme(so3_target, seed):
    """d_x S + 1/2 {S, S} vanishes below the map's order"""
    phi = FormalExpMap.random(so3_target.base_names, order=3, seed=seed, max_arity=2)
    data = FormalGlobal.formal_global_action(so3_target, SourceModel.torus(2), phi)
    report = FormalGlobal.check_global(data)
    assert report.status == PASS, report.residual
    assert report.verified_order == 2


def test_dcme_fails_without_r_term(so3_target):
    """Dropping the R-term leaves the x-derivative of the pulled-back interaction"""
    phi = FormalExpMap.linear(so3_target.base_names, order=3)
    data = FormalGlobal.formal_global_action(so3_target, SourceModel.torus(2), phi)
    report = FormalGlobal.check_global(data, include_r=False)
    assert report.status == FAIL
    assert "R-term removed" in report.notes
