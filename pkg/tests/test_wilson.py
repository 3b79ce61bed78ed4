import numpy as np
import pandas as pd
import pytest
from scipy.linalg import expm

from core.algorithms.aksz.targets import AKSZTargets
from core.algorithms.bv.bv_operations import BVOperations
from core.algorithms.observables.wilson import EXPM, WilsonLoops
from core.errors import ValidationError
from core.models.operator_field import OperatorField
from core.models.poly import Poly
from core.models.report import FAIL, PASS
from core.models.sampled_loop_form import SampledLoopForm

SIGMA = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def so3_target():
    system = AKSZTargets.psm_system(3)
    x1, x2, x3 = (Poly.coordinate(system, f"x{i}") for i in (1, 2, 3))
    return AKSZTargets.build_psm_target({(0, 1): x3, (1, 2): x1, (2, 0): x2}, 3)


def spin_field(target, hbar):
    """p_j tensor -sigma_j / (2 hbar)."""
    return OperatorField.linear(target.system, {f"p{j + 1}": -SIGMA[j] / (2 * hbar) for j in range(3)}, hbar)


def loop_function(t):
    """A closed non-commuting loop of su(2) elements."""
    angle = 2 * np.pi * t
    return 0.3 * np.cos(angle) * SIGMA[0] + 0.3 * np.sin(angle) * SIGMA[1] + 0.2 * SIGMA[2]


def test_constant_loop_converges_at_first_order():
    """The product formula error halves when the step halves"""
    matrix = 0.4 * SIGMA[0] + 0.1 * SIGMA[2]
    exact = np.trace(expm(1j * matrix))
    errors = [abs(WilsonLoops.trace_of_form(SampledLoopForm.constant(matrix, n), 1.0) - exact)
              for n in (200, 400, 800)]
    assert errors[0] > errors[1] > errors[2]
    assert errors[1] / errors[0] == pytest.approx(0.5, abs=0.05)
    assert errors[2] / errors[1] == pytest.approx(0.5, abs=0.05)


def test_su2_loop_converges_at_first_order():
    """Product holonomies of a non-commuting su(2) loop approach the fine expm holonomy at first order"""
    fine = [WilsonLoops.wilson_loop_path(SampledLoopForm.from_function(loop_function, n), 1.0, method=EXPM)
            for n in (2 ** 13, 2 ** 14)]
    reference = 2 * fine[1] - fine[0]
    errors = [np.linalg.norm(WilsonLoops.wilson_loop_path(SampledLoopForm.from_function(loop_function, n), 1.0)
                             - reference)
              for n in (256, 512, 1024, 2048)]
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    assert all(1.8 <= ratio <= 2.2 for ratio in ratios), ratios
    commutator = loop_function(0.0) @ loop_function(0.25) - loop_function(0.25) @ loop_function(0.0)
    assert np.abs(commutator).max() > 0.1


def test_exact_steps_for_constant_loop():
    """With exact step exponentials a constant loop is reproduced exactly"""
    matrix = 0.4 * SIGMA[0] + 0.1 * SIGMA[2]
    value = WilsonLoops.trace_of_form(SampledLoopForm.constant(matrix, 8), 0.5, method=EXPM)
    assert value == pytest.approx(np.trace(expm(2j * matrix)))


def test_nilpotent_loop_has_trivial_trace():
    """Commuting nilpotent steps give 1 + N exactly"""
    nilpotent = np.array([[0, 1], [0, 0]], dtype=complex)
    form = SampledLoopForm.from_function(lambda t: (1 + np.sin(2 * np.pi * t)) * nilpotent, 64)
    assert WilsonLoops.trace_of_form(form, 1.0) == pytest.approx(2.0)
    holonomy = WilsonLoops.wilson_loop_path(form, 1.0)
    assert holonomy[0, 1] != 0
    assert holonomy[1, 0] == 0


def test_commuting_loop_matches_integral():
    """Diagonal loops are the exponential of the Riemann sum"""
    form = SampledLoopForm.from_function(lambda t: np.diag([np.cos(2 * np.pi * t), 1.0]), 2000)
    value = WilsonLoops.trace_of_form(form, 1.0, method=EXPM)
    riemann = sum(dt * m for dt, m in form.intervals())
    assert value == pytest.approx(np.exp(1j * riemann[0, 0]) + np.exp(1j * riemann[1, 1]))


@pytest.mark.parametrize("method", ["product", EXPM])
def test_trace_is_conjugation_invariant(method):
    """tr U does not change under a constant gauge transformation"""
    form = SampledLoopForm.from_function(loop_function, 128)
    g = np.array([[1, 2], [0.5, 3]], dtype=complex)
    assert WilsonLoops.trace_of_form(form.conjugated(g), 0.7, method) == pytest.approx(
        WilsonLoops.trace_of_form(form, 0.7, method))


def test_open_path_rejected():
    """Only closed loops have a gauge-invariant trace"""
    form = SampledLoopForm.from_function(lambda t: t * SIGMA[2], 16)
    assert not form.is_closed
    with pytest.raises(ValidationError):
        WilsonLoops.trace_of_form(form, 1.0)


def test_invalid_partitions():
    with pytest.raises(ValidationError):
        SampledLoopForm([0.0], np.zeros((1, 2, 2)))
    with pytest.raises(ValidationError):
        SampledLoopForm([0.0, 0.5, 0.5], np.zeros((3, 2, 2)))


@pytest.mark.parametrize("kwargs", [{"hbar": 0.0}, {"hbar": 1.0, "method": "rk4"}])
def test_invalid_ordering_arguments(kwargs):
    form = SampledLoopForm.constant(SIGMA[0], 4)
    with pytest.raises(ValidationError):
        WilsonLoops.path_ordered_exp(form, **kwargs)


def test_frame_layout():
    """Entry columns come in (real, imaginary) pairs of a square matrix"""
    frame = pd.DataFrame({"t": [0.0, 1.0], "m11r": [1.0, 1.0], "m11i": [0.5, 0.5]})
    form = SampledLoopForm.from_frame(frame)
    assert form.dimension == 1
    assert form.values[0, 0, 0] == pytest.approx(1 + 0.5j)


def test_operator_field_loop_from_samples():
    """Constant p3 samples pull back to exp(-i sigma_3 / 2) by the product formula"""
    target = so3_target()
    theta = spin_field(target, 1.0)
    steps = 16
    samples = pd.DataFrame({"t": np.linspace(0, 1, steps + 1), "p1": 0.0, "p2": 0.0, "p3": 1.0})
    value = WilsonLoops.wilson_loop_trace(theta, samples, form_coordinates=["p1", "p2", "p3"])
    assert value == pytest.approx(1.769081481846, rel=1e-10)


def test_unknown_sample_column():
    target = so3_target()
    samples = pd.DataFrame({"t": [0.0, 1.0], "q": [0.0, 0.0]})
    with pytest.raises(ValidationError):
        WilsonLoops.wilson_loop_trace(spin_field(target, 1.0), samples)


def test_load_samples_needs_time_column(tmp_path):
    path = tmp_path / "loop.csv"
    path.write_text("s,p1\n0,1\n1,1\n")
    with pytest.raises(ValidationError):
        WilsonLoops.load_samples(path)


def test_load_samples_missing_file(tmp_path):
    with pytest.raises(ValidationError):
        WilsonLoops.load_samples(tmp_path / "missing.csv")


@pytest.mark.parametrize("hbar", [1.0, 0.5, 2.0])
def test_spin_representation_is_quantum_flat(hbar):
    """p_j tensor -sigma_j / (2 hbar) solves Q(Theta) + i hbar Theta^2 = 0"""
    target = so3_target()
    field = BVOperations.hamiltonian_vf(target.omega, target.theta)
    report = WilsonLoops.check_quantum_flatness(spin_field(target, hbar), field)
    assert report.status == PASS, report.residual
    assert report.details['max_abs'] < 1e-12


def test_rescaled_representation_is_not_flat():
    """Doubling the matrices breaks the quadratic term balance"""
    target = so3_target()
    field = BVOperations.hamiltonian_vf(target.omega, target.theta)
    theta = spin_field(target, 1.0).scale(2)
    report = WilsonLoops.check_quantum_flatness(theta, field)
    assert report.status == FAIL
    assert report.residual
