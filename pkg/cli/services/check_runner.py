"""
Runs the named checks of a theory file and collects their reports.
"""

import logging
import time
from typing import Callable, Dict, List, Optional, Sequence

from core.algorithms.aksz.formal_global import FormalGlobal
from core.algorithms.aksz.linfty import Linfty
from core.algorithms.bv.bv_operations import BVOperations
from core.algorithms.formal.formal_geometry import FormalGeometry
from core.algorithms.observables.auxiliary import PreObservables
from core.algorithms.observables.qbundles import QBundles
from core.algorithms.observables.quantum import QuantumObservables
from core.algorithms.observables.wilson import WilsonLoops
from core.algorithms.observables.wilson_surface import WilsonSurfaces
from core.models.formal_exp_map import FormalExpMap
from core.models.poly import Poly
from core.errors import UnsupportedIntegralError
from core.models.report import FAIL, PASS, UNSUPPORTED, Report
from core.models.symplectic import BVLaplacian
from cli.services.theory_builder import TheoryBuilder

logger = logging.getLogger(__name__)


class UnknownCheckError(ValueError):
    """Raised for check names the runner does not know."""


class CheckRunner:
    """
    Dispatch check names to the algorithms.

    Usage:
        runner = CheckRunner(builder)
        reports = runner.run()          # the file's [checks] run list
    """

    def __init__(self, builder: TheoryBuilder, samples: Optional[str] = None):
        """
        Args:
            builder: Builder of the theory file
            samples: Sample CSV overriding [loop] samples
        """
        self._builder = builder
        self._samples = samples
        self._checks: Dict[str, Callable[[], Report]] = {
            'cme': self._cme,
            'qme': self._qme,
            'flatness': self._flatness,
            'd_closed': self._d_closed,
            'homotopy': self._homotopy,
            'family': self._family,
            'dcme': self._dcme,
            'linfty': self._linfty,
            'qbundle': self._qbundle,
            'psm_vertical_field': self._psm_vertical_field,
            'pre_observable': self._pre_observable,
            'obstruction': self._obstruction,
            'dqme': self._dqme,
            'quantum_flatness': self._quantum_flatness,
            'wilson_loop': self._wilson_loop,
            'wilson_surface': self._wilson_surface,
        }

    @property
    def available(self) -> List[str]:
        return list(self._checks)

    def validate(self, names: Sequence[str]) -> None:
        """
        Raises:
            UnknownCheckError: If a name is not a known check
        """
        unknown = [n for n in names if n not in self._checks]
        if unknown:
            raise UnknownCheckError(f"Unknown check(s): {', '.join(unknown)} "
                                    f"(available: {', '.join(self._checks)})")

    def run(self, names: Optional[Sequence[str]] = None) -> List[Report]:
        """
        Run checks in the given order (default: the file's list).

        Raises:
            UnknownCheckError: Before running anything, on an unknown name
            ParseError: If a check needs a missing or malformed section
            ValidationError: If the built models are inconsistent
        """
        names = list(names) if names is not None else self._builder.checks
        self.validate(names)
        reports = []
        for name in names:
            start = time.perf_counter()
            report = self._checks[name]()
            if report.check != name:
                report = report.renamed(name)
            report.elapsed = time.perf_counter() - start
            logger.info("%s: %s in %.3fs", name, report.status, report.elapsed)
            reports.append(report)
        return reports

    # ---------------------------------------------------------------- checks

    def _cme(self) -> Report:
        b = self._builder
        if b.spec.has('source_model'):
            theory = b.theory
            return BVOperations.check_master_equation(theory.omega, theory.action)
        return BVOperations.check_master_equation(b.target.omega, b.target.theta)

    def _qme(self) -> Report:
        theory = self._builder.theory
        return BVOperations.check_qme(BVLaplacian(theory.omega), theory.action)

    def _flatness(self) -> Report:
        return FormalGeometry.check_flatness(FormalGeometry.compute_R(self._builder.exp_map))

    def _d_closed(self) -> Report:
        b = self._builder
        phi = b.exp_map
        f = FormalGeometry.random_base_function(phi, 3, b.settings.seed)
        return FormalGeometry.check_d_closed(FormalGeometry.compute_R(phi), phi, f)

    def _homotopy(self) -> Report:
        """The homotopy identity on one section per bidegree (r, s), r + s <= order."""
        phi = self._builder.exp_map
        forms = phi.form_system
        fiber_sum = Poly.zero(forms)
        for p in phi.fiber_names:
            fiber_sum = fiber_sum + Poly.coordinate(forms, p)
        reports = []
        for r in range(min(phi.dimension, phi.order) + 1):
            for s in range(phi.order - r + 1):
                if r + s == 0:
                    continue
                sigma = fiber_sum ** s
                for dx in phi.differential_names[:r]:
                    sigma = sigma * Poly.coordinate(forms, dx)
                reports.append(FormalGeometry.homotopy_identity(sigma, phi).renamed(f"homotopy({r},{s})"))
        return Report.combine("homotopy", reports)

    def _family(self) -> Report:
        phi = self._builder.exp_map
        family = FormalExpMap.interpolate(FormalExpMap.linear(phi.base_names, phi.order), phi, "t")
        _, report = FormalGeometry.family_generator(family, "t")
        return report

    def _dcme(self) -> Report:
        return FormalGlobal.check_global(self._builder.formal_global_action)

    def _linfty(self) -> Report:
        b = self._builder
        g = Linfty.lie_algebra(b.lie)
        reports = [Linfty.check_ce_square(b.lie).renamed("ce_square")]
        if b.spec.has('source_model'):
            forms = Linfty.forms_linfty(b.source_model, g, b.settings.max_arity)
            reports.append(Linfty.check_homotopy_jacobi(forms, b.settings.max_arity))
            _, mc = Linfty.hmc_action(forms)
            reports.append(mc.renamed("hmc_cme"))
        else:
            reports.append(Linfty.check_homotopy_jacobi(g, b.settings.max_arity))
        return Report.combine("linfty", reports)

    def _qbundle(self) -> Report:
        return QBundles.check_hamiltonian_qbundle(self._builder.bundle)

    def _psm_vertical_field(self) -> Report:
        b = self._builder
        phi = b.exp_map if b.spec.has('exp_map') else None
        return QBundles.check_psm_vertical_field(b.target, b.fiber_omega, b.vertical, phi)

    def _pre_observable(self) -> Report:
        b = self._builder
        aux = PreObservables.transgress_auxiliary(b.bundle, b.ambient, b.embedding)
        return PreObservables.check_pre_observable(b.ambient, aux)

    def _obstruction(self) -> Report:
        return PreObservables.check_global_obstruction(self._builder.formal_global_auxiliary)

    def _dqme(self) -> Report:
        """Fiber integral of the formal global auxiliary theory over its default Lagrangian."""
        b = self._builder
        phi = b.fiber_map
        precondition = FormalGeometry.check_volume_compatibility(FormalGeometry.compute_R(phi), b.volume, phi)
        try:
            observable = QuantumObservables.formal_global_observable(b.formal_global_auxiliary, b.ambient,
                                                                     insertion=b.insertion)
        except UnsupportedIntegralError as exc:
            return Report("dqme", UNSUPPORTED, notes=[str(exc)])
        return QuantumObservables.check_dqme(observable, precondition)

    def _quantum_flatness(self) -> Report:
        b = self._builder
        target = b.target
        field = BVOperations.hamiltonian_vf(target.omega, target.theta)
        return WilsonLoops.check_quantum_flatness(b.operator, field, tol=b.settings.abs_tol)

    def _wilson_loop(self) -> Report:
        """Trace of the holonomy; compared with [loop] expected when given."""
        b = self._builder
        samples = WilsonLoops.load_samples(b.samples_path(self._samples))
        theta = b.operator
        value = WilsonLoops.wilson_loop_trace(theta, samples, form_coordinates=b.form_coordinates)
        details = {'trace': [value.real, value.imag], 'samples': len(samples), 'hbar': theta.hbar}
        expected = b.expected_trace
        if expected is None:
            return Report("wilson_loop", PASS, details=details, notes=["no expected value"])
        error = abs(value - expected)
        details['error'] = error
        if error <= b.settings.rel_tol * max(1.0, abs(expected)):
            return Report("wilson_loop", PASS, details=details)
        return Report("wilson_loop", FAIL, residual=[f"trace {value:.12g} differs from {expected:.12g}"],
                      details=details)

    def _wilson_surface(self) -> Report:
        b = self._builder
        surface = WilsonSurfaces.surface_theory(b.lie, b.ambient, b.embedding)
        return WilsonSurfaces.check_wilson_surface_cme(b.lie, b.ambient, surface, b.embedding)
