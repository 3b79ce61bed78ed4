"""
Builds in-memory models from a parsed theory file.

Every object is built on first use, so a file only needs the sections its
checks read. Errors point at the offending entry.
"""

import logging
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.algorithms.aksz.formal_global import FormalGlobal, FormalGlobalAction
from core.algorithms.aksz.targets import AKSZTargets
from core.algorithms.aksz.transgression import Transgression
from core.algorithms.formal.formal_geometry import FormalGeometry
from core.algorithms.observables.auxiliary import FormalGlobalAuxiliary, PreObservables
from core.algorithms.observables.qbundles import QBundles
from core.config import DEFAULT_SETTINGS, Settings
from core.errors import ValidationError
from core.models.connection_one_form import FormalVolume
from core.models.embedding_model import EmbeddingModel
from core.models.finite_bv_theory import FiniteBVTheory
from core.models.formal_exp_map import FormalExpMap
from core.models.graded_coordinate import BASE, CoordinateSystem, GradedCoordinate
from core.models.lie_structure import LieStructure
from core.models.operator_field import OperatorField
from core.models.poly import Poly
from core.models.qbundle_spec import QBundleSpec
from core.models.source_model import SourceModel
from core.models.symplectic import ConstantSymplectic
from core.models.target_spec import TargetSpec
from cli.services.expression_parser import ExpressionParser
from cli.services.theory_parser import TheorySpecFile

logger = logging.getLogger(__name__)

TARGET_KINDS = ("psm", "bf", "custom")
MAP_KINDS = ("linear", "random", "custom")
BUNDLE_KINDS = ("wilson", "psm")


class TheoryBuilder:
    """
    Lazily turn a TheorySpecFile into targets, models and bundles.

    Usage:
        builder = TheoryBuilder(TheoryParser.parse_file(path))
        builder.target.theta
        builder.formal_global_action.action
    """

    def __init__(self, spec: TheorySpecFile, order: Optional[int] = None, seed: Optional[int] = None,
                 settings: Settings = DEFAULT_SETTINGS):
        """
        Args:
            spec: Parsed theory file
            order: Truncation order overriding [checks] order
            seed: Seed overriding [checks] seed
        """
        self._spec = spec
        file_order = self._int('checks', 'order') if spec.has('checks', 'order') else None
        file_seed = self._int('checks', 'seed') if spec.has('checks', 'seed') else None
        self._settings = settings.with_overrides(file_order, file_seed).with_overrides(order, seed)
        if self._settings.order < 1:
            raise ValidationError(f"Truncation order must be >= 1, got {self._settings.order}")

    # ------------------------------------------------------------- helpers

    @property
    def spec(self) -> TheorySpecFile:
        return self._spec

    @property
    def settings(self) -> Settings:
        return self._settings

    @property
    def name(self) -> str:
        return self._spec.get('theory', 'name', Path(self._spec.origin).stem)

    def _int(self, section: str, key: str, default: Optional[int] = None) -> int:
        if not self._spec.has(section, key):
            if default is None:
                raise self._spec.error(section, key, f"missing key '{key}' in section [{section}]")
            return default
        value = self._spec.get(section, key)
        try:
            return int(value)
        except ValueError:
            raise self._spec.error(section, key, f"'{key}' must be an integer, got '{value}'") from None

    def _choice(self, section: str, key: str, choices: Tuple[str, ...], default: Optional[str] = None) -> str:
        value = self._spec.get(section, key, default)
        if value is None:
            raise self._spec.error(section, key, f"missing key '{key}' in section [{section}]")
        if value not in choices:
            raise self._spec.error(section, key, f"'{key}' must be one of {', '.join(choices)}, got '{value}'")
        return value

    def _expression(self, section: str, key: str, system: CoordinateSystem) -> Poly:
        entry = self._spec.entry(section, key)
        return ExpressionParser.parse(entry.value, system, entry.line, entry.column, self._spec.origin)

    def _pairs(self, section: str, key: str) -> List[Tuple[str, str]]:
        """Comma-separated 'a:b' pairs."""
        value = self._spec.entry(section, key).value
        pairs = []
        for item in value.split(','):
            parts = [p.strip() for p in item.split(':')]
            if len(parts) != 2 or not all(parts):
                raise self._spec.error(section, key, f"expected 'a:b' pairs, got '{item.strip()}'")
            pairs.append((parts[0], parts[1]))
        return pairs

    def _list(self, section: str, key: str) -> List[str]:
        return [item.strip() for item in self._spec.entry(section, key).value.split(',') if item.strip()]

    # -------------------------------------------------------------- target

    @cached_property
    def target_kind(self) -> str:
        return self._choice('target', 'kind', TARGET_KINDS)

    @cached_property
    def lie(self) -> LieStructure:
        """The Lie algebra of a BF target."""
        if self.target_kind != "bf":
            raise self._spec.error('target', 'kind', "this check needs a bf target")
        try:
            return LieStructure.builtin(self._spec.entry('target', 'lie').value)
        except ValidationError as exc:
            raise self._spec.error('target', 'lie', str(exc)) from exc

    @cached_property
    def target(self) -> TargetSpec:
        """
        Raises:
            ParseError: On malformed entries
            ValidationError: If the target data is inconsistent
        """
        kind = self.target_kind
        if kind == "bf":
            target = AKSZTargets.build_bf_target(self.lie, self._int('target', 'dimension'))
        elif kind == "psm":
            target = self._psm_target()
        else:
            target = self._custom_target()
        logger.info("Built target %s (d=%d, %d coordinates)", target.name, target.dimension, len(target.system))
        return target

    def _psm_target(self) -> TargetSpec:
        m = self._int('target', 'dimension')
        if not 1 <= m <= 9:
            raise self._spec.error('target', 'dimension', "PSM dimension must be between 1 and 9")
        system = AKSZTargets.psm_system(m)
        pi: Dict[Tuple[int, int], Poly] = {}
        for key in self._spec.keys('target', 'pi'):
            digits = key[2:]
            if len(digits) != 2 or not digits.isdigit():
                raise self._spec.error('target', key, f"bivector keys are pi<i><j>, got '{key}'")
            i, j = int(digits[0]) - 1, int(digits[1]) - 1
            if not (0 <= i < m and 0 <= j < m):
                raise self._spec.error('target', key, f"bivector index out of range in '{key}'")
            pi[(i, j)] = self._expression('target', key, system)
        return AKSZTargets.build_psm_target(pi, m, self._spec.get('target', 'name', "psm"))

    @cached_property
    def coordinates(self) -> CoordinateSystem:
        """The [coordinates] section: 'name = degree [kind]'."""
        coords = []
        for key in self._spec.keys('coordinates'):
            fields = self._spec.get('coordinates', key).split()
            try:
                degree = int(fields[0])
            except ValueError:
                raise self._spec.error('coordinates', key, f"degree of '{key}' must be an integer") from None
            kind = fields[1] if len(fields) > 1 else BASE
            coords.append(GradedCoordinate(key, degree, kind))
        if not coords:
            raise self._spec.error('coordinates', '', "no coordinates declared")
        return CoordinateSystem(coords)

    def _custom_target(self) -> TargetSpec:
        system = self.coordinates
        for a, b in self._pairs('symplectic', 'pairs'):
            for name in (a, b):
                if name not in system:
                    raise self._spec.error('symplectic', 'pairs', f"unknown coordinate '{name}'")
        omega = ConstantSymplectic.from_darboux_pairs(system, self._int('symplectic', 'degree'),
                                                      self._pairs('symplectic', 'pairs'))
        theta = self._expression('theta', 'expression', system)
        split = self._pairs('symplectic', 'split') if self._spec.has('symplectic', 'split') else []
        return TargetSpec(self._spec.get('target', 'name', self.name), self._int('target', 'dimension'),
                          omega, theta, split)

    # -------------------------------------------------------- source model

    @cached_property
    def source_model(self) -> SourceModel:
        """
        Raises:
            ParseError: On malformed entries
            ValidationError: If the model violates the cdga axioms
        """
        if self._spec.has('source_model', 'builtin'):
            try:
                return SourceModel.builtin(self._spec.get('source_model', 'builtin'))
            except ValidationError as exc:
                raise self._spec.error('source_model', 'builtin', str(exc)) from exc
        basis = self._pairs('source_model', 'basis')
        labels = [label for label, _ in basis]
        try:
            degrees = [int(degree) for _, degree in basis]
        except ValueError:
            raise self._spec.error('source_model', 'basis', "basis degrees must be integers") from None
        index = {label: a for a, label in enumerate(labels)}
        vectors = CoordinateSystem([GradedCoordinate(label, 0, BASE) for label in labels[1:]])

        def label_index(key: str, prefix: str) -> int:
            label = key[len(prefix):]
            if label not in index:
                raise self._spec.error('source_model', key, f"unknown basis label '{label}'")
            return index[label]

        def vector(key: str) -> Dict[int, Fraction]:
            poly = self._expression('source_model', key, vectors)
            out: Dict[int, Fraction] = {}
            for (mono, k, im), value in poly.items():
                if k or im or len(mono) > 1 or (mono and mono[0][1] != 1):
                    raise self._spec.error('source_model', key, "expected a rational combination of basis labels")
                out[mono[0][0] + 1 if mono else 0] = value
            return out

        products = {}
        for key in self._spec.keys('source_model', 'product.'):
            parts = key.split('.')
            if len(parts) != 3:
                raise self._spec.error('source_model', key, "product keys are product.<a>.<b>")
            products[(label_index(f"product.{parts[1]}", "product."),
                      label_index(f"product.{parts[2]}", "product."))] = vector(key)
        differential = {label_index(key, "differential."): vector(key)
                        for key in self._spec.keys('source_model', 'differential.')}
        integral = {}
        for key in self._spec.keys('source_model', 'integral.'):
            value = self._expression('source_model', key, vectors)
            if not value.is_constant() or not value.constant_term().is_rational():
                raise self._spec.error('source_model', key, "integrals must be rational numbers")
            integral[label_index(key, "integral.")] = value.constant_term().rational()
        return SourceModel(self._spec.get('source_model', 'name', self.name), self._int('source_model', 'dimension'),
                           labels, degrees, products, differential, integral)

    # ------------------------------------------------- exponential maps

    @cached_property
    def exp_map(self) -> FormalExpMap:
        """The formal exponential map on the target's base coordinates."""
        return self._exp_map(self.target.base_names, 'exp_map', 'kind')

    def _exp_map(self, base_names: List[str], section: str, key: str) -> FormalExpMap:
        if not base_names:
            raise self._spec.error('target', 'kind', "target has no base coordinates for an exponential map")
        order, seed = self._settings.order, self._settings.seed
        kind = self._choice(section, key, MAP_KINDS, "linear")
        if kind == "linear":
            return FormalExpMap.linear(base_names, order)
        if kind == "random":
            x_dependent = self._spec.get('exp_map', 'x_dependent', "true").lower() == "true"
            return FormalExpMap.random(base_names, order, seed, self._int('exp_map', 'max_arity', 3), x_dependent)
        template = FormalExpMap.linear(base_names, order)
        coefficients = {}
        for entry_key in self._spec.keys('exp_map', 'c'):
            head, _, lower = entry_key[1:].partition('_')
            if not head.isdigit() or not lower.isdigit():
                raise self._spec.error('exp_map', entry_key, f"coefficient keys are c<i>_<j1j2...>, got '{entry_key}'")
            coefficients[(int(head) - 1, tuple(int(j) - 1 for j in lower))] = \
                self._expression('exp_map', entry_key, template.system)
        return FormalExpMap(base_names, order, coefficients)

    @cached_property
    def volume(self) -> FormalVolume:
        """[volume] density on the fiber map, or the pullback of the coordinate volume."""
        phi = self.fiber_map
        if not self._spec.has('volume', 'density'):
            return FormalGeometry.pullback_volume(phi)
        density = self._expression('volume', 'density', phi.system)
        try:
            return FormalVolume(density, phi.order)
        except ValidationError as exc:
            raise self._spec.error('volume', 'density', str(exc)) from exc

    # ------------------------------------------------------------ theories

    @cached_property
    def embedding(self) -> EmbeddingModel:
        """Coordinate subtorus of dimension [bundle] submanifold in the source torus."""
        model = self.source_model
        if not model.name.startswith("torus"):
            raise self._spec.error('source_model', 'builtin', "embedded submanifolds need a torus source model")
        k = self._int('bundle', 'submanifold')
        if not 0 <= k <= model.dimension:
            raise self._spec.error('bundle', 'submanifold', f"submanifold dimension must be in 0..{model.dimension}")
        return EmbeddingModel.torus_slice(model.dimension, k)

    @cached_property
    def theory(self) -> FiniteBVTheory:
        """The target transgressed over the source model."""
        return Transgression.transgress(self.target, self.source_model)

    @cached_property
    def ambient(self) -> FiniteBVTheory:
        """The transgressed theory over the ambient model of the embedding."""
        return Transgression.transgress(self.target, self.embedding.ambient)

    @cached_property
    def formal_global_action(self) -> FormalGlobalAction:
        return FormalGlobal.formal_global_action(self.target, self.source_model, self.exp_map,
                                                 self._settings.order)

    @cached_property
    def formal_global_auxiliary(self) -> FormalGlobalAuxiliary:
        return PreObservables.formal_global_auxiliary(self.bundle, self.ambient, self.embedding, self.fiber_map)

    @cached_property
    def insertion(self) -> Optional[Poly]:
        """[observable] insertion over the auxiliary fields, ambient fields and (y, dy)."""
        if not self._spec.has('observable', 'insertion'):
            return None
        return self._expression('observable', 'insertion', self.formal_global_auxiliary.theory.system)

    # -------------------------------------------------------------- bundles

    @cached_property
    def bundle_kind(self) -> str:
        return self._choice('bundle', 'kind', BUNDLE_KINDS)

    @cached_property
    def fiber_omega(self) -> ConstantSymplectic:
        """Fiber of a PSM bundle: 'fiber = s:0, q:0', degree and Darboux pairs."""
        coords = []
        for name, degree in self._pairs('bundle', 'fiber'):
            try:
                coords.append(GradedCoordinate(name, int(degree), BASE))
            except ValueError:
                raise self._spec.error('bundle', 'fiber', f"degree of '{name}' must be an integer") from None
        system = CoordinateSystem(coords)
        pairs = self._pairs('bundle', 'fiber_pairs')
        for a, b in pairs:
            for name in (a, b):
                if name not in system:
                    raise self._spec.error('bundle', 'fiber_pairs', f"unknown fiber coordinate '{name}'")
        return ConstantSymplectic.from_darboux_pairs(system, self._int('bundle', 'fiber_degree', 0), pairs)

    @cached_property
    def vertical(self) -> Dict[int, Poly]:
        """PSM vertical components V^i from 'v<i> = expr', 0-based."""
        system = self.target.system.union(self.fiber_omega.system)
        vertical = {}
        for key in self._spec.keys('bundle', 'v'):
            if not key[1:].isdigit():
                raise self._spec.error('bundle', key, f"vertical keys are v<i>, got '{key}'")
            vertical[int(key[1:]) - 1] = self._expression('bundle', key, system)
        return vertical

    @cached_property
    def bundle(self) -> QBundleSpec:
        """
        Raises:
            ParseError: On malformed entries
            ValidationError: If the bundle data is inconsistent
        """
        if self.bundle_kind == "wilson":
            return QBundles.build_bf_wilson_bundle(self.lie, self.target.dimension)
        spec = QBundles.psm_bundle(self.target, self.fiber_omega, self.vertical, f"{self.name}/bundle")
        split = self._pairs('bundle', 'fiber_split') if self._spec.has('bundle', 'fiber_split') else []
        return QBundleSpec(spec.name, spec.base, spec.fiber_omega, spec.theta_e, split)

    @cached_property
    def fiber_map(self) -> FormalExpMap:
        """Exponential map on the fiber base of a split bundle."""
        bases = [y for y, _ in self.bundle.fiber_split]
        if not bases:
            raise self._spec.error('bundle', 'kind', "bundle has no fiber split")
        return self._exp_map(bases, 'bundle', 'fiber_map')

    # ------------------------------------------------------------ operators

    @cached_property
    def operator(self) -> OperatorField:
        """
        [operator] terms 'term<N> = expr | matrix' over the target system;
        matrix rows are separated by ';', entries by spaces.
        """
        system = self.target.system
        dimension = self._int('operator', 'dimension')
        try:
            hbar = float(self._spec.get('operator', 'hbar', "1"))
        except ValueError:
            raise self._spec.error('operator', 'hbar', "hbar must be a number") from None
        terms = []
        for key in self._spec.keys('operator', 'term'):
            entry = self._spec.entry('operator', key)
            poly_text, bar, matrix_text = entry.value.partition('|')
            if not bar:
                raise self._spec.error('operator', key, "expected 'expression | matrix'")
            poly = ExpressionParser.parse(poly_text.strip(), system, entry.line, entry.column, self._spec.origin)
            matrix = self._matrix('operator', key, matrix_text, dimension)
            terms.append((poly, matrix))
        if not terms:
            raise self._spec.error('operator', 'dimension', "operator has no terms")
        return OperatorField.from_terms(system, terms, hbar)

    def _matrix(self, section: str, key: str, text: str, dimension: int) -> np.ndarray:
        try:
            rows = [[complex(item) for item in row.split()] for row in text.split(';')]
        except ValueError:
            raise self._spec.error(section, key, "matrix entries must be numbers") from None
        if len(rows) != dimension or any(len(row) != dimension for row in rows):
            raise self._spec.error(section, key, f"matrix must be {dimension}x{dimension}")
        return np.array(rows, dtype=complex)

    @cached_property
    def form_coordinates(self) -> List[str]:
        return self._list('operator', 'form') if self._spec.has('operator', 'form') else []

    def samples_path(self, override: Optional[str] = None) -> Path:
        """Sample CSV: the override, else [loop] samples relative to the theory file."""
        if override is not None:
            return Path(override)
        value = self._spec.entry('loop', 'samples').value
        path = Path(value)
        return path if path.is_absolute() else Path(self._spec.origin).parent / path

    @cached_property
    def expected_trace(self) -> Optional[complex]:
        if not self._spec.has('loop', 'expected'):
            return None
        try:
            return complex(self._spec.get('loop', 'expected').replace(' ', ''))
        except ValueError:
            raise self._spec.error('loop', 'expected', "expected trace must be a complex number") from None

    # -------------------------------------------------------------- checks

    @cached_property
    def checks(self) -> List[str]:
        """Check names from [checks] run, in file order."""
        return self._list('checks', 'run')
