"""
Wilson loop numerics: path-ordered exponentials of sampled matrix
1-forms, their traces, and the quantum flatness condition

    Q(Theta) + dx^l R_l(Theta) + i hbar Theta^2 = 0

for operator-valued Theta.
"""

import logging
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd
from scipy.linalg import expm

from ...config import DEFAULT_SETTINGS
from ...errors import ValidationError
from ...models.connection_one_form import ConnectionOneForm
from ...models.derivation import Derivation
from ...models.operator_field import OperatorField
from ...models.poly import Poly
from ...models.report import FAIL, PASS, Report
from ...models.sampled_loop_form import SampledLoopForm

logger = logging.getLogger(__name__)

PRODUCT = "product"
EXPM = "expm"


class WilsonLoops:
    """Static holonomy and flatness operations."""

    @staticmethod
    def path_ordered_exp(form: SampledLoopForm, hbar: float, method: str = PRODUCT) -> np.ndarray:
        """
        Ordered product over the partition, later times on the left:

            U = (1 + (i/hbar) dt_{N-1} M_{N-1}) ... (1 + (i/hbar) dt_0 M_0)

        With method "expm" each factor is the exact exponential of its step.

        Raises:
            ValidationError: On an unknown method or hbar = 0
        """
        if hbar == 0:
            raise ValidationError("hbar must be nonzero")
        if method not in (PRODUCT, EXPM):
            raise ValidationError(f"Unknown path-ordering method '{method}'")
        n = form.dimension
        identity = np.eye(n, dtype=complex)
        factor = 1j / hbar
        result = identity.copy()
        for dt, matrix in form.intervals():
            step = factor * dt * matrix
            result = (expm(step) if method == EXPM else identity + step) @ result
        return result

    @staticmethod
    def wilson_loop_path(form: SampledLoopForm, hbar: float, method: str = PRODUCT) -> np.ndarray:
        """Untraced holonomy of an open or closed path."""
        return WilsonLoops.path_ordered_exp(form, hbar, method)

    @staticmethod
    def trace_of_form(form: SampledLoopForm, hbar: float, method: str = PRODUCT) -> complex:
        """
        Trace of the holonomy of a closed loop.

        Raises:
            ValidationError: If the path is open
        """
        if not form.is_closed:
            raise ValidationError("Wilson loop needs a closed path; use wilson_loop_path for open paths")
        return complex(np.trace(WilsonLoops.path_ordered_exp(form, hbar, method)))

    @staticmethod
    def wilson_loop_trace(theta: OperatorField, samples: pd.DataFrame, hbar: Optional[float] = None,
                          form_coordinates: Iterable[str] = (), method: str = PRODUCT) -> complex:
        """
        tr P exp((i/hbar) loop integral of theta(i*A)) for superfield samples.

        Args:
            samples: Frame with a `t` column and one column per coordinate
            hbar: Defaults to the operator field's hbar
            form_coordinates: Coordinates whose columns hold d/dt components

        Raises:
            ValidationError: If the loop is open
        """
        form = SampledLoopForm.from_operator_field(theta, samples, form_coordinates)
        return WilsonLoops.trace_of_form(form, theta.hbar if hbar is None else hbar, method)

    @staticmethod
    def load_samples(path: Union[str, Path]) -> pd.DataFrame:
        """
        Read a sample CSV.

        Raises:
            ValidationError: If the file cannot be parsed or has no `t` column
        """
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
            raise ValidationError(f"Cannot read samples from {path}: {exc}") from exc
        frame.columns = [str(c).strip() for c in frame.columns]
        if 't' not in frame.columns:
            raise ValidationError(f"Sample file {path} has no 't' column")
        logger.debug("Loaded %d samples from %s", len(frame), path)
        return frame

    # -------------------------------------------------------------- flatness

    @staticmethod
    def flatness_residual(theta: OperatorField, vector_field: Derivation,
                          connection: Optional[ConnectionOneForm] = None) -> OperatorField:
        """Q(Theta) + sum_l dx^l R_l(Theta) + i hbar Theta^2."""
        residual = theta.apply_derivation(vector_field)
        if connection is not None:
            system = theta.system
            for ell, base in enumerate(connection.base_names):
                differential = f"d{base}"
                if differential not in system:
                    raise ValidationError(f"Operator field has no differential coordinate '{differential}'")
                component = connection.component(ell)
                if component.system != system:
                    component = component.embed(system)
                moved = theta.apply_derivation(component)
                residual = residual + moved.left_multiply_poly(Poly.coordinate(system, differential))
        return residual + (theta * theta).scale(1j * theta.hbar)

    @staticmethod
    def check_quantum_flatness(theta: OperatorField, vector_field: Derivation,
                               connection: Optional[ConnectionOneForm] = None,
                               tol: float = DEFAULT_SETTINGS.abs_tol) -> Report:
        """
        Check the quantum flatness condition; pass iff every residual matrix
        entry is below tol.
        """
        residual = WilsonLoops.flatness_residual(theta, vector_field, connection)
        if theta.order is not None:
            residual = residual.truncate(theta.order - 1)
        size = residual.max_abs()
        names = residual.system.names
        terms = []
        for key, matrix in sorted(residual.terms.items(), key=lambda item: item[0]):
            if np.max(np.abs(matrix)) > tol:
                label = "*".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in key) or "1"
                terms.append(f"{label}: max |entry| {np.max(np.abs(matrix)):.3e}")
        status = PASS if not terms else FAIL
        logger.debug("Quantum flatness residual %.3e (%s)", size, status)
        return Report("quantum_flatness", status, theta.order - 1 if theta.order is not None else None,
                      terms[:DEFAULT_SETTINGS.residual_cap],
                      details={'max_abs': size, 'hbar': theta.hbar, 'dimension': theta.dimension})
