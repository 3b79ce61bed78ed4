"""
Matrix-valued 1-forms sampled along a path t in [0, 1].

values[r] is the contraction of the 1-form part with d/dt at times[r];
the interval [t_r, t_{r+1}] uses values[r]. Optional start and end
matrices hold the 0-form part at the endpoints.

CSV layout (read with pandas): a column `t`, then the matrix entries in
row-major order, each as a real column followed by an imaginary column.
"""

import logging
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from ..config import DEFAULT_SETTINGS
from ..errors import ValidationError
from .operator_field import OperatorField

logger = logging.getLogger(__name__)


class SampledLoopForm:
    """
    A sampled path or loop of matrices.

    Usage:
        form = SampledLoopForm(np.linspace(0, 1, 257), values)
        form.is_closed
    """

    def __init__(self, times, values, start: Optional[np.ndarray] = None, end: Optional[np.ndarray] = None):
        """
        Args:
            times: Increasing partition 0 = t_0 < ... < t_N = 1
            values: Array of shape (N + 1, n, n)
            start: 0-form part at t = 0
            end: 0-form part at t = 1

        Raises:
            ValidationError: On mismatched shapes or a non-increasing partition
        """
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=complex)
        if times.ndim != 1 or len(times) < 2:
            raise ValidationError("A sampled form needs at least two sample times (N >= 1)")
        if values.ndim != 3 or values.shape[0] != len(times) or values.shape[1] != values.shape[2]:
            raise ValidationError(f"Sample values of shape {values.shape} do not match {len(times)} times")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("Sample times must be strictly increasing")
        n = values.shape[1]
        for label, matrix in (("start", start), ("end", end)):
            if matrix is not None and np.shape(matrix) != (n, n):
                raise ValidationError(f"{label} matrix has shape {np.shape(matrix)}, expected {(n, n)}")
        self._times = times
        self._values = values
        self._start = None if start is None else np.asarray(start, dtype=complex)
        self._end = None if end is None else np.asarray(end, dtype=complex)

    @classmethod
    def constant(cls, matrix: np.ndarray, steps: int) -> 'SampledLoopForm':
        """The same matrix at every sample of a uniform partition."""
        matrix = np.asarray(matrix, dtype=complex)
        return cls(np.linspace(0.0, 1.0, steps + 1), np.repeat(matrix[None, :, :], steps + 1, axis=0))

    @classmethod
    def from_function(cls, function, steps: int) -> 'SampledLoopForm':
        """Samples function(t) on a uniform partition."""
        times = np.linspace(0.0, 1.0, steps + 1)
        return cls(times, np.stack([np.asarray(function(t), dtype=complex) for t in times]))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> 'SampledLoopForm':
        """
        Read the CSV layout described in the module docstring.

        Raises:
            ValidationError: If the column count does not describe square matrices
        """
        if 't' not in frame.columns:
            raise ValidationError("Sample table needs a 't' column")
        entries = frame.drop(columns=['t']).to_numpy(dtype=float)
        pairs = entries.shape[1] // 2
        n = int(round(np.sqrt(pairs)))
        if entries.shape[1] % 2 or n * n != pairs:
            raise ValidationError(f"{entries.shape[1]} entry columns do not form square complex matrices")
        values = (entries[:, 0::2] + 1j * entries[:, 1::2]).reshape(len(frame), n, n)
        return cls(frame['t'].to_numpy(dtype=float), values)

    @classmethod
    def from_operator_field(cls, theta: OperatorField, frame: pd.DataFrame,
                            form_coordinates: Iterable[str]) -> 'SampledLoopForm':
        """
        Pull an operator field back along sampled superfield components.

        The frame has a `t` column and one column per coordinate. Columns
        of form coordinates hold the d/dt component, the others the 0-form
        value. The 1-form part at t is sum_mu A1^mu(t) d_mu theta(A0(t)).

        Raises:
            ValidationError: If a column names an unknown coordinate
        """
        form_coordinates = list(form_coordinates)
        columns = [c for c in frame.columns if c != 't']
        unknown = [c for c in columns if c not in theta.system]
        if unknown:
            raise ValidationError(f"Sample columns {unknown} are not coordinates of the operator field")
        zero_form = [c for c in columns if c not in form_coordinates]
        derivatives = {mu: theta.derive(mu) for mu in form_coordinates if mu in columns}
        ground = theta.form_part(form_coordinates, 0)
        values = []
        points = []
        for _, row in frame.iterrows():
            point = {c: row[c] for c in zero_form}
            points.append(point)
            matrix = np.zeros((theta.dimension, theta.dimension), dtype=complex)
            for mu, derivative in derivatives.items():
                if row[mu]:
                    matrix += row[mu] * derivative.evaluate(point)
            values.append(matrix)
        logger.debug("Sampled operator field at %d times", len(values))
        return cls(frame['t'].to_numpy(dtype=float), np.stack(values),
                   ground.evaluate(points[0]), ground.evaluate(points[-1]))

    @property
    def times(self) -> np.ndarray:
        return self._times.copy()

    @property
    def values(self) -> np.ndarray:
        return self._values.copy()

    @property
    def steps(self) -> int:
        return len(self._times) - 1

    @property
    def dimension(self) -> int:
        return self._values.shape[1]

    @property
    def start(self) -> Optional[np.ndarray]:
        return self._start

    @property
    def end(self) -> Optional[np.ndarray]:
        return self._end

    def intervals(self):
        """(dt_r, M_r) for r = 0..N-1."""
        return zip(np.diff(self._times), self._values[:-1])

    @property
    def is_closed(self) -> bool:
        """Endpoint 0-form parts agree, or the first and last samples when none are given."""
        tol = DEFAULT_SETTINGS.abs_tol
        if self._start is not None and self._end is not None:
            return bool(np.allclose(self._start, self._end, rtol=DEFAULT_SETTINGS.rel_tol, atol=tol))
        return bool(np.allclose(self._values[0], self._values[-1], rtol=DEFAULT_SETTINGS.rel_tol, atol=tol))

    def conjugated(self, g: np.ndarray) -> 'SampledLoopForm':
        """g M g^-1 at every sample and endpoint."""
        g = np.asarray(g, dtype=complex)
        g_inv = np.linalg.inv(g)

        def conj(m):
            return None if m is None else g @ m @ g_inv

        return SampledLoopForm(self._times, g[None, :, :] @ self._values @ g_inv[None, :, :],
                               conj(self._start), conj(self._end))

    def __repr__(self) -> str:
        return f"SampledLoopForm(N={self.steps}, dim={self.dimension}, closed={self.is_closed})"

    def to_dict(self) -> dict:
        return {'steps': self.steps, 'dimension': self.dimension, 'closed': self.is_closed}
