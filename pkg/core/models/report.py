"""
Verification reports returned by every check.

A report never raises on mathematical failure: it records the status, the
fiber order up to which the identity was verified and a bounded summary of
the leading residual terms.
"""

from typing import Dict, Iterable, List, Mapping, Optional, Union

from ..config import CONVENTION_VERSION, DEFAULT_SETTINGS
from .poly import Poly

PASS = "pass"
FAIL = "fail"
PRECONDITION_FAILED = "precondition-failed"
UNSUPPORTED = "unsupported"

STATUSES = (PASS, FAIL, PRECONDITION_FAILED, UNSUPPORTED)

Residual = Union[Poly, Mapping[str, Poly]]


class Report:
    """
    Outcome of a single check.

    Usage:
        report = Report.from_residual("cme", residual_poly)
        if not report.passed:
            print(report.residual)
    """

    def __init__(self, check: str, status: str, verified_order: Optional[int] = None,
                 residual: Optional[List[str]] = None, notes: Optional[List[str]] = None,
                 details: Optional[Dict[str, object]] = None,
                 convention_version: str = CONVENTION_VERSION):
        """
        Initialize a report.

        Args:
            check: Name of the check
            status: One of pass, fail, precondition-failed, unsupported
            verified_order: Fiber order up to which the identity was verified
            residual: Leading residual terms, rendered
            notes: Convention notes and remarks
            details: Extra JSON-friendly data
            convention_version: Version string of the sign table

        Raises:
            ValueError: If the status is unknown or a passing report has a residual
        """
        if status not in STATUSES:
            raise ValueError(f"Unknown report status '{status}'")
        residual = list(residual or [])
        if status == PASS and residual:
            raise ValueError("A passing report cannot carry a residual")
        self._check = check
        self._status = status
        self._verified_order = verified_order
        self._residual = residual
        self._notes = list(notes or [])
        self._details = dict(details or {})
        self._convention_version = convention_version
        self._elapsed: Optional[float] = None

    @classmethod
    def from_residual(cls, check: str, residual: Residual, verified_order: Optional[int] = None,
                      notes: Optional[Iterable[str]] = None, details: Optional[Dict[str, object]] = None,
                      cap: int = DEFAULT_SETTINGS.residual_cap) -> 'Report':
        """
        Build a pass/fail report from one residual or labelled residuals.

        Labelled residuals are rendered as 'label: term', in label order.
        """
        if isinstance(residual, Poly):
            labelled = {"": residual}
        else:
            labelled = dict(residual)
        summary: List[str] = []
        for label, poly in labelled.items():
            if poly.is_zero():
                continue
            for term in poly.leading_terms(cap - len(summary)):
                summary.append(f"{label}: {term}" if label else term)
            if len(summary) >= cap:
                break
        status = PASS if not summary else FAIL
        return cls(check, status, verified_order, summary, list(notes or []), details)

    @classmethod
    def combine(cls, check: str, reports: Iterable['Report'], notes: Optional[Iterable[str]] = None,
                cap: int = DEFAULT_SETTINGS.residual_cap) -> 'Report':
        """
        Merge sub-reports: the worst status wins, residuals are prefixed by sub-check name.
        """
        reports = list(reports)
        rank = {PASS: 0, FAIL: 1, UNSUPPORTED: 2, PRECONDITION_FAILED: 3}
        status = max((r.status for r in reports), key=rank.get, default=PASS)
        residual: List[str] = []
        merged_notes = list(notes or [])
        orders = [r.verified_order for r in reports if r.verified_order is not None]
        for r in reports:
            for term in r.residual:
                if len(residual) < cap:
                    residual.append(f"{r.check}: {term}")
            for note in r.notes:
                if note not in merged_notes:
                    merged_notes.append(note)
        if status == PASS:
            residual = []
        return cls(check, status, min(orders) if orders else None, residual, merged_notes,
                   {'parts': [{'check': r.check, 'status': r.status} for r in reports]})

    @property
    def check(self) -> str:
        return self._check

    @property
    def status(self) -> str:
        return self._status

    @property
    def passed(self) -> bool:
        return self._status == PASS

    @property
    def verified_order(self) -> Optional[int]:
        return self._verified_order

    @property
    def residual(self) -> List[str]:
        return list(self._residual)

    @property
    def notes(self) -> List[str]:
        return list(self._notes)

    @property
    def details(self) -> Dict[str, object]:
        return dict(self._details)

    @property
    def elapsed(self) -> Optional[float]:
        return self._elapsed

    @elapsed.setter
    def elapsed(self, seconds: float) -> None:
        self._elapsed = seconds

    def renamed(self, check: str) -> 'Report':
        """Copy of the report under another check name."""
        copy = Report(check, self._status, self._verified_order, self._residual, self._notes,
                      self._details, self._convention_version)
        copy._elapsed = self._elapsed
        return copy

    def add_note(self, note: str) -> None:
        if note not in self._notes:
            self._notes.append(note)

    def __str__(self) -> str:
        order = f" (order {self._verified_order})" if self._verified_order is not None else ""
        return f"{self._check}: {self._status}{order}"

    def __repr__(self) -> str:
        return f"Report(check={self._check!r}, status={self._status!r})"

    def to_dict(self, include_timing: bool = True) -> dict:
        """
        Convert to a JSON-friendly dictionary.

        Args:
            include_timing: Include the elapsed time (off for golden files)
        """
        data = {
            'check': self._check,
            'status': self._status,
            'verified_order': self._verified_order,
            'residual': list(self._residual),
            'notes': list(self._notes),
            'conventions': self._convention_version,
        }
        if self._details:
            data['details'] = self._details
        if include_timing:
            data['timing'] = None if self._elapsed is None else round(self._elapsed, 6)
        return data
