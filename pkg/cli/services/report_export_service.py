"""
Report export: the JSON array on standard output and the human summary.
"""

import json
from typing import Iterable, List

from core.models.report import PASS, Report


class ReportExportService:
    """Service for rendering reports."""

    @staticmethod
    def to_data(reports: Iterable[Report], include_timing: bool = False) -> List[dict]:
        return [report.to_dict(include_timing) for report in reports]

    @staticmethod
    def export_to_json(reports: Iterable[Report], include_timing: bool = False) -> str:
        """
        Export reports as a JSON array.

        Timing is off by default so output is byte-identical across runs.
        """
        data = ReportExportService.to_data(reports, include_timing)
        return json.dumps(data, indent=2, ensure_ascii=False, default=str) + "\n"

    @staticmethod
    def summary(reports: Iterable[Report]) -> str:
        """One line per check, followed by its residual terms."""
        lines = []
        reports = list(reports)
        for report in reports:
            lines.append(str(report))
            for term in report.residual:
                lines.append(f"    {term}")
            for note in report.notes:
                lines.append(f"    note: {note}")
        passed = sum(1 for r in reports if r.status == PASS)
        lines.append(f"{passed}/{len(reports)} checks passed")
        return "\n".join(lines)

    @staticmethod
    def exit_code(reports: Iterable[Report]) -> int:
        """0 when every report passes, else 1."""
        return 0 if all(r.status == PASS for r in reports) else 1
