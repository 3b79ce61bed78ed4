"""
Command-line services: parsing, building, running and exporting.
"""

from .check_runner import CheckRunner, UnknownCheckError
from .expression_parser import ExpressionParser
from .report_export_service import ReportExportService
from .theory_builder import TheoryBuilder
from .theory_parser import Entry, TheoryParser, TheorySpecFile

__all__ = [
    'CheckRunner',
    'UnknownCheckError',
    'ExpressionParser',
    'ReportExportService',
    'TheoryBuilder',
    'TheoryParser',
    'TheorySpecFile',
    'Entry',
]
