"""
Theory-spec file parser.

A theory file is a list of `[section]` headers followed by `key = value`
lines. `#` starts a comment; blank lines are ignored. Sections and keys are
checked against a fixed schema so typos fail with a line and column
instead of being ignored.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from core.errors import ParseError

logger = logging.getLogger(__name__)

SECTION_PATTERN = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
KEY_PATTERN = re.compile(r"^([A-Za-z_][A-Za-z0-9_.]*)\s*=\s*(.*)$")

# Section -> allowed keys; entries ending in '*' are prefixes.
SCHEMA: Dict[str, List[str]] = {
    'theory': ['name', 'description'],
    'target': ['kind', 'dimension', 'lie', 'pi*', 'name'],
    'coordinates': ['*'],
    'symplectic': ['degree', 'pairs', 'split'],
    'theta': ['expression'],
    'source_model': ['builtin', 'name', 'dimension', 'basis', 'product.*', 'differential.*', 'integral.*'],
    'exp_map': ['kind', 'max_arity', 'x_dependent', 'c*'],
    'volume': ['density'],
    'bundle': ['kind', 'submanifold', 'fiber', 'fiber_degree', 'fiber_pairs', 'fiber_split', 'fiber_map', 'v*'],
    'observable': ['insertion'],
    'operator': ['dimension', 'hbar', 'form', 'term*'],
    'loop': ['samples', 'expected'],
    'checks': ['run', 'order', 'seed'],
}


@dataclass(frozen=True)
class Entry:
    """A value with its position in the file."""

    value: str
    line: int
    column: int


@dataclass
class TheorySpecFile:
    """
    Parsed but not yet built theory file.

    Usage:
        spec = TheoryParser.parse_file("theories/psm_so3.theory")
        spec.get('target', 'kind')
    """

    origin: str
    sections: Dict[str, Dict[str, Entry]] = field(default_factory=dict)
    section_lines: Dict[str, int] = field(default_factory=dict)

    def has(self, section: str, key: Optional[str] = None) -> bool:
        if section not in self.sections:
            return False
        return key is None or key in self.sections[section]

    def entry(self, section: str, key: str) -> Entry:
        """
        Raises:
            ParseError: If the entry is missing
        """
        if not self.has(section, key):
            line = self.section_lines.get(section, 1)
            raise ParseError(f"missing key '{key}' in section [{section}]", line, 1, self.origin)
        return self.sections[section][key]

    def get(self, section: str, key: str, default: Optional[str] = None) -> Optional[str]:
        if not self.has(section, key):
            return default
        return self.sections[section][key].value

    def keys(self, section: str, prefix: str = "") -> List[str]:
        """Keys of a section in file order, optionally filtered by prefix."""
        return [k for k in self.sections.get(section, {}) if k.startswith(prefix)]

    def error(self, section: str, key: str, message: str) -> ParseError:
        """A ParseError located at an entry (or its section header)."""
        if self.has(section, key):
            entry = self.sections[section][key]
            return ParseError(message, entry.line, entry.column, self.origin)
        return ParseError(message, self.section_lines.get(section, 1), 1, self.origin)


class TheoryParser:
    """Static parsing of theory files into TheorySpecFile."""

    @staticmethod
    def _allowed(section: str, key: str) -> bool:
        for pattern in SCHEMA[section]:
            if pattern == '*':
                return True
            if pattern.endswith('*') and key.startswith(pattern[:-1]) and len(key) > len(pattern) - 1:
                return True
            if key == pattern:
                return True
        return False

    @staticmethod
    def parse_text(text: str, origin: str = "<string>") -> TheorySpecFile:
        """
        Parse theory text.

        Raises:
            ParseError: On malformed lines, unknown sections or keys, and duplicates
        """
        spec = TheorySpecFile(origin)
        current: Optional[str] = None
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split('#', 1)[0]
            stripped = content.strip()
            if not stripped:
                continue
            indent = len(content) - len(content.lstrip()) + 1
            header = SECTION_PATTERN.match(stripped)
            if header:
                current = header.group(1)
                if current not in SCHEMA:
                    raise ParseError(f"unknown section [{current}]", number, indent, origin)
                if current in spec.sections:
                    raise ParseError(f"duplicate section [{current}]", number, indent, origin)
                spec.sections[current] = {}
                spec.section_lines[current] = number
                continue
            match = KEY_PATTERN.match(stripped)
            if match is None:
                raise ParseError("expected '[section]' or 'key = value'", number, indent, origin)
            if current is None:
                raise ParseError("entry before the first section header", number, indent, origin)
            key, value = match.group(1), match.group(2).strip()
            if not TheoryParser._allowed(current, key):
                raise ParseError(f"unknown key '{key}' in section [{current}]", number, indent, origin)
            if key in spec.sections[current]:
                raise ParseError(f"duplicate key '{key}' in section [{current}]", number, indent, origin)
            if not value:
                raise ParseError(f"empty value for '{key}'", number, indent + len(key), origin)
            column = indent + match.start(2)
            spec.sections[current][key] = Entry(value, number, column)
        if not spec.sections:
            raise ParseError("theory file has no sections", 1, 1, origin)
        logger.debug("Parsed %s: sections %s", origin, list(spec.sections))
        return spec

    @staticmethod
    def parse_file(path: Union[str, Path]) -> TheorySpecFile:
        """
        Read and parse a theory file.

        Raises:
            ParseError: If the file cannot be read or is malformed
        """
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise ParseError(f"cannot read file: {exc.strerror}", 1, 1, str(path)) from exc
        return TheoryParser.parse_text(text, str(path))
