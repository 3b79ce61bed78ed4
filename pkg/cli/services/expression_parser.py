"""
Expression parser for polynomial input.

Grammar (no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := NUMBER | IDENT | 'hbar' | 'I' | '(' expr ')'

Division is by rational constants only; negative exponents only on hbar.
The output of Poly.__str__ parses back to the same polynomial.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from core.errors import GradedAlgebraError, ParseError
from core.models.graded_coordinate import CoordinateSystem
from core.models.poly import Poly

TOKEN_PATTERN = re.compile(r"\s*(?:(?P<number>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class ExpressionParser:
    """
    Recursive-descent parser producing canonical Poly values.

    Usage:
        poly = ExpressionParser.parse("1/2 * pi12 * p1 * p2", system)
    """

    def __init__(self, source: str, system: CoordinateSystem, line: int = 1, column: int = 1,
                 origin: Optional[str] = None):
        """
        Args:
            source: Expression text
            system: Coordinates identifiers may refer to
            line: Line of the expression in its file (for diagnostics)
            column: Column where the expression starts
            origin: File name used in error messages
        """
        self._source = source
        self._system = system
        self._line = line
        self._column = column
        self._origin = origin
        self._tokens = self._tokenize()
        self._pos = 0

    @staticmethod
    def parse(source: str, system: CoordinateSystem, line: int = 1, column: int = 1,
              origin: Optional[str] = None) -> Poly:
        """
        Parse an expression over a coordinate system.

        Raises:
            ParseError: On syntax errors, unknown identifiers or odd powers
        """
        return ExpressionParser(source, system, line, column, origin).expression()

    # -------------------------------------------------------------- lexing

    def _error(self, message: str, column: Optional[int] = None) -> ParseError:
        return ParseError(message, self._line, column if column is not None else self._column, self._origin)

    def _tokenize(self) -> List[Token]:
        tokens: List[Token] = []
        pos = 0
        text = self._source
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = TOKEN_PATTERN.match(text, pos)
            if match is None or match.end() == pos:
                offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise self._error(f"unexpected character '{text[offset]}'", self._column + offset)
            kind = match.lastgroup
            start = match.start(kind)
            tokens.append(Token(kind, match.group(kind), self._line, self._column + start))
            pos = match.end()
        tokens.append(Token("end", "", self._line, self._column + len(text)))
        return tokens

    # ------------------------------------------------------------- parsing

    def _peek(self) -> Token:
        return self._tokens[self._pos]

    def _advance(self) -> Token:
        token = self._tokens[self._pos]
        self._pos += 1
        return token

    def _accept(self, op: str) -> bool:
        token = self._peek()
        if token.kind == "op" and token.text == op:
            self._pos += 1
            return True
        return False

    def _expect(self, op: str) -> None:
        token = self._peek()
        if not self._accept(op):
            found = token.text or "end of input"
            raise self._error(f"expected '{op}', found '{found}'", token.column)

    def expression(self) -> Poly:
        """Parse the whole input as one expression."""
        if self._peek().kind == "end":
            raise self._error("empty expression")
        result = self._sum()
        token = self._peek()
        if token.kind != "end":
            raise self._error(f"unexpected '{token.text}' (implicit multiplication is not allowed)", token.column)
        return result

    def _sum(self) -> Poly:
        result = self._product()
        while True:
            if self._accept("+"):
                result = result + self._product()
            elif self._accept("-"):
                result = result - self._product()
            else:
                return result

    def _product(self) -> Poly:
        result = self._unary()
        while True:
            if self._accept("*"):
                result = result * self._unary()
            elif self._peek().kind == "op" and self._peek().text == "/":
                token = self._advance()
                divisor = self._unary()
                if not divisor.is_constant() or not divisor.constant_term().is_rational():
                    raise self._error("division is only allowed by rational constants", token.column)
                value = divisor.constant_term().rational()
                if value == 0:
                    raise self._error("division by zero", token.column)
                result = result * (Fraction(1) / value)
            else:
                return result

    def _unary(self) -> Poly:
        if self._accept("-"):
            return -self._unary()
        if self._accept("+"):
            return self._unary()
        return self._power()

    def _power(self) -> Poly:
        token = self._peek()
        base = self._atom()
        if not self._accept("^"):
            return base
        negative = self._accept("-")
        exponent_token = self._advance()
        if exponent_token.kind != "number":
            raise self._error("exponent must be an integer", exponent_token.column)
        exponent = int(exponent_token.text)
        if token.kind == "ident" and token.text == "hbar":
            return Poly.hbar(self._system, -exponent if negative else exponent)
        if negative:
            raise self._error("negative exponents are only allowed on hbar", exponent_token.column)
        if token.kind == "ident" and token.text in self._system and self._system[token.text].is_odd \
                and exponent >= 2:
            raise self._error(f"odd power: '{token.text}' is odd and cannot be raised to {exponent}",
                              token.column)
        try:
            return base ** exponent
        except GradedAlgebraError as exc:
            raise self._error(str(exc), token.column) from exc

    def _atom(self) -> Poly:
        token = self._advance()
        if token.kind == "number":
            return Poly.constant(self._system, int(token.text))
        if token.kind == "ident":
            if token.text == "hbar":
                return Poly.hbar(self._system)
            if token.text == "I":
                return Poly.imaginary_unit(self._system)
            if token.text not in self._system:
                raise self._error(f"unknown identifier '{token.text}'", token.column)
            return Poly.coordinate(self._system, token.text)
        if token.kind == "op" and token.text == "(":
            inner = self._sum()
            self._expect(")")
            return inner
        found = token.text or "end of input"
        raise self._error(f"unexpected '{found}'", token.column)
