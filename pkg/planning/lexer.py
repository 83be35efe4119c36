"""S-expression lexer and reader for PDDL text.

Identifiers are case-insensitive, so every symbol is lowercased on the way in.
Comments run from ``;`` to end of line and are discarded.
"""

import re
from dataclasses import dataclass
from typing import Iterator, Union

from planning.errors import LexError

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n\f\v]+)"
    r"|(?P<comment>;[^\n]*)"
    r"|(?P<lparen>\()"
    r"|(?P<rparen>\))"
    r"|(?P<symbol>[A-Za-z0-9_\-?:.=<>+*/]+)"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "(", ")" or "symbol"
    value: str
    line: int
    column: int


@dataclass(frozen=True)
class Symbol:
    """A leaf of the s-expression tree."""

    value: str
    line: int = 0
    column: int = 0

    def __repr__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SList:
    """A parenthesised list with the position of its opening parenthesis."""

    items: tuple
    line: int = 0
    column: int = 0

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, index):
        return self.items[index]

    def __iter__(self):
        return iter(self.items)

    def __repr__(self) -> str:
        return "(" + " ".join(repr(item) for item in self.items) + ")"


SExpr = Union[Symbol, SList]


def _as_text(text: Union[str, bytes]) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise LexError(f"input is not valid UTF-8: {e.reason}") from None
    if not isinstance(text, str):
        raise LexError(f"expected text, got {type(text).__name__}")
    return text


def tokenize(text: Union[str, bytes]) -> Iterator[Token]:
    """
    Split PDDL text into parenthesis and symbol tokens.

    Args:
        text: Source text (bytes are decoded as UTF-8)

    Yields:
        Tokens with 1-based line/column positions

    Raises:
        LexError: On any character outside the PDDL alphabet
    """
    source = _as_text(text)
    pos = 0
    line = 1
    column = 1
    length = len(source)

    while pos < length:
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise LexError(f"illegal character {source[pos]!r}", line, column)

        kind = match.lastgroup
        lexeme = match.group()
        if kind == "lparen":
            yield Token("(", "(", line, column)
        elif kind == "rparen":
            yield Token(")", ")", line, column)
        elif kind == "symbol":
            yield Token("symbol", lexeme.lower(), line, column)

        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            column = len(lexeme) - lexeme.rfind("\n")
        else:
            column += len(lexeme)
        pos = match.end()


def read_sexprs(text: Union[str, bytes]) -> list[SExpr]:
    """
    Read every top-level s-expression in ``text``.

    Raises:
        LexError: On illegal characters or unbalanced parentheses
    """
    stack: list[tuple[list, int, int]] = []
    top: list[SExpr] = []

    for token in tokenize(text):
        if token.kind == "(":
            stack.append(([], token.line, token.column))
        elif token.kind == ")":
            if not stack:
                raise LexError("unbalanced ')'", token.line, token.column)
            items, line, column = stack.pop()
            node = SList(tuple(items), line, column)
            (stack[-1][0] if stack else top).append(node)
        else:
            node = Symbol(token.value, token.line, token.column)
            (stack[-1][0] if stack else top).append(node)

    if stack:
        _, line, column = stack[-1]
        raise LexError("unbalanced '(' never closed", line, column)
    return top
