"""Tokenizer for the candidate-scorer language."""
import math
import re
from dataclasses import dataclass
from itertools import accumulate
from typing import List

from app.exceptions import DSLSyntaxError

_TOKEN_RE = re.compile(
    r"""
    (?P<space>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op><=|>=|≤|≥|[-+*/^<>=(),])
    """,
    re.VERBOSE,
)

_ALIASES = {"≤": "<=", "≥": ">="}


@dataclass(frozen=True)
class Token:
    kind: str  # number, ident, string, op, eof
    text: str
    offset: int  # 1-based byte offset of the first byte
    value: float = 0.0

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(source: str) -> List[Token]:
    """Split ``source`` into tokens, ending with an ``eof`` token.

    Raises:
        DSLSyntaxError: unexpected character, unterminated string, non-finite literal
    """
    byte_at = [0, *accumulate(len(c.encode("utf-8")) for c in source)]
    tokens: List[Token] = []
    index = 0
    while index < len(source):
        match = _TOKEN_RE.match(source, index)
        offset = byte_at[index] + 1
        if match is None:
            char = source[index]
            if char == '"':
                raise DSLSyntaxError("unterminated string", offset, ('"',))
            raise DSLSyntaxError(f"unexpected character {char!r}", offset)
        kind = match.lastgroup
        text = match.group()
        index = match.end()
        if kind in ("space", "comment"):
            continue
        if kind == "number":
            value = float(text)
            if not math.isfinite(value):
                raise DSLSyntaxError(f"numeric literal {text} out of range", offset)
            tokens.append(Token("number", text, offset, value))
        elif kind == "string":
            tokens.append(Token("string", text[1:-1], offset))
        elif kind == "op":
            tokens.append(Token("op", _ALIASES.get(text, text), offset))
        else:
            tokens.append(Token("ident", text, offset))
    tokens.append(Token("eof", "", byte_at[-1] + 1))
    return tokens
