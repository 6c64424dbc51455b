"""Verilog-2005 tokenizer for the synthesizable subset.

Comments are stripped, whitespace is skipped, and compiler directives are
kept as `directive` tokens so later stages can drop them without losing
span bookkeeping.  Token spans are (start, end) offsets into the source
string; every token's text is exactly `source[start:end]`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    IDENTIFIER = "identifier"
    NUMBER = "number"
    STRING = "string"
    OPERATOR = "operator"
    PUNCTUATION = "punctuation"
    KEYWORD = "keyword"
    DIRECTIVE = "directive"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: tuple[int, int]

    def __repr__(self) -> str:  # compact form for test failure output
        return f"Token({self.kind.value}, {self.text!r}, {self.span[0]}:{self.span[1]})"


class LexError(ValueError):
    """Tokenization failure; `span` points at the offending source range."""

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(message)
        self.span = span


# IEEE 1364-2005 reserved words.  The parser accepts a subset; keeping the
# full list here stops reserved words from masquerading as identifiers.
KEYWORDS = frozenset(
    """
    always and assign automatic begin buf bufif0 bufif1 case casex casez cell
    cmos config deassign default defparam design disable edge else end endcase
    endconfig endfunction endgenerate endmodule endprimitive endspecify
    endtable endtask event for force forever fork function generate genvar
    highz0 highz1 if ifnone incdir include initial inout input instance
    integer join large liblist library localparam macromodule medium module
    nand negedge nmos nor noshowcancelled not notif0 notif1 or output
    parameter pmos posedge primitive pull0 pull1 pulldown pullup
    pulsestyle_ondetect pulsestyle_onevent rcmos real realtime reg release
    repeat rnmos rpmos rtran rtranif0 rtranif1 scalared showcancelled signed
    small specify specparam strong0 strong1 supply0 supply1 table task time
    tran tranif0 tranif1 tri tri0 tri1 triand trior trireg unsigned use uwire
    vectored wait wand weak0 weak1 while wire wor xnor xor
    """.split()
)

_OPERATORS_3 = ("<<<", ">>>", "===", "!==")
_OPERATORS_2 = (
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "~&", "~|", "~^", "^~", "**", "+:", "-:",
)
_OPERATORS_1 = frozenset("+-*/%&|^~!<>=?")
_PUNCTUATION = frozenset("()[]{};,.:#@")

_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")
_SYS_ID_RE = re.compile(r"\$[A-Za-z0-9_$]+")
# Ordered alternation: based literal, real, plain decimal.  Digit classes are
# per base so e.g. 8'hqq fails here instead of parsing later.
_NUMBER_RE = re.compile(
    r"(?:\d[\d_]*)?'[sS]?(?:[bB][01xXzZ?_]+|[oO][0-7xXzZ?_]+"
    r"|[dD][0-9xXzZ?_]+|[hH][0-9a-fA-FxXzZ?_]+)"
    r"|\d[\d_]*\.\d[\d_]*(?:[eE][+-]?\d[\d_]*)?"
    r"|\d[\d_]*[eE][+-]?\d[\d_]*"
    r"|\d[\d_]*"
)


def lex(source: str) -> list[Token]:
    """Tokenize `source`, raising LexError on malformed input.

    Guarantees on success: spans are non-overlapping and strictly
    increasing, and no token is empty.  Comments never produce tokens.
    A line whose first non-blank character is a backtick becomes a single
    directive token; a mid-line backtick plus identifier (a macro use) is
    also a directive token.
    """
    tokens: list[Token] = []
    i = 0
    n = len(source)
    line_start = 0  # offset just after the most recent newline
    while i < n:
        ch = source[i]
        if ch == "\n":
            line_start = i + 1
            i += 1
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue
        if source.startswith("//", i):
            nl = source.find("\n", i)
            i = n if nl < 0 else nl
            continue
        if source.startswith("/*", i):
            close = source.find("*/", i + 2)
            if close < 0:
                raise LexError("unterminated block comment", (i, i + 2))
            i = close + 2
            continue
        if ch == "`":
            if source[line_start:i].strip() == "":
                # whole-line directive such as `define or `timescale
                nl = source.find("\n", i)
                end = n if nl < 0 else nl
            else:
                m = _ID_RE.match(source, i + 1)
                if m is None:
                    raise LexError("stray backtick", (i, i + 1))
                end = m.end()
            tokens.append(Token(TokenKind.DIRECTIVE, source[i:end], (i, end)))
            i = end
            continue
        if ch == '"':
            j = i + 1
            while j < n:
                c = source[j]
                if c == "\\":
                    j += 2
                    continue
                if c == "\n":
                    break
                if c == '"':
                    tokens.append(
                        Token(TokenKind.STRING, source[i : j + 1], (i, j + 1))
                    )
                    i = j + 1
                    break
                j += 1
            else:
                raise LexError("unterminated string", (i, n))
            if i == j + 1:
                continue
            raise LexError("unterminated string", (i, i + 1))
        if ch == "\\":
            # escaped identifier: backslash through the next whitespace
            j = i + 1
            while j < n and not source[j].isspace():
                j += 1
            if j == i + 1:
                raise LexError("empty escaped identifier", (i, i + 1))
            tokens.append(Token(TokenKind.IDENTIFIER, source[i:j], (i, j)))
            i = j
            continue
        if "0" <= ch <= "9" or ch == "'":
            m = _NUMBER_RE.match(source, i)
            if m is None:
                raise LexError("malformed number literal", (i, i + 1))
            tokens.append(Token(TokenKind.NUMBER, m.group(), (i, m.end())))
            i = m.end()
            continue
        if ch == "$":
            m = _SYS_ID_RE.match(source, i)
            if m is None:
                raise LexError("stray '$'", (i, i + 1))
            tokens.append(Token(TokenKind.IDENTIFIER, m.group(), (i, m.end())))
            i = m.end()
            continue
        # ASCII ranges only: unicode letters and digits are illegal characters,
        # and str.isalpha would wrongly admit them here
        if "a" <= ch <= "z" or "A" <= ch <= "Z" or ch == "_":
            m = _ID_RE.match(source, i)
            assert m is not None
            text = m.group()
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(kind, text, (i, m.end())))
            i = m.end()
            continue
        three = source[i : i + 3]
        if three in _OPERATORS_3:
            tokens.append(Token(TokenKind.OPERATOR, three, (i, i + 3)))
            i += 3
            continue
        two = source[i : i + 2]
        if two in _OPERATORS_2:
            tokens.append(Token(TokenKind.OPERATOR, two, (i, i + 2)))
            i += 2
            continue
        if ch in _OPERATORS_1:
            tokens.append(Token(TokenKind.OPERATOR, ch, (i, i + 1)))
            i += 1
            continue
        if ch in _PUNCTUATION:
            tokens.append(Token(TokenKind.PUNCTUATION, ch, (i, i + 1)))
            i += 1
            continue
        raise LexError(f"illegal character {ch!r}", (i, i + 1))
    return tokens
