"""Lexer for `.usp` sources.

Stereotype brackets are written either as guillemets («...») or as the
ASCII fallback `<<...>>`; both lex to the same token kinds. Comments run
from `//` to end of line.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .diagnostics import Diagnostic, Severity, Span

KEYWORDS = frozenset(
    {
        "model", "class", "attr", "op", "assoc", "extends", "abstract",
        "concept", "let", "send", "if", "else", "foreach", "in", "return",
        "new", "null", "true", "false", "self",
    }
)

# Longest match first.
_PUNCT2 = (":=", "==", "!=", "<=", ">=", "&&", "||", "--")
_PUNCT1 = "{}():;,.?<>+-*/!="


class TokenKind(enum.Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    STEREO_OPEN = "stereotype-open"
    STEREO_CLOSE = "stereotype-close"
    PUNCT = "punctuation"
    INT = "integer"
    REAL = "real"
    STRING = "text literal"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: Span
    offset: int  # character offset into the source

    def describe(self) -> str:
        if self.kind is TokenKind.EOF:
            return "end of input"
        return f"'{self.lexeme}'"


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


def lex(source: str, file_name: str = "<string>") -> tuple[list[Token], list[Diagnostic]]:
    """Tokenise `source`. Never raises; bad input yields diagnostics and the
    offending characters are skipped so parsing can still proceed."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def span_here(length: int = 1) -> Span:
        return Span(file_name, line, col, line, col + length)

    def advance(text: str) -> None:
        nonlocal i, line, col
        for ch in text:
            i += 1
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    def emit(kind: TokenKind, lexeme: str, sp: Span, off: int) -> None:
        tokens.append(Token(kind, lexeme, sp, off))

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(ch)
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            end = n if end < 0 else end
            advance(source[i:end])
            continue

        start_off, start_line, start_col = i, line, col

        if ch == "«":  # «
            emit(TokenKind.STEREO_OPEN, ch, span_here(), start_off)
            advance(ch)
            continue
        if ch == "»":  # »
            emit(TokenKind.STEREO_CLOSE, ch, span_here(), start_off)
            advance(ch)
            continue
        if source.startswith("<<", i):
            emit(TokenKind.STEREO_OPEN, "<<", span_here(2), start_off)
            advance("<<")
            continue
        if source.startswith(">>", i):
            emit(TokenKind.STEREO_CLOSE, ">>", span_here(2), start_off)
            advance(">>")
            continue

        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            emit(kind, word, span_here(len(word)), start_off)
            advance(word)
            continue

        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n - 1 and source[j] == "." and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
                word = source[i:j]
                emit(TokenKind.REAL, word, span_here(len(word)), start_off)
            else:
                word = source[i:j]
                emit(TokenKind.INT, word, span_here(len(word)), start_off)
            advance(word)
            continue

        if ch == '"':
            j = i + 1
            terminated = False
            while j < n:
                c = source[j]
                if c == '"':
                    terminated = True
                    j += 1
                    break
                if c == "\n":
                    break
                if c == "\\" and j + 1 < n and source[j + 1] in _ESCAPES:
                    j += 2
                    continue
                j += 1
            word = source[i:j]
            if not terminated:
                diags.append(
                    Diagnostic(
                        "L002",
                        Severity.ERROR,
                        "unterminated text literal",
                        Span(file_name, start_line, start_col, line, col),
                    )
                )
            else:
                # the parser decodes escapes from the raw lexeme
                emit(TokenKind.STRING, word, span_here(len(word)), start_off)
            advance(word)
            continue

        two = source[i : i + 2]
        if two in _PUNCT2:
            emit(TokenKind.PUNCT, two, span_here(2), start_off)
            advance(two)
            continue
        if ch in _PUNCT1:
            emit(TokenKind.PUNCT, ch, span_here(), start_off)
            advance(ch)
            continue

        diags.append(
            Diagnostic(
                "L001",
                Severity.ERROR,
                f"unexpected character {ch!r}",
                span_here(),
            )
        )
        advance(ch)

    tokens.append(Token(TokenKind.EOF, "", Span(file_name, line, col, line, col), i))
    return tokens, diags


def decode_string(lexeme: str) -> str:
    """Decode a STRING token's raw lexeme (including quotes) to its value."""
    out = []
    i = 1
    end = len(lexeme) - 1  # trailing quote
    while i < end:
        c = lexeme[i]
        if c == "\\" and i + 1 < end and lexeme[i + 1] in _ESCAPES:
            out.append(_ESCAPES[lexeme[i + 1]])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)
