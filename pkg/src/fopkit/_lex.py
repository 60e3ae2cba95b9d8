"""Small shared tokenizer for the text formats.

The structure files, instance shorthands, fop files and the formula grammar
all use the same token shapes (identifiers, naturals, punctuation), so they
share this stream class.  Every consumer reports errors through ParseError
with 1-based line/column positions.
"""

from __future__ import annotations

from .errors import ParseError


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int) -> None:
        self.kind = kind  # "name" | "num" | "sym" | "eof"
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"Token({self.kind!r}, {self.text!r}, {self.line}:{self.col})"


def _is_name_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_name_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class TokenStream:
    """Tokenized view of a source text with peek/expect helpers."""

    def __init__(self, text: str, symbols: tuple[str, ...]) -> None:
        # longest symbols first so "<->" wins over "<=" and "-"
        self._symbols = sorted(symbols, key=len, reverse=True)
        self._tokens = self._tokenize(text)
        self._pos = 0

    def _tokenize(self, text: str) -> list[Token]:
        tokens: list[Token] = []
        line, col = 1, 1
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch == "\n":
                i += 1
                line += 1
                col = 1
                continue
            if ch.isspace():
                i += 1
                col += 1
                continue
            if ch == "#":  # comment to end of line
                while i < n and text[i] != "\n":
                    i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(Token("num", text[i:j], line, col))
                col += j - i
                i = j
                continue
            if _is_name_start(ch):
                j = i
                while j < n and _is_name_char(text[j]):
                    j += 1
                tokens.append(Token("name", text[i:j], line, col))
                col += j - i
                i = j
                continue
            for sym in self._symbols:
                if text.startswith(sym, i):
                    tokens.append(Token("sym", sym, line, col))
                    col += len(sym)
                    i += len(sym)
                    break
            else:
                raise ParseError(f"unexpected character {ch!r}", line, col)
        tokens.append(Token("eof", "", line, col))
        return tokens

    def peek(self) -> Token:
        return self._tokens[self._pos]

    def next(self) -> Token:
        tok = self._tokens[self._pos]
        if tok.kind != "eof":
            self._pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def at_kind(self, kind: str) -> bool:
        return self.peek().kind == kind

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            shown = tok.text if tok.kind != "eof" else "end of input"
            self.error(f"expected {text!r}, found {shown!r}")
        return self.next()

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind != "name":
            self.error(f"expected a name, found {tok.text!r}" if tok.kind != "eof"
                       else "expected a name, found end of input")
        return self.next()

    def expect_num(self) -> int:
        tok = self.peek()
        if tok.kind != "num":
            self.error(f"expected a number, found {tok.text!r}" if tok.kind != "eof"
                       else "expected a number, found end of input")
        self.next()
        return int(tok.text)

    def expect_eof(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            self.error(f"unexpected trailing input {tok.text!r}")

    def error(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)
