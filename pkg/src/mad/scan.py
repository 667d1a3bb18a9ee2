"""Lexical scanning for Move-like text.

Shared by the disassembly parser and the segmentation pass. The tokenizer
covers the canonical declaration subset plus anything that can appear inside
skipped bodies (instruction listings, statements, comments, string literals).
Unknown characters become single-char punct tokens so scanning never fails on
instruction dumps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ScanError(Exception):
    """Unterminated string or comment."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "num" | "str" | "punct"
    text: str
    start: int  # offset into source
    end: int
    line: int  # 1-indexed


_IDENT_START = re.compile(r"[A-Za-z_]")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")
_NUM = re.compile(r"0x[0-9a-fA-F_]+|[0-9][0-9_]*(?:u8|u16|u32|u64|u128|u256)?")


def tokenize(text: str) -> list[Token]:
    """Tokenize, skipping comments. Raises ScanError on unterminated literals."""
    tokens: list[Token] = []
    i = 0
    line = 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if text.startswith("/*", i):
            i, line = _skip_block_comment(text, i, line)
            continue
        if ch == '"' or (ch in "bx" and i + 1 < n and text[i + 1] == '"'):
            start = i
            if ch != '"':
                i += 1
            i = _skip_string(text, i)
            tokens.append(Token("str", text[start:i], start, i, line))
            continue
        m = _NUM.match(text, i)
        if m:
            tokens.append(Token("num", m.group(), i, m.end(), line))
            i = m.end()
            continue
        if _IDENT_START.match(ch):
            m = _IDENT.match(text, i)
            assert m is not None
            tokens.append(Token("ident", m.group(), i, m.end(), line))
            i = m.end()
            continue
        if text.startswith("::", i):
            tokens.append(Token("punct", "::", i, i + 2, line))
            i += 2
            continue
        tokens.append(Token("punct", ch, i, i + 1, line))
        i += 1
    return tokens


def _skip_block_comment(text: str, i: int, line: int) -> tuple[int, int]:
    # Move block comments nest
    depth = 0
    start = i
    n = len(text)
    while i < n:
        if text.startswith("/*", i):
            depth += 1
            i += 2
        elif text.startswith("*/", i):
            depth -= 1
            i += 2
            if depth == 0:
                return i, line
        else:
            if text[i] == "\n":
                line += 1
            i += 1
    raise ScanError("unterminated block comment", start)


def _skip_string(text: str, i: int) -> int:
    """i points at the opening quote; returns offset past the closing quote."""
    start = i
    i += 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if ch == '"':
            return i + 1
        i += 1
    raise ScanError("unterminated string literal", start)


def match_brace(tokens: list[Token], open_index: int) -> int:
    """Index of the token closing the brace opened at open_index.

    Raises ScanError (with the opening offset) when unbalanced.
    """
    assert tokens[open_index].text == "{"
    depth = 0
    for k in range(open_index, len(tokens)):
        t = tokens[k]
        if t.kind != "punct":
            continue
        if t.text == "{":
            depth += 1
        elif t.text == "}":
            depth -= 1
            if depth == 0:
                return k
    raise ScanError("unbalanced braces", tokens[open_index].start)


_WS_RUN = re.compile(r"[ \t\r\n]+")


def normalize_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces outside string literals."""
    out: list[str] = []
    i = 0
    n = len(text)
    plain_start = i
    while i < n:
        ch = text[i]
        if ch == '"':
            out.append(_WS_RUN.sub(" ", text[plain_start:i]))
            end = _skip_string(text, i)
            out.append(text[i:end])
            i = end
            plain_start = i
            continue
        i += 1
    out.append(_WS_RUN.sub(" ", text[plain_start:]))
    return "".join(out).strip()
