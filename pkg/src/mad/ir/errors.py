from __future__ import annotations


class EmptyInputError(Exception):
    """Input text contained no content."""


class MoveSyntaxError(Exception):
    """Grammar violation in disassembly / low-level module text."""

    def __init__(self, line: int, expected: str):
        super().__init__(f"line {line}: expected {expected}")
        self.line = line
        self.expected = expected


class SchemaError(Exception):
    """Missing or mistyped field in a normalized-module document."""

    def __init__(self, path: str, reason: str = "missing or mistyped"):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason
