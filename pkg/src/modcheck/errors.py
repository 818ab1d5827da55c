"""Error types shared by the parser, checker and analysis passes."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Loc:
    file: str
    line: int
    col: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


class ModError(Exception):
    """Base error. ``category`` is a stable token used in messages and tests."""

    category = "Error"

    def __init__(self, message: str, loc: Loc | None = None, category: str | None = None):
        super().__init__(message)
        self.message = message
        self.loc = loc
        if category is not None:
            self.category = category

    def __str__(self):
        where = str(self.loc) if self.loc is not None else "<input>:0:0"
        return f"{where}: {self.category}: {self.message}"

    def at(self, loc: Loc | None) -> "ModError":
        if self.loc is None:
            self.loc = loc
        return self


class ParseError(ModError):
    category = "SyntaxError"


class CheckError(ModError):
    category = "TypeMismatch"


class FuelExhausted(ModError):
    category = "FuelExhausted"

    def __init__(self, steps: int, loc: Loc | None = None):
        super().__init__(f"reduction did not terminate within {steps} steps", loc)
        self.steps = steps
