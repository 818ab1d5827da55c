"""Elaborated theories: declared constants and their rewrite rules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .term import Term

STATIC = "static"
DEFINABLE = "definable"


@dataclass(frozen=True)
class SigEntry:
    name: str
    kind: str  # STATIC or DEFINABLE
    type: Term
    ordinal: int
    body: Optional[Term] = None  # set for definitions
    source: object = field(default=None, compare=False, repr=False)

    @property
    def is_definition(self) -> bool:
        return self.body is not None


@dataclass(frozen=True)
class CommandResult:
    kind: str  # "eval" or "check"
    term: Term
    result: Term  # normal form for eval, the checked type for check
    source: object = field(default=None, compare=False, repr=False)


class Signature:
    """Ordered constants, per-head rule lists and the source entries they came from.

    Only the elaborator mutates a signature; once returned it is treated as frozen.
    """

    def __init__(self, name: str = "<signature>"):
        self.name = name
        self.entries: dict[str, SigEntry] = {}
        self.rules: dict[str, list] = {}
        self.source: list = []  # declarations, definitions and rules, in order
        self.outputs: list[CommandResult] = []

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __repr__(self):
        return f"<Signature {self.name}: {len(self.entries)} constants, {self.rule_count()} rules>"

    def lookup(self, name: str) -> Optional[SigEntry]:
        return self.entries.get(name)

    def rules_for(self, name: str) -> list:
        return self.rules.get(name, ())

    def user_rules(self, name: str) -> list:
        """Rules from rule entries, without the unfolding rule of a definition."""
        return [r for r in self.rules.get(name, ()) if not r.definitional]

    def rule_count(self) -> int:
        return sum(len(self.user_rules(n)) for n in self.rules)

    def names(self) -> list[str]:
        return list(self.entries)

    # used by the elaborator

    def _declare(self, entry: SigEntry):
        self.entries[entry.name] = entry
        if entry.kind == DEFINABLE:
            self.rules.setdefault(entry.name, [])

    def _add_rule(self, rule):
        self.rules[rule.head].append(rule)
