"""Which constants and rules a proof depends on, and how two theories relate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .checker import elaborate, infer
from .errors import CheckError, ModError
from .rewrite import DEFAULT_FUEL
from .signature import Signature
from .syntax import Definition, DefinableDecl, RuleEntry, StaticDecl, print_term
from .term import Context, Term, constants, unspine

RULE_APPROXIMATION = "all rules of every included definable constant"


@dataclass(frozen=True)
class DependencyReport:
    root: str
    constants: tuple[str, ...]
    rules: tuple[tuple[str, int], ...]
    transitive: bool
    approximation: str = RULE_APPROXIMATION

    def render(self) -> str:
        lines = [f"root {self.root}", f"mode {'transitive' if self.transitive else 'direct'}"]
        lines += [f"const {c}" for c in self.constants]
        lines += [f"rule {h} {i}" for h, i in self.rules]
        return "\n".join(lines) + "\n"


def _uses(sig: Signature, name: str) -> set[str]:
    """Constants mentioned by the declaration, definition and rules of ``name``."""
    entry = sig.lookup(name)
    out = set(constants(entry.type))
    if entry.body is not None:
        out.update(constants(entry.body))
    for rule in sig.user_rules(name):
        for _, ty in rule.context:
            out.update(constants(ty))
        out.update(constants(rule.lhs_term))
        out.update(constants(rule.rhs))
    return out


def deps(sig: Signature, root: Union[str, Term], transitive: bool = True,
         fuel: int = DEFAULT_FUEL) -> DependencyReport:
    if isinstance(root, str):
        if root not in sig:
            raise CheckError(f"'{root}' is not declared in {sig.name}", None, "UnknownName")
        label = root
        found = {root} | _uses(sig, root)
    else:
        label = print_term(root)
        found = set(constants(root)) | set(constants(infer(sig, Context(), root, fuel)))
    for c in found:
        if c not in sig:
            raise CheckError(f"'{c}' is not declared in {sig.name}", None, "UnknownName")
    if transitive:
        todo = list(found)
        while todo:
            for c in _uses(sig, todo.pop()):
                if c not in found:
                    found.add(c)
                    todo.append(c)
    rules = sorted((c, r.ordinal) for c in found for r in sig.user_rules(c))
    return DependencyReport(label, tuple(sorted(found)), tuple(rules), transitive)


def _entry_name(entry) -> Optional[str]:
    if isinstance(entry, (StaticDecl, DefinableDecl, Definition)):
        return entry.name
    return None


def _rule_head(entry: RuleEntry) -> str:
    return unspine(entry.lhs)[0].name


def trimmed_entries(sig: Signature, keep: set[str]) -> list:
    out = []
    for e in sig.source:
        name = _entry_name(e)
        if name is not None:
            if name in keep:
                out.append(e)
        elif _rule_head(e) in keep:
            out.append(e)
    return out


def check_with_trimmed(sig: Signature, root: Union[str, Term], fuel: int = DEFAULT_FUEL) -> Signature:
    """Re-check ``root`` against only its reported dependencies.

    Any failure here means ``deps`` missed something.  Returns the trimmed
    signature.
    """
    report = deps(sig, root, transitive=True, fuel=fuel)
    trimmed = elaborate(trimmed_entries(sig, set(report.constants)), fuel=fuel, name=f"{sig.name}[trimmed]")
    if isinstance(root, str):
        if trimmed.lookup(root).type != sig.lookup(root).type:
            raise CheckError(f"'{root}' changed type after trimming", None, "TypeMismatch")
    else:
        infer(trimmed, Context(), root, fuel)
    return trimmed


# ---------------------------------------------------------------------------
# Theory comparison

EQUAL, SUBSET, SUPERSET, COMPATIBLE, CONFLICT = "EQUAL", "SUBSET", "SUPERSET", "COMPATIBLE", "CONFLICT"


@dataclass(frozen=True)
class Finding:
    kind: str  # "left-only", "right-only" or "mismatch"
    name: str
    reason: str = ""

    def render(self) -> str:
        return f"{self.kind} {self.name} {self.reason}".rstrip()


@dataclass
class TheoryRelation:
    """Outcome of ``compare``.

    COMPATIBLE is a syntactic verdict: shared symbols agree and the merged
    signature type-checks.  It says nothing about logical consistency of the
    merged theory.
    """

    verdict: str
    details: list[Finding] = field(default_factory=list)
    union: Optional[Signature] = None
    error: Optional[ModError] = None

    def render(self) -> str:
        return "".join(line + "\n" for line in [self.verdict] + [f.render() for f in self.details])


def _same_rule(r1, r2) -> bool:
    # pattern-variable names are irrelevant; slots and types decide
    return (
        r1.definitional == r2.definitional
        and [ty for _, ty in r1.context] == [ty for _, ty in r2.context]
        and r1.args == r2.args
        and r1.rhs == r2.rhs
    )


def compare(sig1: Signature, sig2: Signature, fuel: int = DEFAULT_FUEL) -> TheoryRelation:
    left_only, right_only, mismatch = [], [], []
    for name in sig1.entries:
        if name not in sig2:
            left_only.append(name)
    for name in sig2.entries:
        if name not in sig1:
            right_only.append(name)
            continue
        e1, e2 = sig1.lookup(name), sig2.lookup(name)
        if e1.kind != e2.kind:
            mismatch.append(Finding("mismatch", name, f"staticness:{e1.kind}/{e2.kind}"))
        elif e1.type != e2.type:
            mismatch.append(Finding("mismatch", name, "type"))
        elif e1.is_definition != e2.is_definition:
            mismatch.append(Finding("mismatch", name, "definition"))
        else:
            r1, r2 = sig1.user_rules(name), sig2.user_rules(name)
            if e1.is_definition and not _same_rule(sig1.rules_for(name)[0], sig2.rules_for(name)[0]):
                mismatch.append(Finding("mismatch", name, "definition"))
            for a, b in zip(r1, r2):
                if not _same_rule(a, b):
                    mismatch.append(Finding("mismatch", name, f"rule#{a.ordinal}"))
            left_only += [f"{name}#{r.ordinal}" for r in r1[len(r2):]]
            right_only += [f"{name}#{r.ordinal}" for r in r2[len(r1):]]

    details = (
        [Finding("left-only", n) for n in sorted(left_only)]
        + [Finding("right-only", n) for n in sorted(right_only)]
        + sorted(mismatch, key=lambda f: (f.name, f.reason))
    )
    if mismatch:
        return TheoryRelation(CONFLICT, details)
    if not left_only and not right_only:
        return TheoryRelation(EQUAL, details, sig1)
    if not left_only:
        return TheoryRelation(SUBSET, details, sig2)
    if not right_only:
        return TheoryRelation(SUPERSET, details, sig1)
    try:
        union = elaborate(union_entries(sig1, sig2), fuel=fuel, name=f"{sig1.name}+{sig2.name}")
    except ModError as e:
        details.append(Finding("mismatch", "*", f"UnionElaborationFailed: {e}"))
        return TheoryRelation(CONFLICT, details, None, e)
    return TheoryRelation(COMPATIBLE, details, union)


def union_entries(sig1: Signature, sig2: Signature) -> list:
    """Entries of ``sig1`` followed by what only ``sig2`` has (new names, extra rules)."""
    out = list(sig1.source)
    extra_rules = set()
    for head, rules in sig2.rules.items():
        have = len(sig1.user_rules(head)) if head in sig1 else 0
        extra_rules.update(id(r.source) for r in sig2.user_rules(head)[have:])
    for e in sig2.source:
        name = _entry_name(e)
        if name is not None:
            if name not in sig1:
                out.append(e)
        elif id(e) in extra_rules:
            out.append(e)
    return out
