"""Core terms of the lambda-Pi calculus.

Bound variables use de Bruijn indices (0 is the innermost binder); signature
symbols are named constants.  Binder names are kept for printing only and are
excluded from equality, so ``==`` on terms is alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import Loc


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Sort(Term):
    level: str  # "Type" or "Kind"

    def __repr__(self):
        return self.level


TYPE = Sort("Type")
KIND = Sort("Kind")


@dataclass(frozen=True)
class Const(Term):
    name: str
    loc: Optional[Loc] = field(default=None, compare=False, repr=False)

    def __repr__(self):
        return f"Const({self.name})"


@dataclass(frozen=True)
class BVar(Term):
    index: int

    def __repr__(self):
        return f"BVar({self.index})"


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    name: str = field(compare=False)
    ann: Optional[Term]
    body: Term


@dataclass(frozen=True)
class Pi(Term):
    name: str = field(compare=False)
    dom: Term
    cod: Term


def loose(t: Term) -> int:
    """One more than the largest free variable index of ``t`` (0 if closed). Cached."""
    d = t.__dict__
    if "_loose" in d:
        return d["_loose"]
    match t:
        case BVar(i):
            n = i + 1
        case App(f, a):
            n = max(loose(f), loose(a))
        case Lam(_, ann, body):
            n = max(0 if ann is None else loose(ann), loose(body) - 1)
        case Pi(_, dom, cod):
            n = max(loose(dom), loose(cod) - 1)
        case _:
            n = 0
    d["_loose"] = n
    return n


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every variable index >= ``cutoff``."""
    if by == 0 or loose(t) <= cutoff:
        return t
    match t:
        case BVar(i):
            if i < cutoff:
                return t
            if i + by < 0:
                raise AssertionError(f"negative de Bruijn index after shifting {t!r} by {by}")
            return BVar(i + by)
        case App(f, a):
            return App(shift(f, by, cutoff), shift(a, by, cutoff))
        case Lam(n, ann, body):
            return Lam(n, None if ann is None else shift(ann, by, cutoff), shift(body, by, cutoff + 1))
        case Pi(n, dom, cod):
            return Pi(n, shift(dom, by, cutoff), shift(cod, by, cutoff + 1))
        case _:
            return t


def subst(t: Term, u: Term) -> Term:
    """Replace ``BVar 0`` in ``t`` by ``u``; the remaining free indices drop by one."""
    return subst_many(t, [u])


def subst_many(t: Term, values: Sequence[Term]) -> Term:
    """Simultaneous substitution of the ``len(values)`` outermost free variables.

    ``values[k]`` replaces free index ``k``; indices past the substituted block
    drop by ``len(values)``.  Values live in the context outside ``t``'s block.
    """
    n = len(values)
    if n == 0:
        return t

    def go(t: Term, depth: int) -> Term:
        if loose(t) <= depth:
            return t
        match t:
            case BVar(i):
                if i < depth:
                    return t
                k = i - depth
                if k < n:
                    return shift(values[k], depth, 0)
                return BVar(i - n)
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Lam(name, ann, body):
                return Lam(name, None if ann is None else go(ann, depth), go(body, depth + 1))
            case Pi(name, dom, cod):
                return Pi(name, go(dom, depth), go(cod, depth + 1))
            case _:
                return t

    return go(t, 0)


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u


def has_free(t: Term, index: int) -> bool:
    """True iff free variable ``index`` occurs in ``t``."""
    if loose(t) <= index:
        return False
    match t:
        case BVar(i):
            return i == index
        case App(f, a):
            return has_free(f, index) or has_free(a, index)
        case Lam(_, ann, body):
            return (ann is not None and has_free(ann, index)) or has_free(body, index + 1)
        case Pi(_, dom, cod):
            return has_free(dom, index) or has_free(cod, index + 1)
        case _:
            return False


def free_vars(t: Term, depth: int = 0) -> set[int]:
    """Indices of free variables of ``t`` (relative to the outside of ``t``)."""
    if loose(t) <= depth:
        return set()
    match t:
        case BVar(i):
            return {i - depth} if i >= depth else set()
        case App(f, a):
            return free_vars(f, depth) | free_vars(a, depth)
        case Lam(_, ann, body):
            out = free_vars(body, depth + 1)
            return out | free_vars(ann, depth) if ann is not None else out
        case Pi(_, dom, cod):
            return free_vars(dom, depth) | free_vars(cod, depth + 1)
        case _:
            return set()


def constants(t: Term) -> Iterator[str]:
    match t:
        case Const(name):
            yield name
        case App(f, a):
            yield from constants(f)
            yield from constants(a)
        case Lam(_, ann, body):
            if ann is not None:
                yield from constants(ann)
            yield from constants(body)
        case Pi(_, dom, cod):
            yield from constants(dom)
            yield from constants(cod)


def unspine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def apply(head: Term, args: Sequence[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def arrow(dom: Term, cod: Term, name: str = "_") -> Pi:
    """Non-dependent product; ``cod`` is written outside the new binder."""
    return Pi(name, dom, shift(cod, 1, 0))


class Context:
    """Telescope of typed bound variables, outermost first."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[tuple[str, Term]] = ()):
        self.entries = tuple(entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        return f"Context({list(self.entries)!r})"

    def extend(self, name: str, ty: Term) -> "Context":
        return Context(self.entries + ((name, ty),))

    def lookup(self, index: int) -> Term:
        """Type of ``BVar index``, valid in the full context."""
        name, ty = self.entries[len(self.entries) - 1 - index]
        return shift(ty, index + 1, 0)

    def names(self) -> list[str]:
        return [n for n, _ in self.entries]
