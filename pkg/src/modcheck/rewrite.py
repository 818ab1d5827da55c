"""Patterns, matching, and reduction modulo a signature's rewrite rules.

Strategy is leftmost-outermost: weak-head normalisation fires beta steps and
the first matching rule of the head constant (declaration order), forcing
argument heads only where a pattern needs them.  Every step consumes one unit
of a shared ``Fuel`` budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .errors import FuelExhausted
from .term import App, BVar, Const, Lam, Pi, Term, apply, free_vars, shift, subst, subst_many, unspine

DEFAULT_FUEL = 100_000

# When set, every pattern-variable binding is re-checked by instantiation.
CHECK_MATCHES = False


class Fuel:
    """Step budget shared by one normalisation job."""

    __slots__ = ("limit", "used", "trace")

    def __init__(self, limit: int = DEFAULT_FUEL, trace: Optional[Callable[[int, str, Term], None]] = None):
        if limit < 1:
            raise ValueError("fuel must be positive")
        self.limit = limit
        self.used = 0
        self.trace = trace

    def tick(self, label: str, term: Term):
        if self.used >= self.limit:
            raise FuelExhausted(self.used)
        self.used += 1
        if self.trace is not None:
            self.trace(self.used, label, term)


def as_fuel(fuel: Union[int, Fuel, None]) -> Fuel:
    if isinstance(fuel, Fuel):
        return fuel
    return Fuel(DEFAULT_FUEL if fuel is None else fuel)


# ---------------------------------------------------------------------------
# Patterns


class Pattern:
    __slots__ = ()


@dataclass(frozen=True)
class PVar(Pattern):
    """Pattern variable applied to distinct variables bound inside the pattern."""

    name: str = field(compare=False)
    slot: int  # de Bruijn index of the rule-context variable at the top of the lhs
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class PConst(Pattern):
    name: str


@dataclass(frozen=True)
class PBound(Pattern):
    """Occurrence of a variable bound by an enclosing ``PLam``."""

    index: int


@dataclass(frozen=True)
class PApp(Pattern):
    head: Pattern
    arg: Pattern


@dataclass(frozen=True)
class PLam(Pattern):
    name: str = field(compare=False)
    body: Pattern


@dataclass(frozen=True)
class RewriteRule:
    head: str
    ordinal: int  # position in the head's rule list
    context: tuple[tuple[str, Term], ...]
    args: tuple[Pattern, ...]
    rhs: Term
    lhs_term: Term = field(compare=False, repr=False, default=None)
    definitional: bool = False
    source: object = field(default=None, compare=False, repr=False)

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def lhs(self) -> Pattern:
        p: Pattern = PConst(self.head)
        for a in self.args:
            p = PApp(p, a)
        return p


def pattern_vars(p: Pattern) -> list[PVar]:
    match p:
        case PVar():
            return [p]
        case PApp(h, a):
            return pattern_vars(h) + pattern_vars(a)
        case PLam(_, body):
            return pattern_vars(body)
    return []


def instantiate(p: Pattern, sol: Sequence[Term], depth: int = 0) -> Term:
    """Term denoted by ``p`` under ``sol`` (indexed by slot), PVar applications beta-reduced."""
    match p:
        case PVar(_, slot, args):
            return _beta_apply(shift(sol[slot], depth, 0), [BVar(a) for a in args])
        case PConst(name):
            return Const(name)
        case PBound(i):
            return BVar(i)
        case PApp(h, a):
            return App(instantiate(h, sol, depth), instantiate(a, sol, depth))
        case PLam(name, body):
            return Lam(name, None, instantiate(body, sol, depth + 1))
    raise TypeError(p)


def _beta_apply(f: Term, args: Sequence[Term]) -> Term:
    for i, a in enumerate(args):
        if isinstance(f, Lam):
            f = subst(f.body, a)
        else:
            return apply(f, args[i:])
    return f


def _abstract(t: Term, args: tuple[int, ...], depth: int, names: Sequence[str]) -> Optional[Term]:
    """Solve ``F x1 .. xn = t`` for ``F`` where the ``xi`` are pattern-bound.

    Returns ``None`` when ``t`` mentions a pattern-bound variable outside
    ``args``.  The solution lives outside the pattern's binders.
    """
    if depth == 0:
        return t
    local = {i for i in free_vars(t) if i < depth}
    if not local <= set(args):
        return None
    n = len(args)
    position = {a: k for k, a in enumerate(args)}

    def go(u: Term, c: int) -> Term:
        match u:
            case BVar(i):
                if i < c:
                    return u
                j = i - c
                if j < depth:
                    return BVar(c + n - 1 - position[j])
                return BVar(c + j - depth + n)
            case App(f, a):
                return App(go(f, c), go(a, c))
            case Lam(nm, ann, body):
                return Lam(nm, None if ann is None else go(ann, c), go(body, c + 1))
            case Pi(nm, dom, cod):
                return Pi(nm, go(dom, c), go(cod, c + 1))
        return u

    body = go(t, 0)
    for a in reversed(args):
        body = Lam(names[len(names) - 1 - a], None, body)
    return body


class _Matcher:
    def __init__(self, sig, fuel: Optional[Fuel], nslots: int):
        self.sig = sig
        self.fuel = fuel
        self.sol: list[Optional[Term]] = [None] * nslots

    def force(self, t: Term) -> Term:
        return whnf(self.sig, t, self.fuel) if self.sig is not None else t

    def match(self, p: Pattern, t: Term, depth: int, names: list[str]) -> bool:
        if isinstance(p, PVar):
            return self.bind(p, t, depth, names)
        return self.rigid(p, self.force(t), depth, names)

    def bind(self, p: PVar, t: Term, depth: int, names: list[str]) -> bool:
        value = _abstract(t, p.args, depth, names)
        if value is None and self.sig is not None:
            # a forbidden variable may vanish on reduction
            t = snf(self.sig, t, self.fuel)
            value = _abstract(t, p.args, depth, names)
        if value is None:
            return False
        if CHECK_MATCHES:
            back = _beta_apply(shift(value, depth, 0), [BVar(a) for a in p.args])
            assert back == t, f"unsound match for {p.name}: {back!r} != {t!r}"
        self.sol[p.slot] = value
        return True

    def rigid(self, p: Pattern, t: Term, depth: int, names: list[str]) -> bool:
        match p:
            case PConst(name):
                return isinstance(t, Const) and t.name == name
            case PBound(i):
                return isinstance(t, BVar) and t.index == i
            case PApp(h, a):
                if not isinstance(t, App):
                    return False
                return self.rigid(h, t.fn, depth, names) and self.match(a, t.arg, depth, names)
            case PLam(name, body):
                if not isinstance(t, Lam):
                    return False
                return self.match(body, t.body, depth + 1, names + [name])
        return False


def match(p: Pattern, t: Term, sig=None, fuel: Union[int, Fuel, None] = None, nslots: Optional[int] = None):
    """Match ``t`` against ``p``; returns ``{variable name: term}`` or ``None``.

    Without ``sig`` the match is purely syntactic; with it, subterm heads are
    weak-head normalised on demand.
    """
    pvars = pattern_vars(p)
    if nslots is None:
        nslots = max((v.slot for v in pvars), default=-1) + 1
    m = _Matcher(sig, as_fuel(fuel) if sig is not None else None, nslots)
    if not m.match(p, t, 0, []):
        return None
    return {v.name: m.sol[v.slot] for v in pvars}


def head_rewrite(sig, t: Term, fuel: Union[int, Fuel, None] = None) -> Optional[Term]:
    """One rewrite step at the head of ``t`` with the first matching rule, if any."""
    fuel = as_fuel(fuel)
    head, args = unspine(t)
    if not isinstance(head, Const):
        return None
    rules = sig.rules_for(head.name)
    if not rules:
        return None
    forced: list[Optional[Term]] = [None] * len(args)
    for rule in rules:
        if len(rule.args) > len(args):
            continue
        m = _Matcher(sig, fuel, len(rule.context))
        ok = True
        for i, p in enumerate(rule.args):
            if isinstance(p, PVar):
                ok = m.bind(p, args[i], 0, [])
            else:
                if forced[i] is None:
                    forced[i] = whnf(sig, args[i], fuel)
                ok = m.rigid(p, forced[i], 0, [])
            if not ok:
                break
        if ok:
            return apply(subst_many(rule.rhs, m.sol), args[len(rule.args):])
    return None


def whnf(sig, t: Term, fuel: Union[int, Fuel, None] = None) -> Term:
    fuel = as_fuel(fuel)
    while True:
        head, args = unspine(t)
        if isinstance(head, Lam) and args:
            t = apply(subst(head.body, args[0]), args[1:])
            fuel.tick("beta", t)
            continue
        if isinstance(head, Const):
            reduct = head_rewrite(sig, t, fuel)
            if reduct is not None:
                t = reduct
                fuel.tick(head.name, t)
                continue
        return t


def snf(sig, t: Term, fuel: Union[int, Fuel, None] = None) -> Term:
    fuel = as_fuel(fuel)
    t = whnf(sig, t, fuel)
    match t:
        case Lam(name, ann, body):
            return Lam(name, None if ann is None else snf(sig, ann, fuel), snf(sig, body, fuel))
        case Pi(name, dom, cod):
            return Pi(name, snf(sig, dom, fuel), snf(sig, cod, fuel))
        case App():
            head, args = unspine(t)
            return apply(head, [snf(sig, a, fuel) for a in args])
    return t


def find_redex(sig, t: Term) -> Optional[Term]:
    """Some beta- or rule-redex inside ``t``, or ``None``.  Independent of ``snf``."""
    head, args = unspine(t)
    if isinstance(head, Lam) and args:
        return t
    if isinstance(head, Const) and sig.rules_for(head.name):
        if head_rewrite(sig, t, Fuel(DEFAULT_FUEL)) is not None:
            return t
    for a in args:
        r = find_redex(sig, a)
        if r is not None:
            return r
    match head:
        case Lam(_, ann, body):
            return (find_redex(sig, ann) if ann is not None else None) or find_redex(sig, body)
        case Pi(_, dom, cod):
            return find_redex(sig, dom) or find_redex(sig, cod)
    return None
