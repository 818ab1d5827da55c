"""Bidirectional type checking for the lambda-Pi calculus modulo rewriting,
and elaboration of source files into signatures."""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Union

from .errors import CheckError, Loc, ModError
from .rewrite import DEFAULT_FUEL, Fuel, PApp, PBound, PConst, PLam, PVar, Pattern, RewriteRule, as_fuel, snf, whnf
from .signature import DEFINABLE, STATIC, CommandResult, SigEntry, Signature
from .syntax import CheckCmd, Definition, DefinableDecl, EvalCmd, RuleEntry, SourceFile, StaticDecl, print_term
from .term import KIND, TYPE, App, BVar, Const, Context, Lam, Pi, Sort, Term, free_vars, subst, unspine

FuelArg = Union[int, Fuel, None]


def _err(category: str, message: str, loc: Optional[Loc] = None) -> CheckError:
    return CheckError(message, loc, category)


# ---------------------------------------------------------------------------
# Conversion


def conv(sig: Signature, t: Term, u: Term, fuel: FuelArg = None) -> bool:
    """Convertibility modulo beta and the signature's rules.

    Both sides are weak-head normalised and compared head-first; subterms are
    normalised only when the comparison reaches them.  Lambdas must agree on
    whether they carry an annotation, like ``alpha_eq``.
    """
    return _conv(sig, t, u, as_fuel(fuel))


def _conv(sig, t, u, fuel) -> bool:
    if t == u:
        return True
    t = whnf(sig, t, fuel)
    u = whnf(sig, u, fuel)
    if t == u:
        return True
    match t, u:
        case Pi(), Pi():
            return _conv(sig, t.dom, u.dom, fuel) and _conv(sig, t.cod, u.cod, fuel)
        case Lam(), Lam():
            if (t.ann is None) != (u.ann is None):
                return False
            if t.ann is not None and not _conv(sig, t.ann, u.ann, fuel):
                return False
            return _conv(sig, t.body, u.body, fuel)
        case App(), App():
            h1, args1 = unspine(t)
            h2, args2 = unspine(u)
            if len(args1) != len(args2) or not _same_head(h1, h2):
                return False
            return all(_conv(sig, a, b, fuel) for a, b in zip(args1, args2))
    return False


def _same_head(h1: Term, h2: Term) -> bool:
    match h1, h2:
        case Const(a), Const(b):
            return a == b
        case BVar(i), BVar(j):
            return i == j
    return False


# ---------------------------------------------------------------------------
# Typing


def infer(sig: Signature, ctx: Context, t: Term, fuel: FuelArg = None) -> Term:
    return _infer(sig, ctx, t, as_fuel(fuel))


def check(sig: Signature, ctx: Context, t: Term, expected: Term, fuel: FuelArg = None) -> None:
    _check(sig, ctx, t, expected, as_fuel(fuel))


def _infer(sig, ctx, t, fuel) -> Term:
    match t:
        case Sort("Type"):
            return KIND
        case Sort():
            raise _err("CannotInfer", "Kind has no type")
        case Const(name):
            entry = sig.lookup(name)
            if entry is None:
                raise _err("UnboundName", f"unknown constant '{name}'", t.loc)
            return entry.type
        case BVar(i):
            if i >= len(ctx):
                raise _err("UnboundName", f"variable #{i} escapes its context")
            return ctx.lookup(i)
        case App(f, a):
            fty = whnf(sig, _infer(sig, ctx, f, fuel), fuel)
            if not isinstance(fty, Pi):
                raise _err(
                    "NotAFunction",
                    f"'{print_term(f, ctx)}' is applied to '{print_term(a, ctx)}' but has type "
                    f"'{print_term(fty, ctx)}'",
                    _loc_of(f),
                )
            _check(sig, ctx, a, fty.dom, fuel)
            return subst(fty.cod, a)
        case Lam(name, ann, body):
            if ann is None:
                raise _err("CannotInfer", f"cannot infer the type of unannotated '{print_term(t, ctx)}'")
            _expect_sort(sig, ctx, ann, fuel, allow_kind=False)
            inner = ctx.extend(name, ann)
            bty = _infer(sig, inner, body, fuel)
            if whnf(sig, bty, fuel) == KIND:
                raise _err("TypeMismatch", f"cannot abstract over '{print_term(body, inner)}', a kind")
            return Pi(name, ann, bty)
        case Pi(name, dom, cod):
            _expect_sort(sig, ctx, dom, fuel, allow_kind=False)
            return _expect_sort(sig, ctx.extend(name, dom), cod, fuel, allow_kind=True)
    raise TypeError(f"not a term: {t!r}")


def _check(sig, ctx, t, expected, fuel) -> None:
    if isinstance(t, Lam):
        exp = whnf(sig, expected, fuel)
        if not isinstance(exp, Pi):
            raise _err(
                "TypeMismatch",
                f"'{print_term(t, ctx)}' is a function but is expected to have type '{print_term(expected, ctx)}'",
            )
        if t.ann is not None:
            _expect_sort(sig, ctx, t.ann, fuel, allow_kind=False)
            if not _conv(sig, t.ann, exp.dom, fuel):
                raise _err(
                    "TypeMismatch",
                    f"binder '{t.name}' is annotated '{print_term(t.ann, ctx)}' but the expected "
                    f"domain is '{print_term(exp.dom, ctx)}'",
                )
        _check(sig, ctx.extend(t.name, exp.dom), t.body, exp.cod, fuel)
        return
    actual = _infer(sig, ctx, t, fuel)
    if not _conv(sig, actual, expected, fuel):
        raise _err(
            "TypeMismatch",
            f"'{print_term(t, ctx)}' has type '{print_term(actual, ctx)}' "
            f"but is expected to have type '{print_term(expected, ctx)}'",
            _loc_of(t),
        )


def _expect_sort(sig, ctx, t, fuel, allow_kind: bool) -> Sort:
    s = whnf(sig, _infer(sig, ctx, t, fuel), fuel)
    if s == TYPE or (allow_kind and s == KIND):
        return s
    want = "a type or a kind" if allow_kind else "a type"
    raise _err("TypeMismatch", f"'{print_term(t, ctx)}' should be {want} but has type '{print_term(s, ctx)}'")


def _loc_of(t: Term) -> Optional[Loc]:
    head, _ = unspine(t)
    return head.loc if isinstance(head, Const) else None


# ---------------------------------------------------------------------------
# Rule patterns


def compile_pattern(ctx: Context, lhs: Term, sig: Signature) -> tuple[str, tuple[Pattern, ...]]:
    """Validate a rule's left-hand side and turn its arguments into patterns."""
    head, args = unspine(lhs)
    if not isinstance(head, Const):
        raise _err("IllFormedPattern", f"left-hand side '{print_term(lhs, ctx)}' is not headed by a constant")
    entry = sig.lookup(head.name)
    if entry is None:
        raise _err("UnboundName", f"unknown constant '{head.name}'", head.loc)
    if entry.kind == STATIC:
        raise _err("RewriteOnStaticConstant", f"'{head.name}' is static; declare it with 'def' to give it rules", head.loc)
    if entry.is_definition:
        raise _err("RewriteOnStaticConstant", f"'{head.name}' is defined; it cannot take further rules", head.loc)
    names = ctx.names()
    seen: set[int] = set()

    def go(t: Term, depth: int, local: list[str]) -> Pattern:
        h, xs = unspine(t)
        match h:
            case BVar(i) if i >= depth:
                slot = i - depth
                name = names[len(names) - 1 - slot]
                bound = []
                for x in xs:
                    if not (isinstance(x, BVar) and x.index < depth) or x.index in bound:
                        raise _err(
                            "IllFormedPattern",
                            f"pattern variable '{name}' must be applied to distinct bound variables",
                        )
                    bound.append(x.index)
                if slot in seen:
                    raise _err("NonLinearPattern", f"pattern variable '{name}' occurs more than once")
                seen.add(slot)
                return PVar(name, slot, tuple(bound))
            case BVar(i):
                p: Pattern = PBound(i)
            case Const(c):
                if c not in sig:
                    raise _err("UnboundName", f"unknown constant '{c}'", h.loc)
                p = PConst(c)
            case Lam(name, _, body) if not xs:
                return PLam(name, go(body, depth + 1, local + [name]))
            case _:
                raise _err("IllFormedPattern", f"'{print_term(t, names + local)}' is not allowed in a pattern")
        for x in xs:
            p = PApp(p, go(x, depth, local))
        return p

    return head.name, tuple(go(a, 0, []) for a in args)


# ---------------------------------------------------------------------------
# Elaboration


class Elaborator:
    """Processes entries in order, growing a signature."""

    def __init__(self, name: str = "<signature>", fuel: int = DEFAULT_FUEL,
                 trace: Optional[Callable[[int, str, Term], None]] = None):
        self.sig = Signature(name)
        self.fuel_limit = fuel
        self.trace = trace

    def fuel(self) -> Fuel:
        return Fuel(self.fuel_limit, self.trace)

    def add(self, entry) -> None:
        try:
            self._add(entry)
        except ModError as e:
            raise e.at(getattr(entry, "loc", None))

    def _add(self, entry) -> None:
        sig = self.sig
        fuel = self.fuel()
        empty = Context()
        match entry:
            case StaticDecl(name, ty) | DefinableDecl(name, ty):
                self._fresh_name(name)
                _expect_sort(sig, empty, ty, fuel, allow_kind=True)
                kind = STATIC if isinstance(entry, StaticDecl) else DEFINABLE
                sig._declare(SigEntry(name, kind, ty, len(sig.source), None, entry))
                sig.source.append(entry)
            case Definition(name, ty, body):
                self._fresh_name(name)
                if ty is not None:
                    _expect_sort(sig, empty, ty, fuel, allow_kind=True)
                    _check(sig, empty, body, ty, fuel)
                else:
                    ty = _infer(sig, empty, body, fuel)
                    if ty == KIND:
                        raise _err("TypeMismatch", f"'{name}' would name a kind-level term")
                sig._declare(SigEntry(name, DEFINABLE, ty, len(sig.source), body, entry))
                sig._add_rule(RewriteRule(name, 0, (), (), body, Const(name), True, entry))
                sig.source.append(entry)
            case RuleEntry(context, lhs, rhs):
                ctx = Context()
                for n, ty in context:
                    _expect_sort(sig, ctx, ty, fuel, allow_kind=True)
                    ctx = ctx.extend(n, ty)
                head, args = compile_pattern(ctx, lhs, sig)
                bound = {p.slot for a in args for p in _pvars(a)}
                for i in sorted(free_vars(rhs)):
                    if i < len(ctx) and i not in bound:
                        raise _err(
                            "UnboundPatternVariable",
                            f"'{ctx.names()[len(ctx) - 1 - i]}' occurs on the right-hand side only",
                        )
                lhs_ty = _infer(sig, ctx, lhs, fuel)
                _check(sig, ctx, rhs, lhs_ty, fuel)
                ordinal = len(sig.rules_for(head))
                sig._add_rule(RewriteRule(head, ordinal, tuple(context), args, rhs, lhs, False, entry))
                sig.source.append(entry)
            case EvalCmd(term):
                _infer(sig, empty, term, fuel)
                sig.outputs.append(CommandResult("eval", term, snf(sig, term, fuel), entry))
            case CheckCmd(term, ty):
                _expect_sort(sig, empty, ty, fuel, allow_kind=True)
                _check(sig, empty, term, ty, fuel)
                sig.outputs.append(CommandResult("check", term, ty, entry))
            case _:
                raise TypeError(f"not an entry: {entry!r}")

    def _fresh_name(self, name: str):
        if name in self.sig:
            raise _err("RedeclaredName", f"'{name}' is already declared")


def _pvars(p: Pattern):
    match p:
        case PVar():
            yield p
        case PApp(h, a):
            yield from _pvars(h)
            yield from _pvars(a)
        case PLam(_, body):
            yield from _pvars(body)


def elaborate(file: Union[SourceFile, Iterable], fuel: int = DEFAULT_FUEL,
              trace: Optional[Callable[[int, str, Term], None]] = None, name: Optional[str] = None) -> Signature:
    """Check every entry in order and return the resulting signature."""
    if isinstance(file, SourceFile):
        entries, name = file.entries, name or file.path
    else:
        entries = list(file)
    el = Elaborator(name or "<signature>", fuel, trace)
    for e in entries:
        el.add(e)
    return el.sig
