"""Reader and printer for ``.mdk`` theory files.

Grammar::

    file     ::= { entry }
    entry    ::= ident ":" term "."
               | "def" ident ":" term "."
               | "def" ident [":" term] ":=" term "."
               | "[" [binding {"," binding}] "]" term "-->" term "."
               | "#EVAL" term "."
               | "#CHECK" term ":" term "."
    binding  ::= ident ":" term
    term     ::= ident [":" appterm] "=>" term
               | "(" ident ":" term ")" "->" piterm
               | appterm ["->" piterm]
    appterm  ::= atom { atom }
    atom     ::= "Type" | ident | "(" term ")"

Comments are ``(; ... ;)`` and nest.  Identifiers bound by an enclosing
binder or rule context become ``BVar``; every other identifier becomes a
``Const`` whose existence the elaborator checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import Loc, ParseError
from .term import TYPE, App, BVar, Const, Context, Lam, Pi, Sort, Term, has_free, constants

KEYWORDS = {"def", "Type"}
_IDENT = re.compile(r"[A-Za-z0-9_']+")
_ANON = ""  # scope slot of a non-dependent arrow; matches no identifier
_PUNCT = ("-->", ":=", "->", "=>", ":", ".", "[", "]", "(", ")", ",")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "kw", "cmd", "punct", "eof"
    text: str
    loc: Loc


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k):
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance(1)
            continue
        if text.startswith("(;", i):
            start = Loc(file, line, col)
            depth = 0
            while True:
                if i >= n:
                    raise ParseError("unterminated comment", start, "LexError")
                if text.startswith("(;", i):
                    depth += 1
                    advance(2)
                elif text.startswith(";)", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            continue
        loc = Loc(file, line, col)
        if ch == "#":
            m = _IDENT.match(text, i + 1)
            word = m.group(0) if m else ""
            if word not in ("EVAL", "CHECK"):
                raise ParseError(f"unknown command '#{word}'", loc, "LexError")
            tokens.append(Token("cmd", "#" + word, loc))
            advance(1 + len(word))
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, loc))
            advance(len(word))
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, loc))
                advance(len(p))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", loc, "LexError")
    tokens.append(Token("eof", "", Loc(file, line, col)))
    return tokens


# ---------------------------------------------------------------------------
# Entries


@dataclass(frozen=True)
class StaticDecl:
    name: str
    type: Term
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class DefinableDecl:
    name: str
    type: Term
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class Definition:
    name: str
    type: Optional[Term]
    body: Term
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class RuleEntry:
    """Rewrite rule.  Context variables are bound in ``lhs``/``rhs`` like a
    telescope: the last context entry is ``BVar 0`` at the top level."""

    context: tuple[tuple[str, Term], ...]
    lhs: Term
    rhs: Term
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class EvalCmd:
    term: Term
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class CheckCmd:
    term: Term
    type: Term
    loc: Optional[Loc] = field(default=None, compare=False)


Entry = Union[StaticDecl, DefinableDecl, Definition, RuleEntry, EvalCmd, CheckCmd]


@dataclass
class SourceFile:
    entries: list
    path: str = "<input>"

    def __len__(self):
        return len(self.entries)


# ---------------------------------------------------------------------------
# Parser


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, text: str, file: str = "<input>"):
        self.file = file
        self.tokens = tokenize(text, file)
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "kw", "cmd") and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected '{text}'")
        t = self.tok
        self.pos += 1
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            self.fail("expected an identifier")
        self.pos += 1
        return t

    def fail(self, msg: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else f"'{t.text}'"
        raise ParseError(f"{msg}, found {found}", t.loc)

    # entries

    def parse_file(self) -> SourceFile:
        entries = []
        while self.tok.kind != "eof":
            entries.append(self.entry())
        return SourceFile(entries, self.file)

    def entry(self) -> Entry:
        t = self.tok
        loc = t.loc
        if t.kind == "cmd":
            self.pos += 1
            if t.text == "#EVAL":
                term = self.term([])
                self.expect(".")
                return EvalCmd(term, loc)
            term = self.term([])
            self.expect(":")
            ty = self.term([])
            self.expect(".")
            return CheckCmd(term, ty, loc)
        if self.at("def"):
            self.pos += 1
            name = self.ident().text
            ty = None
            if self.at(":"):
                self.pos += 1
                ty = self.term([])
            if self.at(":="):
                self.pos += 1
                body = self.term([])
                self.expect(".")
                return Definition(name, ty, body, loc)
            if ty is None:
                self.fail("expected ':' or ':='")
            self.expect(".")
            return DefinableDecl(name, ty, loc)
        if self.at("["):
            self.pos += 1
            ctx: list[tuple[str, Term]] = []
            scope: list[str] = []
            if not self.at("]"):
                while True:
                    name_tok = self.ident()
                    if name_tok.text in scope:
                        raise ParseError(f"rule variable '{name_tok.text}' bound twice", name_tok.loc)
                    self.expect(":")
                    ty = self.term(scope)
                    ctx.append((name_tok.text, ty))
                    scope.append(name_tok.text)
                    if not self.at(","):
                        break
                    self.pos += 1
            self.expect("]")
            lhs = self.term(scope)
            self.expect("-->")
            rhs = self.term(scope)
            self.expect(".")
            return RuleEntry(tuple(ctx), lhs, rhs, loc)
        if t.kind == "ident":
            self.pos += 1
            self.expect(":")
            ty = self.term([])
            self.expect(".")
            return StaticDecl(t.text, ty, loc)
        self.fail("expected a declaration, definition, rule or command")

    # terms; ``scope`` lists bound names, innermost last

    def term(self, scope: list[str]) -> Term:
        if self.tok.kind == "ident" and self.peek().text in (":", "=>") and self.peek().kind == "punct":
            if self.peek().text == "=>":
                name = self.ident().text
                self.pos += 1
                return Lam(name, None, self.term(scope + [name]))
            saved = self.pos
            try:
                return self._annotated_lambda(scope)
            except (_Backtrack, ParseError):
                self.pos = saved
        return self.piterm(scope)

    def _annotated_lambda(self, scope):
        name = self.ident().text
        self.expect(":")
        ann = self.appterm(scope)
        if not self.at("=>"):
            raise _Backtrack
        self.pos += 1
        return Lam(name, ann, self.term(scope + [name]))

    def piterm(self, scope: list[str]) -> Term:
        if self.at("(") and self.peek().kind == "ident" and self.peek(2).text == ":" and self.peek(2).kind == "punct":
            saved = self.pos
            self.pos += 1
            name = self.ident().text
            self.expect(":")
            try:
                dom = self.term(scope)
                self.expect(")")
            except ParseError:
                dom = None
            if dom is not None and self.at("->"):
                self.pos += 1
                return Pi(name, dom, self.piterm(scope + [name]))
            # a parenthesised annotated lambda, e.g. "(x : A => x) p"
            self.pos = saved
        left = self.appterm(scope)
        if self.at("->"):
            self.pos += 1
            return Pi("_", left, self.piterm(scope + [_ANON]))
        return left

    def appterm(self, scope: list[str]) -> Term:
        t = self.atom(scope)
        while self.tok.kind == "ident" or self.at("Type") or self.at("("):
            t = App(t, self.atom(scope))
        return t

    def atom(self, scope: list[str]) -> Term:
        t = self.tok
        if self.at("Type"):
            self.pos += 1
            return TYPE
        if t.kind == "ident":
            self.pos += 1
            for k, name in enumerate(reversed(scope)):
                if name == t.text:
                    return BVar(k)
            return Const(t.text, t.loc)
        if self.at("("):
            self.pos += 1
            inner = self.term(scope)
            self.expect(")")
            return inner
        self.fail("expected a term")


def parse_file(text: str, file: str = "<input>") -> SourceFile:
    return Parser(text, file).parse_file()


def parse_term(text: str, scope: Sequence[str] = (), file: str = "<term>") -> Term:
    p = Parser(text, file)
    t = p.term(list(scope))
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return t


# ---------------------------------------------------------------------------
# Printer

_LAM, _ARROW, _APP, _ATOM = range(4)


def _fresh(base: str, taken) -> str:
    if not base or base == "_" or not _IDENT.fullmatch(base) or base in KEYWORDS:
        base = "x"
    if base not in taken:
        return base
    stem = base.rstrip("0123456789") or "x"
    k = 0
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def _binder(name: str, body: Term, names: list[str]) -> str:
    taken = set(names) | set(constants(body)) | KEYWORDS
    return _fresh(name, taken)


def _show(t: Term, names: list[str], prec: int) -> str:
    match t:
        case Sort(level):
            return level
        case Const(name):
            return name
        case BVar(i):
            if i < len(names):
                return names[len(names) - 1 - i]
            return f"#{i - len(names)}"
        case App():
            s = f"{_show(t.fn, names, _APP)} {_show(t.arg, names, _ATOM)}"
            return f"({s})" if prec > _APP else s
        case Lam(name, ann, body):
            x = _binder(name, body, names)
            head = x if ann is None else f"{x} : {_show(ann, names, _APP)}"
            s = f"{head} => {_show(body, names + [x], _LAM)}"
            return f"({s})" if prec > _LAM else s
        case Pi(name, dom, cod):
            if has_free(cod, 0):
                x = _binder(name, cod, names)
                s = f"({x} : {_show(dom, names, _LAM)}) -> {_show(cod, names + [x], _ARROW)}"
            else:
                # the binder is unused, so any name works for the codomain
                d = _show(dom, names, _APP)
                if isinstance(dom, Lam) and dom.ann is not None:
                    d = f"({d})"  # "(x : A => b) -> C" would read as a dependent product
                s = f"{d} -> {_show(cod, names + [_ANON], _ARROW)}"
            return f"({s})" if prec > _ARROW else s
    raise TypeError(f"not a term: {t!r}")


def print_term(t: Term, ctx: Context | Sequence[str] = ()) -> str:
    names = ctx.names() if isinstance(ctx, Context) else list(ctx)
    return _show(t, names, _LAM)


def print_entry(e: Entry) -> str:
    match e:
        case StaticDecl(name, ty):
            return f"{name} : {print_term(ty)}."
        case DefinableDecl(name, ty):
            return f"def {name} : {print_term(ty)}."
        case Definition(name, ty, body):
            if ty is None:
                return f"def {name} := {print_term(body)}."
            return f"def {name} : {print_term(ty)} := {print_term(body)}."
        case RuleEntry(ctx, lhs, rhs):
            names: list[str] = []
            parts = []
            for n, ty in ctx:
                parts.append(f"{n} : {print_term(ty, names)}")
                names.append(n)
            return f"[{', '.join(parts)}] {print_term(lhs, names)} --> {print_term(rhs, names)}."
        case EvalCmd(term):
            return f"#EVAL {print_term(term)}."
        case CheckCmd(term, ty):
            return f"#CHECK {print_term(term)} : {print_term(ty)}."
    raise TypeError(f"not an entry: {e!r}")


def print_file(f: SourceFile) -> str:
    return "".join(print_entry(e) + "\n" for e in f.entries)
