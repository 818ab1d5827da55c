import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modcheck.errors import FuelExhausted
from modcheck.rewrite import (
    DEFAULT_FUEL, Fuel, PApp, PBound, PConst, PLam, PVar, find_redex, head_rewrite, instantiate, match, snf, whnf,
)
from modcheck.syntax import parse_term, print_term
from modcheck.term import App, BVar, Const, Lam, alpha_eq, shift
from conftest import elab
from corpus import typed_corpus
from oracles import hand_nf_plus, hand_whnf_plus, numeral, tree_numeral, tree_term

plus, S, Z = Const("plus"), Const("S"), Const("0")


def P(text):
    return parse_term(text)


def plus_pattern(first, second):
    return PApp(PApp(PConst("plus"), first), second)


def test_match_structural():
    p = plus_pattern(PConst("0"), PVar("y", 0))
    assert match(p, P("plus 0 (S 0)")) == {"y": P("S 0")}


def test_match_head_mismatch():
    p = plus_pattern(PConst("0"), PVar("y", 0))
    assert match(p, P("plus (S 0) 0")) is None


def test_match_under_binder_solves_miller_pattern(theories):
    p = PLam("x", PVar("F", 0, (0,)))
    t = Lam("x", None, App(Const("g"), BVar(0)))
    sol = match(p, t)
    assert sol == {"F": Lam("x", None, App(Const("g"), BVar(0)))}
    # F x must beta-reduce to g x
    applied = App(shift(sol["F"], 1, 0), BVar(0))
    assert whnf(theories["nat_t"], applied) == App(Const("g"), BVar(0))


def test_match_argument_order_in_solution():
    # F y x against g x y, with x outer and y inner
    p = PLam("x", PLam("y", PVar("F", 0, (0, 1))))
    t = Lam("x", None, Lam("y", None, App(App(Const("g"), BVar(1)), BVar(0))))
    sol = match(p, t)
    assert sol["F"] == Lam("y", None, Lam("x", None, App(App(Const("g"), BVar(0)), BVar(1))))
    assert instantiate(p, [sol["F"]]) == t


def test_match_rejects_escaping_bound_variable():
    p = PLam("x", PVar("F", 0, ()))
    assert match(p, Lam("x", None, App(Const("g"), BVar(0)))) is None
    assert match(p, Lam("x", None, Const("g"))) == {"F": Const("g")}


def test_match_bound_variable_occurrence():
    p = PLam("x", PApp(PConst("g"), PBound(0)))
    assert match(p, Lam("x", None, App(Const("g"), BVar(0)))) == {}
    assert match(p, Lam("x", None, App(Const("g"), Const("c")))) is None


def test_match_retries_after_normalising_forbidden_variable(theories):
    sig = theories["nat_t"]
    p = PLam("x", PVar("F", 0, ()))
    # the bound x disappears once the redex is contracted
    t = Lam("x", None, App(Lam("y", None, Z), BVar(0)))
    assert match(p, t, sig=sig) == {"F": Z}


def test_head_rewrite_examples(theories):
    nat = theories["nat_t"]
    assert head_rewrite(nat, P("plus 0 (S 0)")) == P("S 0")
    stuck = App(App(plus, BVar(0)), BVar(1))
    assert head_rewrite(nat, stuck) is None
    mm = theories["minimal_modulo"]
    assert head_rewrite(mm, P("eps (imp A B)")) == P("eps A -> eps B")


def test_head_rewrite_plus_against_hand_rewriting(theories):
    nat = theories["nat_t"]
    t = ("plus", tree_numeral(1), tree_numeral(2))
    # one rule-2 step by hand
    assert head_rewrite(nat, tree_term(t)) == tree_term(("S", ("plus", tree_numeral(0), tree_numeral(2))))


def test_head_rewrite_ignores_rules_with_too_few_arguments(theories):
    assert head_rewrite(theories["nat_t"], P("plus 0")) is None


def test_head_rewrite_keeps_extra_arguments():
    sig = elab("A : Type. a : A. b : A. def k : A -> A -> A. [x : A] k x --> y => x.")
    assert head_rewrite(sig, P("k a b")) == App(Lam("y", None, Const("a")), Const("b"))
    assert whnf(sig, P("k a b")) == Const("a")


def test_first_matching_rule_wins():
    sig = elab("A : Type. a : A. b : A. def f : A -> A. [x : A] f x --> a. [] f b --> b.")
    assert whnf(sig, P("f b")) == Const("a")


def test_whnf_examples(theories):
    nat = theories["nat_t"]
    p = Const("p")
    assert whnf(nat, App(Lam("x", Const("A"), BVar(0)), p)) == p
    t = ("plus", tree_numeral(2), tree_numeral(2))
    expected = tree_term(hand_whnf_plus(t))
    assert whnf(nat, tree_term(t)) == expected
    assert print_term(expected) == "S (plus (S 0) (S (S 0)))"
    assert whnf(nat, S) == S


def test_whnf_leaves_spine_arguments_alone(theories):
    nat = theories["nat_t"]
    t = App(S, P("plus 0 0"))
    assert whnf(nat, t) is t


def test_snf_examples(theories):
    nat, mm = theories["nat_t"], theories["minimal_modulo"]
    t = ("plus", tree_numeral(2), tree_numeral(2))
    assert snf(nat, tree_term(t)) == tree_term(hand_nf_plus(t)) == numeral(4)
    A = Const("A")
    redex_under_binder = Lam("x", A, App(Lam("y", A, BVar(0)), BVar(0)))
    assert snf(nat, redex_under_binder) == Lam("x", A, BVar(0))
    assert snf(mm, P("eps (imp A (imp A B))")) == P("eps A -> eps A -> eps B")


def test_fuel_is_consumed_per_step(theories):
    fuel = Fuel(100)
    snf(theories["nat_t"], P("plus (S (S 0)) (S (S 0))"), fuel)
    assert fuel.used == 3


def test_fuel_exhaustion_reports_steps(theories):
    with pytest.raises(FuelExhausted) as info:
        snf(theories["nat_t"], P("plus (S (S 0)) (S (S 0))"), 2)
    assert info.value.steps == 2


def test_fuel_must_be_positive():
    with pytest.raises(ValueError):
        Fuel(0)


def test_divergent_rule_exhausts_fuel():
    sig = elab("nat : Type. 0 : nat. S : nat -> nat. def loop : nat -> nat. [x : nat] loop x --> loop (S x).")
    with pytest.raises(FuelExhausted):
        whnf(sig, P("loop 0"), 1000)


def test_trace_sees_every_step(theories):
    seen = []
    fuel = Fuel(50, lambda k, label, t: seen.append((k, label)))
    whnf(theories["nat_t"], P("(x : nat => plus x 0) (S 0)"), fuel)
    assert seen == [(1, "beta"), (2, "plus")]


def test_stt_quantifier_rule(theories):
    stt = theories["stt"]
    t = P("eps (forall o (p => imp p p))")
    assert print_term(snf(stt, t)) == "(x : term o) -> eps x -> eps x"


def test_definitions_unfold(theories):
    assert whnf(theories["minimal_modulo"], Const("example")) == theories["minimal_modulo"].lookup("example").body


# properties over the corpus

CORPUS = typed_corpus()
CORPUS_IDS = [f"{name}-{i}" for i, (name, *_rest) in enumerate(CORPUS)]


@pytest.mark.parametrize("name, sig, term, ty", CORPUS, ids=CORPUS_IDS)
def test_whnf_idempotent_and_deterministic(name, sig, term, ty):
    w = whnf(sig, term)
    assert alpha_eq(whnf(sig, w), w)
    assert alpha_eq(whnf(sig, term), w)


@pytest.mark.parametrize("name, sig, term, ty", CORPUS, ids=CORPUS_IDS)
def test_snf_has_no_redex(name, sig, term, ty):
    for t in (term, ty):
        n = snf(sig, t)
        assert find_redex(sig, n) is None
        assert alpha_eq(whnf(sig, n), n)


def test_redex_scanner_finds_redexes(theories):
    nat = theories["nat_t"]
    assert find_redex(nat, App(S, P("plus 0 0"))) == P("plus 0 0")
    assert find_redex(nat, Lam("x", None, App(Lam("y", None, BVar(0)), BVar(0)))) is not None
    assert find_redex(nat, numeral(3)) is None


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 40))
@settings(max_examples=60, deadline=None)
def test_fuel_monotonicity(m, n, extra):
    from modcheck import kit

    nat = kit.get("nat_t").elaborate()
    t = App(App(plus, numeral(m)), numeral(n))
    needed = Fuel(DEFAULT_FUEL)
    base = snf(nat, t, needed)
    assert snf(nat, t, needed.used + extra) == base
    if needed.used > 1:
        with pytest.raises(FuelExhausted):
            snf(nat, t, needed.used - 1)
