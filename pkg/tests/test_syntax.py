import random

import pytest
from hypothesis import given, settings, strategies as st

from ctxlearn.grounder import ground
from ctxlearn.solver import answer_sets
from ctxlearn.syntax import (
    ASPSyntaxError, ArityClashError, Atom, Choice, Const, Func, Literal, Program, Range, Rule,
    UnsafeRuleError, Var, WeakTail, append_body, parse_atom, parse_program, parse_rule, reify,
    rule_length,
)

from micro import VOCAB, random_program, random_rule


def test_range_fact():
    p = parse_program("coin(1..2).")
    assert len(p.rules) == 1
    assert p.rules[0].head == Atom("coin", (Range(1, 2),))


def test_empty_program():
    assert parse_program("") == Program()
    assert parse_program("% only a comment\n") == Program()


def test_missing_period():
    with pytest.raises(ASPSyntaxError):
        parse_program("p :- q")


def test_syntax_error_reports_position():
    with pytest.raises(ASPSyntaxError) as err:
        parse_program("p.\nq :- .")
    assert err.value.line == 2


def test_arity_clash():
    with pytest.raises(ArityClashError):
        parse_program("p(1). p(1,2).")


def test_unsafe_rule():
    with pytest.raises(UnsafeRuleError):
        parse_program("p(X) :- not q(X).")
    with pytest.raises(UnsafeRuleError):
        parse_program(":~ p.[X@1]")


def test_weak_constraint_needs_tail():
    with pytest.raises(ASPSyntaxError):
        parse_program(":~ p.")


def test_rule_kinds():
    kinds = [r.kind for r in parse_program("p. q :- p. :- q. 1 { a; b } 1 :- p. :~ a.[1@2, x]").rules]
    assert kinds == ["normal", "normal", "constraint", "choice", "weak"]


def test_weak_tail_fields():
    r = parse_rule(":~ mode(L,bus).[1@2, L]")
    assert r.tail == WeakTail(Const(1), Const(2), (Var("L"),))


def test_comparison_and_negative_integers():
    r = parse_rule("p(X) :- q(X), X > -3, X != 4.")
    assert len(r.body) == 3
    assert parse_atom("p(-1)").args == (Const(-1),)


def test_integer_overflow_rejected():
    with pytest.raises(ASPSyntaxError):
        parse_program("p(99999999999999999999).")


def test_rule_length():
    assert rule_length(parse_rule("go_out :- not raining.")) == 2
    assert rule_length(parse_rule("1 { a; b; c } 2 :- d.")) == 4
    assert rule_length(parse_rule(":~ a, b.[1@1]")) == 2


# ------------------------------------------------------------- append/reify


def test_append_body_examples():
    ctx = parse_atom("ctx(e2)")
    assert append_body(parse_program("raining."), ctx) == parse_program("raining :- ctx(e2).")
    assert append_body(Program(), ctx) == Program()
    assert append_body(parse_program("1{p}1."), Atom("a")) == parse_program("1{p}1 :- a.")


def test_reify_examples():
    assert reify(parse_program("p :- not q."), "as1") == parse_program("as1(p) :- not as1(q).")
    assert reify(parse_program(":~ p.[1@1]"), "as1") == Program()
    assert reify(Program(), "x") == Program()


def test_reify_rejects_used_wrapper():
    with pytest.raises(ValueError):
        reify(parse_program("as1(p)."), "as1")


def test_reify_keeps_choice_bounds():
    r = reify(parse_program("1 { p; q } 2 :- r."), "w").rules[0]
    assert r.head == Choice(1, (Atom("w", (Const("p"),)), Atom("w", (Const("q"),))), 2)


# ------------------------------------------------------------- properties

names = st.sampled_from(["a", "b", "node", "val"])
consts = st.one_of(st.integers(-50, 50).map(Const), names.map(Const))
terms = st.recursive(consts, lambda inner: st.builds(Func, names, st.lists(inner, min_size=1, max_size=2).map(tuple)),
                     max_leaves=4)


@st.composite
def ground_rules(draw):
    atoms = st.builds(lambda p, args: Atom(p, tuple(args)), st.sampled_from(["p", "q", "r"]),
                      st.lists(terms, max_size=0)) | st.builds(
        lambda p, args: Atom(p, tuple(args)), st.sampled_from(["s", "t"]), st.lists(terms, min_size=2, max_size=2))
    body = tuple(draw(st.lists(st.builds(Literal, atoms, st.booleans()), max_size=3)))
    kind = draw(st.sampled_from(["normal", "constraint", "choice", "weak"]))
    if kind == "normal":
        return Rule(draw(atoms), body)
    if kind == "constraint":
        return Rule(None, body)
    if kind == "choice":
        elems = tuple(draw(st.lists(atoms, min_size=1, max_size=3)))
        lo = draw(st.integers(0, len(elems)))
        hi = draw(st.one_of(st.none(), st.integers(lo, len(elems))))
        return Rule(Choice(lo, elems, hi), body)
    tail = WeakTail(Const(draw(st.integers(-5, 5))), Const(draw(st.integers(1, 3))),
                    tuple(draw(st.lists(terms, max_size=2))))
    return Rule(None, body, tail)


@given(st.lists(ground_rules(), max_size=6))
@settings(max_examples=200, deadline=None)
def test_print_parse_round_trip(rules):
    p = Program(tuple(rules))
    assert parse_program(str(p)) == p


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_append_body_shape(seed):
    rng = random.Random(seed)
    p = random_program(rng, list(VOCAB), rng.randint(0, 5), ("normal", "constraint", "choice", "weak"))
    q = append_body(p, Atom("z"))
    assert len(q.rules) == len(p.rules)
    for r, s in zip(p.rules, q.rules):
        assert len(s.body) == len(r.body) + 1 and s.body[-1] == Literal(Atom("z"))
        assert s.head == r.head and s.tail == r.tail


@given(st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_reify_is_a_renaming(seed):
    rng = random.Random(seed)
    p = random_program(rng, list(VOCAB), rng.randint(0, 6))
    wrapped = {frozenset(a.args[0] for a in m) for m in answer_sets(ground(reify(p, "w")))}
    plain = {frozenset(Const(a.pred) for a in m) for m in answer_sets(ground(p))}
    assert wrapped == plain


def test_random_rule_round_trip():
    rng = random.Random(7)
    for _ in range(200):
        r = random_rule(rng, list(VOCAB))
        assert parse_rule(str(r)) == r
