import random

import pytest
from hypothesis import given, settings, strategies as st

from ctxlearn.grounder import ground
from ctxlearn.preference import (
    WeakConstraintError, WeakTuple, compare, dominates, equally_optimal, score_at_level, score_table,
    weak_tuples,
)
from ctxlearn.syntax import Const, Program, Rule, parse_atom, parse_program

WS = parse_program("""
:~ mode(L,walk), crime_rating(L,R), R > 3.[1@3, L, R]
:~ mode(L,bus).[1@2, L]
:~ mode(L,walk), distance(L,D).[D@1, L, D]
""")
W = parse_program(":~ val(C,t).[1@1, C]")


def atoms(text):
    return frozenset(parse_atom(a) for a in text.split())


WALKS = atoms("mode(l1,walk) distance(l1,100) mode(l2,walk) distance(l2,50) crime_rating(l1,1) crime_rating(l2,1)")


def test_walking_legs_pay_their_distance():
    assert weak_tuples(WS, WALKS) == {
        WeakTuple(100, 1, (Const("l1"), Const(100))),
        WeakTuple(50, 1, (Const("l2"), Const(50))),
    }
    assert score_at_level(WS, WALKS, 1) == 150
    assert score_at_level(WS, WALKS, 3) == 0


def test_one_bus_leg():
    assert score_at_level(WS, atoms("mode(l1,bus) distance(l1,7)"), 2) == 1


def test_no_weak_constraints():
    assert weak_tuples(parse_program("p :- q."), WALKS) == frozenset()


def test_identical_tails_counted_once():
    p = parse_program(":~ a.[1@1, x] :~ b.[1@1, x]")
    assert weak_tuples(p, atoms("a b")) == {WeakTuple(1, 1, (Const("x"),))}
    assert score_at_level(p, atoms("a b"), 1) == 1


def test_non_integer_weight_rejected():
    with pytest.raises(WeakConstraintError):
        weak_tuples(parse_program("p(a). :~ p(X).[X@1]"), atoms("p(a)"))


def test_coin_dominance():
    assert dominates(W, atoms("val(1,h) val(2,h)"), atoms("val(1,h) val(2,t)"))
    assert not dominates(W, atoms("val(1,t) val(2,t)"), atoms("val(1,h) val(2,t)"))
    i = atoms("val(1,t)")
    assert not dominates(W, i, i)


def test_higher_level_decides():
    p = parse_program(":~ a.[5@1] :~ b.[1@2]")
    assert dominates(p, atoms("a"), atoms("b"))
    assert compare(p, atoms("b"), atoms("a")) == "second"


def test_equally_optimal_means_identical_tables():
    p = parse_program(":~ a.[1@1] :~ b.[1@1, b] :~ c.[-1@1]")
    assert equally_optimal(p, atoms("a"), atoms("b"))
    assert equally_optimal(p, atoms("a c"), frozenset())
    assert compare(p, atoms("a"), frozenset()) == "second"


def test_zero_levels_are_omitted():
    assert score_table([WeakTuple(1, 1, ()), WeakTuple(-1, 1, (Const(1),))]) == {}


def test_ground_and_nonground_agree():
    facts = Program(tuple(Rule(a) for a in WALKS))
    g = ground(WS + facts)
    assert weak_tuples(g, WALKS) == weak_tuples(WS, WALKS)


def random_weak_program(rng):
    lines = []
    for _ in range(rng.randint(1, 4)):
        body = ", ".join(rng.sample(["a", "b", "c", "d", "not a", "not c"], rng.randint(1, 2)))
        lines.append(f":~ {body}.[{rng.randint(-2, 3)}@{rng.randint(1, 3)}, {rng.choice(['x', 'y'])}]")
    return parse_program("\n".join(lines))


def random_interp(rng):
    return atoms(" ".join(rng.sample(list("abcd"), rng.randint(0, 4))))


@given(st.integers(0, 10**6))
@settings(max_examples=300, deadline=None)
def test_dominance_is_a_strict_order(seed):
    rng = random.Random(seed)
    p = random_weak_program(rng)
    x, y, z = random_interp(rng), random_interp(rng), random_interp(rng)
    assert not dominates(p, x, x)
    assert not (dominates(p, x, y) and dominates(p, y, x))
    if dominates(p, x, y) and dominates(p, y, z):
        assert dominates(p, x, z)
    # exactly one of the three outcomes
    assert [dominates(p, x, y), dominates(p, y, x), equally_optimal(p, x, y)].count(True) == 1
