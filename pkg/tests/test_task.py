import random

import pytest
from hypothesis import given, settings, strategies as st

from ctxlearn.solver import PartialInterpretation
from ctxlearn.syntax import Program, parse_atom, parse_program, parse_rule
from ctxlearn.task import (
    CDOE, CDPI, EQUAL, CoverageChecker, Hypothesis, LearningTask, TaskError, covers_cdpi,
    direct_verdicts, is_solution, merge_contexts, respects_ordering, subtask, translate_loas,
)

from micro import all_hypotheses, random_task

SPACE = (parse_rule("go_out :- raining."), parse_rule("go_out :- not raining."))
E1 = CDPI("e1", PartialInterpretation(frozenset({parse_atom("go_out")})))
E2 = CDPI("e2", PartialInterpretation(exc=frozenset({parse_atom("go_out")})), parse_program("raining."))
GO_OUT = LearningTask(Program(), SPACE, (E1, E2))

COINS = parse_program("coin(1..2). 1 { val(C,h); val(C,t) } 1 :- coin(C).")
W = parse_program(":~ val(C,t).[1@1, C]")
C1 = CDPI("c1", context=parse_program("val(1,V) :- val(2,V)."))
C2 = CDPI("c2", context=parse_program(":- val(1,V), val(2,V)."))
O = CDOE("o", C1, C2)


def hyp(*idx, space=SPACE):
    return Hypothesis(idx, space)


def test_positive_coverage():
    assert covers_cdpi(Program(), hyp(1), E1)
    assert covers_cdpi(Program(), hyp(1), E2)
    assert not covers_cdpi(Program(), Program(), CDPI("p", PartialInterpretation(frozenset({parse_atom("p")}))))


def test_negative_coverage():
    assert covers_cdpi(Program(), hyp(0), E1, "negative")
    assert not covers_cdpi(Program(), hyp(1), E1, "negative")


def test_coin_ordering():
    assert respects_ordering(COINS, W, O, "brave")
    assert not respects_ordering(COINS, W, O, "cautious")


def test_equality_ordering():
    both_t = CDPI("t", context=parse_program("val(1,t). val(2,t)."))
    h_and_t = CDPI("ht", context=parse_program("val(1,h). val(2,t)."))
    t_and_h = CDPI("th", context=parse_program("val(1,t). val(2,h)."))
    assert respects_ordering(COINS, W, CDOE("q", h_and_t, t_and_h, EQUAL))
    assert not respects_ordering(COINS, W, CDOE("q", both_t, h_and_t, EQUAL))


def test_unsatisfiable_endpoints():
    dead = CDPI("d", context=parse_program(":- coin(1)."))
    o = CDOE("o", dead, C2)
    assert not respects_ordering(COINS, W, o, "brave")
    assert respects_ordering(COINS, W, o, "cautious")


def test_hypothesis_length():
    assert hyp(0, 1).length == 4
    assert hyp().length == 0
    with pytest.raises(IndexError):
        hyp(5)


def test_translation_of_go_out():
    tt = translate_loas(GO_OUT)
    assert tt.background == parse_program("raining :- ctx(e2). 1 { ctx(e1); ctx(e2) } 1.")
    assert [ex.e for ex in tt.positives] == [
        PartialInterpretation(frozenset({parse_atom("go_out"), parse_atom("ctx(e1)")})),
        PartialInterpretation(frozenset({parse_atom("ctx(e2)")}), frozenset({parse_atom("go_out")})),
    ]
    assert all(not ex.context.rules for ex in tt.positives)


def test_translation_maps_orderings():
    t = LearningTask(COINS, (W.rules[0],), (C1, C2), (), (O,), ())
    tt = translate_loas(t)
    (o,) = tt.brave_orderings
    assert (o.first, o.second) == tuple(tt.positives)


def test_translation_with_empty_contexts():
    t = LearningTask(Program(), SPACE, (CDPI("a"), CDPI("b")))
    tt = translate_loas(t)
    assert tt.background == parse_program("1 { ctx(a); ctx(b) } 1.")


def test_translation_without_examples_is_identity():
    t = LearningTask(COINS, SPACE)
    assert translate_loas(t) is t


def test_translation_rejects_used_ctx():
    t = LearningTask(parse_program("ctx(1)."), SPACE, (E1,))
    with pytest.raises(TaskError) as err:
        translate_loas(t)
    assert err.value.code == "reserved-predicate"


def test_merged_contexts_lose_the_solution():
    assert is_solution(GO_OUT, hyp(1))
    merged = merge_contexts(GO_OUT)
    assert not any(is_solution(merged, hyp(*h)) for h in [(), (0,), (1,), (0, 1)])


@pytest.mark.parametrize("make, code", [
    (lambda: CDPI("e", context=parse_program(":~ p.[1@1]")), "context-weak-constraint"),
    (lambda: CDPI("Bad"), "bad-id"),
    (lambda: LearningTask(positives=(CDPI("a"), CDPI("a"))), "duplicate-id"),
    (lambda: LearningTask(positives=(C1,), negatives=(C2,), brave_orderings=(O,)), "ordering-endpoint"),
    (lambda: LearningTask(positives=(C1, C2), cautious_orderings=(CDOE("o", C1, C2, EQUAL),)), "cautious-equality"),
    (lambda: CDOE("o", C1, C2, "sideways"), "bad-relation"),
])
def test_task_errors(make, code):
    with pytest.raises(TaskError) as err:
        make()
    assert err.value.code == code


def test_subtask_adds_ordering_endpoints_in_task_order():
    t = LearningTask(COINS, (W.rules[0],), (C1, C2), (), (O,), ())
    sub = subtask(t, brave=(O,))
    assert [ex.id for ex in sub.positives] == ["c1", "c2"]


def _solutions(t):
    return {h for h in all_hypotheses(t) if is_solution(t, Hypothesis(h, t.hypothesis_space))}


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_translation_preserves_solutions(seed):
    t = random_task(random.Random(seed))
    assert _solutions(t) == _solutions(translate_loas(t))


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_empty_contexts_behave_like_plain_examples(seed):
    t = random_task(random.Random(seed))
    plain = LearningTask(
        t.background, t.hypothesis_space,
        tuple(CDPI(e.id, e.e) for e in t.positives), tuple(CDPI(e.id, e.e) for e in t.negatives))
    merged = merge_contexts(plain)
    assert _solutions(plain) == _solutions(merged) == _solutions(translate_loas(plain))


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_cached_checker_matches_definitions(seed):
    t = random_task(random.Random(seed))
    for task in (t, translate_loas(t)):
        checker = CoverageChecker(task)
        for h in all_hypotheses(task):
            assert checker.verdicts(h) == direct_verdicts(task, Hypothesis(h, task.hypothesis_space))
