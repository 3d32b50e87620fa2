import random

import pytest
from hypothesis import given, settings, strategies as st

from ctxlearn import meta
from ctxlearn.grounder import ground
from ctxlearn.preference import dominates
from ctxlearn.solver import answer_sets
from ctxlearn.syntax import Atom, Program, Rule, parse_atom, parse_program, parse_rule
from ctxlearn.task import CDOE, CDPI, Hypothesis, LearningTask, Stats, direct_verdicts, translate_loas

from micro import all_hypotheses, random_task
from test_task import C1, C2, COINS, GO_OUT, O, SPACE, W


def coin_task(cautious=False):
    return LearningTask(COINS, W.rules, (C1, C2), (), () if cautious else (O,), (O,) if cautious else ())


def test_single_example_gives_single_choice_element():
    t = LearningTask(Program(), SPACE, (GO_OUT.positives[0],))
    m = meta.build_meta(t, Hypothesis((), SPACE))
    (choice,) = [r for r in m.lower.rules if r.kind == "choice" and r.head.elements[0].pred == "test"]
    assert len(choice.head.elements) == 1


def test_coin_ordering_has_a_test_answer_set():
    t = coin_task()
    m = meta.build_meta(t, Hypothesis((0,), t.hypothesis_space))
    models = meta.meta_answer_sets(m)
    assert any(parse_atom("test(o)") in a for a in models)
    assert meta.meta_verdicts(t, Hypothesis((0,), t.hypothesis_space)) == {"c1": True, "c2": True, "o": True}


def test_coin_cautious_ordering_not_respected():
    t = coin_task(cautious=True)
    assert meta.meta_verdicts(t, Hypothesis((0,), t.hypothesis_space))["o"] is False


def test_no_examples():
    t = LearningTask(Program(), SPACE)
    with pytest.raises(meta.MetaError):
        meta.build_meta(t, Hypothesis((), SPACE))
    assert meta.find_relevant_example(t, Hypothesis((), SPACE)) is None


def test_go_out_relevant_examples():
    assert meta.find_relevant_example(GO_OUT, Hypothesis((1,), SPACE)) is None
    assert meta.find_relevant_example(GO_OUT, Hypothesis((), SPACE)).id == "e1"
    assert meta.find_relevant_direct(GO_OUT, Hypothesis((), SPACE)).id == "e1"
    assert meta.find_relevant_direct(GO_OUT, Hypothesis((1,), SPACE)) is None


def test_reserved_copy_names():
    t = LearningTask(parse_program("as1(x)."), SPACE, GO_OUT.positives)
    with pytest.raises(meta.MetaError):
        meta.build_meta(t, Hypothesis((), SPACE))


def test_printed_program_shows_every_layer():
    text = str(meta.build_meta(coin_task(), Hypothesis((0,), W.rules)))
    for needle in ("as1(", "w(1,1,terms(C),as1)", "lv(1).", "dominated :- dom_lv(L)", "cov(as2)",
                   ":- test(o), not dominated."):
        assert needle in text


def test_selection_strategy():
    last = meta.find_relevant_example(GO_OUT, Hypothesis((0,), SPACE), select=lambda xs: xs[-1])
    assert last.id == "e2"


def test_verdict_cache_is_used():
    cache, stats = {}, Stats()
    h = Hypothesis((), SPACE)
    meta.find_relevant_example(GO_OUT, h, stats=stats, cache=cache)
    calls = stats.solver_calls
    meta.find_relevant_example(GO_OUT, h, stats=stats, cache=cache)
    assert stats.solver_calls == calls


@given(st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_meta_and_direct_verdicts_agree(seed):
    t = random_task(random.Random(seed))
    for h in all_hypotheses(t):
        hyp = Hypothesis(h, t.hypothesis_space)
        direct = direct_verdicts(t, hyp)
        assert meta.meta_verdicts(t, hyp) == direct
        first = meta.find_relevant_example(t, hyp)
        assert (first and first.id) == (meta.find_relevant_direct(t, hyp) and meta.find_relevant_direct(t, hyp).id)


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_full_program_matches_slices_and_has_one_test_atom(seed):
    t = random_task(random.Random(seed), max_space=3)
    for h in all_hypotheses(t):
        hyp = Hypothesis(h, t.hypothesis_space)
        m = meta.build_meta(t, hyp)
        for a in meta.meta_answer_sets(m):
            assert sum(1 for x in a if x.pred == "test") == 1
        assert meta.meta_verdicts(t, hyp, mode="full") == meta.meta_verdicts(t, hyp)


def test_translated_task_agrees_too():
    t = translate_loas(coin_task())
    hyp = Hypothesis((0,), t.hypothesis_space)
    assert meta.meta_verdicts(t, hyp) == direct_verdicts(t, hyp)


def dominance_layer_agrees(rng: random.Random) -> bool:
    """The reified penalty atoms plus the dominance layer decide dominance like the direct check."""
    vocab = ["a", "b", "c", "d", "n(1)", "n(2)"]
    lines = []
    for _ in range(rng.randint(1, 4)):
        if rng.random() < 0.3:
            lines.append(f":~ n(X).[{rng.randint(-2, 3)}@{rng.randint(1, 3)}, X]")
        else:
            body = ", ".join(rng.sample(["a", "b", "c", "d", "not a", "not d"], rng.randint(1, 2)))
            lines.append(f":~ {body}.[{rng.randint(-2, 3)}@{rng.randint(1, 3)}, {rng.choice(['x', 'y'])}]")
    p = parse_program("\n".join(lines))
    i1 = frozenset(parse_atom(a) for a in rng.sample(vocab, rng.randint(0, 6)))
    i2 = frozenset(parse_atom(a) for a in rng.sample(vocab, rng.randint(0, 6)))
    facts = [Rule(Atom("as1", (meta.atom_as_term(a),))) for a in i1]
    facts += [Rule(Atom("as2", (meta.atom_as_term(a),))) for a in i2]
    prog = Program(tuple(facts)) + meta.weak_rep(p) + meta._levels(p)
    (model,) = answer_sets(ground(prog))
    upper = meta.dominance_atoms(model)
    return (Atom("dominated") in upper) == dominates(p, i1, i2) and \
        (Atom("dominated_rev") in upper) == dominates(p, i2, i1)


@given(st.integers(0, 10**6))
@settings(max_examples=200, deadline=None)
def test_dominance_layer_matches_direct_dominance(seed):
    assert dominance_layer_agrees(random.Random(seed))
