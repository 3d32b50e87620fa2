import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ctxlearn.harness.hamilton import (
    TARGET_INDICES, SeedExhausted, duplicate_examples, gen_hamilton, hypothesis_space, is_hamiltonian,
)
from ctxlearn.syntax import rule_length
from ctxlearn.task import Hypothesis, covers_cdpi


def cycle_free_oracle(n, edges):
    """Independent check: depth-first search over simple paths from node 1."""
    edges = set(edges)

    def walk(path):
        if len(path) == n:
            return (path[-1], 1) in edges
        return any(walk(path + [v]) for v in range(1, n + 1) if v not in path and (path[-1], v) in edges)

    return n >= 1 and walk([1])


def test_small_cases():
    assert is_hamiltonian(3, {(1, 2), (2, 3), (3, 1)})
    assert not is_hamiltonian(3, {(1, 2), (2, 3)})
    assert is_hamiltonian(1, {(1, 1)}) and not is_hamiltonian(1, set())


def test_three_node_count():
    pairs = [(a, b) for a in range(1, 4) for b in range(1, 4) if a != b]
    count = sum(is_hamiltonian(3, set(c)) for r in range(7) for c in itertools.combinations(pairs, r))
    assert count == 15


@given(st.integers(1, 5), st.sets(st.tuples(st.integers(1, 5), st.integers(1, 5))))
@settings(max_examples=200, deadline=None)
def test_oracle_agreement(n, edges):
    edges = {(a, b) for a, b in edges if a <= n and b <= n}
    assert is_hamiltonian(n, edges) == cycle_free_oracle(n, edges)


def test_space_is_curated():
    space = hypothesis_space()
    assert len(space) <= 15
    assert sum(rule_length(space[i]) for i in TARGET_INDICES) == 12


@pytest.mark.parametrize("variant", ["A", "B"])
def test_labels_and_target(variant):
    t = gen_hamilton(4, 6, 6, variant, seed=3)
    assert len(t.positives) == 6 and len(t.negatives) == 6
    target = Hypothesis(TARGET_INDICES, t.hypothesis_space)
    for ex in t.positives:
        assert covers_cdpi(t.background, target, ex, "positive")
    for ex in t.negatives:
        assert covers_cdpi(t.background, target, ex, "negative")


def test_variant_b_uses_contexts():
    t = gen_hamilton(3, 2, 2, "B", seed=0)
    assert not t.background.rules
    assert all(ex.context.rules for ex in t.positives)


def test_labels_match_oracle():
    from ctxlearn.harness.hamilton import sample_graphs
    pos, neg = sample_graphs(4, 10, 10, seed=1)
    assert all(is_hamiltonian(*g) for g in pos) and not any(is_hamiltonian(*g) for g in neg)
    assert len(set(pos + neg)) == 20


def test_seed_exhaustion():
    with pytest.raises(SeedExhausted):
        gen_hamilton(2, 10, 1, "A", seed=0)


def test_deterministic():
    assert gen_hamilton(4, 3, 3, "A", seed=5) == gen_hamilton(4, 3, 3, "A", seed=5)


def test_duplicates():
    t = gen_hamilton(3, 2, 2, "A", seed=0)
    d = duplicate_examples(t, 3)
    assert len(d.positives) == 6 and len({ex.id for ex in d.examples()}) == 12
