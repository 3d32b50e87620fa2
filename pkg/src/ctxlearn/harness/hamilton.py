"""Hamiltonian-cycle learning tasks over small random digraphs."""

from __future__ import annotations

import itertools
import random

from ..solver import PartialInterpretation
from ..syntax import Atom, Const, Program, parse_program
from ..task import CDPI, LearningTask

# Background of the variant where graphs are encoded in the examples.
BACKGROUND_A = """\
1 { node(1..{n}) } {n}.
0 { edge(N1, N2) } 1 :- node(N1), node(N2).
"""

# The first five rules form a correct encoding (total length 12); the rest
# are plausible but wrong or redundant alternatives.
HYPOTHESIS_SPACE = """\
0 { in(X, Y) } 1 :- edge(X, Y).
reach(Y) :- in(1, Y).
reach(Y) :- reach(X), in(X, Y).
:- node(X), not reach(X).
:- in(X, Y), in(X, Z), Y != Z.
:- in(X, Y), in(Z, Y), X != Z.
reach(Y) :- reach(X), edge(X, Y).
reach(X) :- node(X).
:- not reach(1).
0 { in(X, Y) } 1 :- node(X), node(Y).
"""

TARGET_INDICES = (0, 1, 2, 3, 4)


class SeedExhausted(RuntimeError):
    pass


def is_hamiltonian(n: int, edges) -> bool:
    """Whether nodes 1..n have a directed cycle visiting each exactly once."""
    if n <= 0:
        return False
    edges = set(edges)
    if n == 1:
        return (1, 1) in edges
    for rest in itertools.permutations(range(2, n + 1)):
        order = (1,) + rest
        if all((order[i], order[(i + 1) % n]) in edges for i in range(n)):
            return True
    return False


def hypothesis_space() -> tuple:
    return parse_program(HYPOTHESIS_SPACE).rules


def random_graph(rng: random.Random, max_nodes: int, edge_prob: float = 0.5):
    n = rng.randint(1, max_nodes)
    edges = frozenset((a, b) for a in range(1, n + 1) for b in range(1, n + 1)
                      if a != b and rng.random() < edge_prob)
    return n, edges


def _node(i):
    return Atom("node", (Const(i),))


def _edge(a, b):
    return Atom("edge", (Const(a), Const(b)))


def _example(ex_id, n, edges, max_nodes, variant) -> CDPI:
    if variant == "A":
        inc = {_node(i) for i in range(1, n + 1)} | {_edge(a, b) for a, b in edges}
        all_atoms = {_node(i) for i in range(1, max_nodes + 1)} | {
            _edge(a, b) for a in range(1, max_nodes + 1) for b in range(1, max_nodes + 1)
        }
        return CDPI(ex_id, PartialInterpretation(frozenset(inc), frozenset(all_atoms - inc)))
    facts = " ".join([f"node({i})." for i in range(1, n + 1)] + [f"edge({a},{b})." for a, b in sorted(edges)])
    return CDPI(ex_id, PartialInterpretation(), parse_program(facts))


def sample_graphs(max_nodes: int, n_pos: int, n_neg: int, seed, max_attempts: int = 100000):
    """Distinct random graphs split by the permutation oracle."""
    if not 1 <= max_nodes <= 6:
        raise ValueError("max_nodes must be between 1 and 6")
    rng = random.Random(seed)
    pos, neg, seen = [], [], set()
    for _ in range(max_attempts):
        if len(pos) >= n_pos and len(neg) >= n_neg:
            break
        g = random_graph(rng, max_nodes)
        if g in seen:
            continue
        seen.add(g)
        if is_hamiltonian(*g):
            if len(pos) < n_pos:
                pos.append(g)
        elif len(neg) < n_neg:
            neg.append(g)
    if len(pos) < n_pos or len(neg) < n_neg:
        raise SeedExhausted(f"found only {len(pos)} Hamiltonian and {len(neg)} non-Hamiltonian graphs")
    return pos, neg


def gen_hamilton(max_nodes: int, n_pos: int, n_neg: int, variant: str = "A", seed=0) -> LearningTask:
    if variant not in ("A", "B"):
        raise ValueError("variant must be 'A' or 'B'")
    pos, neg = sample_graphs(max_nodes, n_pos, n_neg, seed)
    background = parse_program(BACKGROUND_A.replace("{n}", str(max_nodes))) if variant == "A" else Program()
    positives = tuple(_example(f"p{i + 1}", n, e, max_nodes, variant) for i, (n, e) in enumerate(pos))
    negatives = tuple(_example(f"n{i + 1}", n, e, max_nodes, variant) for i, (n, e) in enumerate(neg))
    return LearningTask(background, hypothesis_space(), positives, negatives)


def duplicate_examples(t: LearningTask, k: int) -> LearningTask:
    """Every positive and negative example repeated ``k`` times under fresh ids."""
    def copies(coll):
        return tuple(CDPI(f"{ex.id}d{j}" if j else ex.id, ex.e, ex.context) for ex in coll for j in range(k))

    return LearningTask(t.background, t.hypothesis_space, copies(t.positives), copies(t.negatives))
