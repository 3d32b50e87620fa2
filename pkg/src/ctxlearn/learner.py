"""Optimal hypothesis search: an exhaustive batch learner and the iterative relevant-example loop."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .meta import find_relevant_example
from .syntax import rule_length
from .task import (
    CoverageChecker, Hypothesis, LearningTask, Stats, subtask, translate_loas,
)


class LearnTimeout(Exception):
    pass


@dataclass
class TraceRecord:
    iteration: int
    example_id: str
    hypothesis: tuple
    length: Optional[int]


@dataclass
class RelevantSet:
    positives: list = field(default_factory=list)
    negatives: list = field(default_factory=list)
    brave_orderings: list = field(default_factory=list)
    cautious_orderings: list = field(default_factory=list)

    def __len__(self):
        return len(self.positives) + len(self.negatives) + len(self.brave_orderings) + len(self.cautious_orderings)

    def ids(self) -> set:
        return {x.id for coll in (self.positives, self.negatives, self.brave_orderings, self.cautious_orderings)
                for x in coll}

    def add(self, kind: str, ex):
        if ex.id in self.ids():
            raise AssertionError(f"example {ex.id} is already relevant")
        {"pos": self.positives, "neg": self.negatives,
         "brave": self.brave_orderings, "cautious": self.cautious_orderings}[kind].append(ex)


@dataclass
class LearnStats:
    iterations: int = 0
    relevant_size: int = 0
    solver_calls: int = 0
    hypotheses_checked: int = 0
    peak_ground_atoms: int = 0
    wall_time: float = 0.0


@dataclass
class LearnResult:
    hypothesis: Optional[Hypothesis]
    stats: LearnStats
    trace: list = field(default_factory=list)

    @property
    def satisfiable(self) -> bool:
        return self.hypothesis is not None

    @property
    def outcome(self) -> str:
        return "hypothesis" if self.satisfiable else "unsatisfiable"


class _Deadline:
    def __init__(self, timeout):
        self.end = None if timeout is None else time.monotonic() + timeout

    def check(self):
        if self.end is not None and time.monotonic() > self.end:
            raise LearnTimeout("learning timed out")


def subsets_of_length(lengths, n: int) -> Iterator[tuple]:
    """Index subsets whose lengths sum to ``n``, in lexicographic order."""
    k = len(lengths)

    def rec(start, remaining, prefix):
        if remaining == 0:
            yield tuple(prefix)
            return
        for i in range(start, k):
            if 0 < lengths[i] <= remaining:
                prefix.append(i)
                yield from rec(i + 1, remaining - lengths[i], prefix)
                prefix.pop()

    yield from rec(0, n, [])


def _kind_of(t: LearningTask, ex) -> str:
    for kind, x in t.labelled_examples():
        if x.id == ex.id:
            return kind
    raise KeyError(ex.id)


def learn_batch(t: LearningTask, translate: bool = True, timeout: float = None,
                atom_budget=None, _stats: Stats = None, _deadline: _Deadline = None) -> LearnResult:
    """Shortest hypothesis covering every example, by iterative deepening on length.

    Rules of length 0 never help (they cannot occur), so each candidate is a
    set of positive-length rules; among equal-length solutions the
    lexicographically smallest index tuple wins.
    """
    start = time.monotonic()
    stats = _stats or Stats()
    deadline = _deadline or _Deadline(timeout)
    task = translate_loas(t) if translate and (t.positives or t.negatives) else t
    checker = CoverageChecker(task, atom_budget, stats)
    examples = list(task.labelled_examples())
    lengths = [rule_length(r) for r in task.hypothesis_space]
    checked = 0
    found = None
    for n in range(0, sum(lengths) + 1):
        for subset in subsets_of_length(lengths, n):
            deadline.check()
            checked += 1
            ok = True
            for pos, (kind, ex) in enumerate(examples):
                if not checker.covered(kind, ex, subset):
                    # failing examples tend to fail again: check them first next time
                    examples.insert(0, examples.pop(pos))
                    ok = False
                    break
            if ok:
                found = Hypothesis(subset, task.hypothesis_space)
                break
        if found is not None:
            break
    ls = LearnStats(
        iterations=0,
        relevant_size=task.n_examples,
        solver_calls=stats.solver_calls,
        hypotheses_checked=checked,
        peak_ground_atoms=stats.peak_ground_atoms,
        wall_time=time.monotonic() - start,
    )
    return LearnResult(found, ls)


def learn_iterative(t: LearningTask, timeout: float = None, atom_budget=None,
                    select: Callable = None, pretranslate: bool = False) -> LearnResult:
    """Alternate between finding an uncovered example and relearning on the relevant ones.

    With ``pretranslate`` the whole task is translated to a context-free one
    first, so every inner search carries all contexts in its background.
    """
    start = time.monotonic()
    deadline = _Deadline(timeout)
    stats = Stats()
    if pretranslate and (t.positives or t.negatives):
        t = translate_loas(t)
    relevant = RelevantSet()
    hyp = Hypothesis((), t.hypothesis_space)
    trace = []
    checked = 0
    iteration = 0
    verdicts = {}
    while True:
        deadline.check()
        ex = find_relevant_example(t, hyp, atom_budget, stats, select, cache=verdicts)
        if ex is None:
            break
        iteration += 1
        relevant.add(_kind_of(t, ex), ex)
        inner = subtask(t, relevant.positives, relevant.negatives,
                        relevant.brave_orderings, relevant.cautious_orderings)
        res = learn_batch(inner, translate=not pretranslate, atom_budget=atom_budget,
                          _stats=stats, _deadline=deadline)
        checked += res.stats.hypotheses_checked
        if res.hypothesis is None:
            trace.append(TraceRecord(iteration, ex.id, None, None))
            hyp = None
            break
        hyp = Hypothesis(res.hypothesis.indices, t.hypothesis_space)
        trace.append(TraceRecord(iteration, ex.id, hyp.indices, hyp.length))
    ls = LearnStats(
        iterations=iteration,
        relevant_size=len(relevant),
        solver_calls=stats.solver_calls,
        hypotheses_checked=checked,
        peak_ground_atoms=stats.peak_ground_atoms,
        wall_time=time.monotonic() - start,
    )
    return LearnResult(hyp, ls, trace)


def learn_iterative_pretranslated(t: LearningTask, timeout: float = None, atom_budget=None,
                                  select: Callable = None) -> LearnResult:
    return learn_iterative(t, timeout, atom_budget, select, pretranslate=True)


MODES = {
    "batch": learn_batch,
    "iterative": learn_iterative,
    "iterative_pt": learn_iterative_pretranslated,
}


def learn(t: LearningTask, mode: str = "iterative", timeout: float = None, atom_budget=None) -> LearnResult:
    if mode not in MODES:
        raise ValueError(f"unknown learner mode {mode!r}")
    return MODES[mode](t, timeout=timeout, atom_budget=atom_budget)
