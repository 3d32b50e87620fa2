"""Context-dependent learning tasks, example coverage, and the context-free translation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .grounder import GroundProgram, ground
from .preference import Interpretation, compare_tables, rule_tuples, score_table
from .solver import PartialInterpretation, Solver
from .syntax import (
    Atom, Choice, Const, Program, Rule, WEAK, append_body, rule_length,
)

STRICT = "strict"
EQUAL = "equal"

_ID_RE = re.compile(r"^(?:[a-z][A-Za-z0-9_]*|-?\d+)$")


class TaskError(ValueError):
    """An ill-formed learning task; ``code`` names the violated invariant."""

    def __init__(self, code: str, msg: str):
        self.code = code
        super().__init__(f"{code}: {msg}")


def id_term(ex_id: str) -> Const:
    s = str(ex_id)
    if re.fullmatch(r"-?\d+", s):
        return Const(int(s))
    return Const(s)


@dataclass(frozen=True)
class CDPI:
    """A partial interpretation paired with a context program."""

    id: str
    e: PartialInterpretation = PartialInterpretation()
    context: Program = Program()

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        if not _ID_RE.match(self.id):
            raise TaskError("bad-id", f"example id {self.id!r} is not a constant")
        if not isinstance(self.context, Program):
            object.__setattr__(self, "context", Program(tuple(self.context)))
        if self.context.weak_constraints:
            raise TaskError("context-weak-constraint", f"context of {self.id} contains a weak constraint")


@dataclass(frozen=True)
class CDOE:
    """An ordering between two positive examples."""

    id: str
    first: CDPI
    second: CDPI
    relation: str = STRICT

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        if not _ID_RE.match(self.id):
            raise TaskError("bad-id", f"ordering id {self.id!r} is not a constant")
        if self.relation not in (STRICT, EQUAL):
            raise TaskError("bad-relation", f"unknown ordering relation {self.relation!r}")


@dataclass(frozen=True)
class LearningTask:
    background: Program = Program()
    hypothesis_space: tuple = ()
    positives: tuple = ()
    negatives: tuple = ()
    brave_orderings: tuple = ()
    cautious_orderings: tuple = ()

    def __post_init__(self):
        for name in ("hypothesis_space", "positives", "negatives", "brave_orderings", "cautious_orderings"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not isinstance(self.background, Program):
            object.__setattr__(self, "background", Program(tuple(self.background)))
        ids = [x.id for x in self.examples()]
        seen = set()
        for i in ids:
            if i in seen:
                raise TaskError("duplicate-id", f"example id {i} used twice")
            seen.add(i)
        pos = {ex.id: ex for ex in self.positives}
        for o in self.brave_orderings + self.cautious_orderings:
            for end in (o.first, o.second):
                if pos.get(end.id) != end:
                    raise TaskError("ordering-endpoint", f"ordering {o.id} refers to {end.id}, which is not a positive example")
        for o in self.cautious_orderings:
            if o.relation == EQUAL:
                raise TaskError("cautious-equality", f"equality ordering {o.id} must be brave")

    def examples(self) -> tuple:
        """Every example in the fixed order E+, E-, O^b, O^c."""
        return self.positives + self.negatives + self.brave_orderings + self.cautious_orderings

    def labelled_examples(self):
        """(kind, example) pairs in the fixed example order."""
        for kind, coll in (("pos", self.positives), ("neg", self.negatives),
                           ("brave", self.brave_orderings), ("cautious", self.cautious_orderings)):
            for ex in coll:
                yield kind, ex

    @property
    def n_examples(self) -> int:
        return len(self.examples())

    def symbols(self) -> set:
        out = self.background.symbols() | Program(self.hypothesis_space).symbols()
        for ex in self.positives + self.negatives:
            out |= ex.context.symbols()
            out |= Program(tuple(Rule(a) for a in ex.e.inc | ex.e.exc)).symbols()
        return out


@dataclass(frozen=True)
class Hypothesis:
    """A subset of the hypothesis space, by index."""

    indices: tuple
    space: tuple = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(sorted(set(self.indices))))
        object.__setattr__(self, "space", tuple(self.space))
        for i in self.indices:
            if not 0 <= i < len(self.space):
                raise IndexError(f"hypothesis index {i} outside the hypothesis space")

    @property
    def rules(self) -> tuple:
        return tuple(self.space[i] for i in self.indices)

    @property
    def program(self) -> Program:
        return Program(self.rules)

    @property
    def length(self) -> int:
        return sum(rule_length(r) for r in self.rules)

    def __str__(self):
        return "\n".join(map(str, self.rules))


def _as_program(h) -> Program:
    if isinstance(h, Hypothesis):
        return h.program
    if isinstance(h, Program):
        return h
    return Program(tuple(h))


# ----------------------------------------------------------- direct checks


def _extending_models(b: Program, h: Program, ex: CDPI, atom_budget=None, limit=0):
    g = ground(b + ex.context + h, atom_budget)
    out = []
    for m in Solver(g).iter_models(true=ex.e.inc, false=ex.e.exc):
        out.append(m)
        if limit and len(out) >= limit:
            break
    return out


def covers_cdpi(b: Program, h, ex: CDPI, polarity: str = "positive", atom_budget=None) -> bool:
    """Positive: some answer set of B ∪ C ∪ H extends e.  Negative: none does."""
    found = bool(_extending_models(b, _as_program(h), ex, atom_budget, limit=1))
    if polarity in ("positive", "pos"):
        return found
    if polarity in ("negative", "neg"):
        return not found
    raise ValueError(f"unknown polarity {polarity!r}")


def respects_ordering(b: Program, h, o: CDOE, mode: str = "brave", atom_budget=None) -> bool:
    hp = _as_program(h)
    weak = (b + hp).weak_constraints
    m1 = _extending_models(b, hp, o.first, atom_budget)
    m2 = _extending_models(b, hp, o.second, atom_budget)
    tables1 = [_table(weak, m) for m in m1]
    tables2 = [_table(weak, m) for m in m2]
    want = -1 if o.relation == STRICT else 0
    results = (compare_tables(t1, t2) == want for t1 in tables1 for t2 in tables2)
    if mode == "brave":
        return any(results)
    if mode == "cautious":
        return all(results)
    raise ValueError(f"unknown ordering mode {mode!r}")


def _table(weak, model):
    interp = Interpretation(model)
    tuples = set()
    for r in weak:
        tuples |= rule_tuples(r, interp)
    return score_table(tuples)


def example_covered(t: LearningTask, h, kind: str, ex, atom_budget=None) -> bool:
    if kind == "pos":
        return covers_cdpi(t.background, h, ex, "positive", atom_budget)
    if kind == "neg":
        return covers_cdpi(t.background, h, ex, "negative", atom_budget)
    return respects_ordering(t.background, h, ex, kind, atom_budget)


def direct_verdicts(t: LearningTask, h, atom_budget=None) -> dict:
    """Example id -> covered, computed straight from the definitions."""
    return {ex.id: example_covered(t, h, kind, ex, atom_budget) for kind, ex in t.labelled_examples()}


def is_solution(t: LearningTask, h, atom_budget=None) -> bool:
    return all(example_covered(t, h, kind, ex, atom_budget) for kind, ex in t.labelled_examples())


# ------------------------------------------------------- cached checking


class Stats:
    """Counters shared by the coverage checkers and the learner."""

    def __init__(self):
        self.solver_calls = 0
        self.groundings = 0
        self.peak_ground_atoms = 0

    def record_grounding(self, g: GroundProgram):
        self.groundings += 1
        self.peak_ground_atoms = max(self.peak_ground_atoms, len(g.herbrand_base))


class CoverageChecker:
    """Coverage tests for many hypotheses over one task.

    B ∪ C ∪ S_M is grounded once per distinct context; a hypothesis is then
    checked by enabling the ground instances of its rules.  Answer sets only
    depend on the non-weak rules of the hypothesis, so they are cached on
    that subset.
    """

    def __init__(self, task: LearningTask, atom_budget=None, stats: Stats = None):
        self.task = task
        self.atom_budget = atom_budget
        self.stats = stats or Stats()
        self.space = task.hypothesis_space
        self.nonweak = frozenset(i for i, r in enumerate(self.space) if r.kind != WEAK)
        self.bg_weak = task.background.weak_constraints
        self._solvers = {}
        self._models = {}
        self._found = {}
        self._tables = {}
        self._tuples = {}

    def solver_for(self, context: Program) -> Solver:
        s = self._solvers.get(context)
        if s is None:
            nb = len(self.task.background) + len(context)
            g = ground(self.task.background + context + Program(self.space), self.atom_budget)
            self.stats.record_grounding(g)
            guards = {gi: ri - nb for gi, ri in enumerate(g.origins) if ri >= nb}
            s = Solver(g, guards)
            self._solvers[context] = s
        return s

    def _key(self, ex: CDPI, indices) -> tuple:
        return (ex.context, ex.e, frozenset(indices) & self.nonweak)

    def models(self, ex: CDPI, indices) -> list:
        key = self._key(ex, indices)
        ms = self._models.get(key)
        if ms is None:
            s = self.solver_for(ex.context)
            self.stats.solver_calls += 1
            ms = list(s.iter_models(true=ex.e.inc, false=ex.e.exc, enabled=key[2]))
            self._models[key] = ms
            self._found[key] = bool(ms)
        return ms

    def has_model(self, ex: CDPI, indices) -> bool:
        key = self._key(ex, indices)
        found = self._found.get(key)
        if found is None:
            s = self.solver_for(ex.context)
            self.stats.solver_calls += 1
            found = next(s.iter_models(true=ex.e.inc, false=ex.e.exc, enabled=key[2]), None) is not None
            self._found[key] = found
        return found

    def _rule_tuples(self, rule_key, rule, model):
        k = (rule_key, model)
        tup = self._tuples.get(k)
        if tup is None:
            tup = rule_tuples(rule, Interpretation(model))
            self._tuples[k] = tup
        return tup

    def table(self, model, indices) -> dict:
        weak_idx = tuple(i for i in sorted(indices) if i not in self.nonweak)
        k = (model, weak_idx)
        t = self._tables.get(k)
        if t is None:
            tuples = set()
            for j, r in enumerate(self.bg_weak):
                tuples |= self._rule_tuples(("b", j), r, model)
            for i in weak_idx:
                tuples |= self._rule_tuples(("h", i), self.space[i], model)
            t = score_table(tuples)
            self._tables[k] = t
        return t

    def covered(self, kind: str, ex, indices) -> bool:
        if kind == "pos":
            return self.has_model(ex, indices)
        if kind == "neg":
            return not self.has_model(ex, indices)
        m1 = self.models(ex.first, indices)
        m2 = self.models(ex.second, indices)
        want = -1 if ex.relation == STRICT else 0
        t2 = [self.table(m, indices) for m in m2]
        results = (compare_tables(self.table(a, indices), b) == want for a in m1 for b in t2)
        return any(results) if kind == "brave" else all(results)

    def verdicts(self, indices) -> dict:
        return {ex.id: self.covered(kind, ex, indices) for kind, ex in self.task.labelled_examples()}


# -------------------------------------------------------------- translation


def translate_loas(t: LearningTask, ctx: str = "ctx") -> LearningTask:
    """Fold every context into the background, guarded by a fresh ``ctx`` atom."""
    if ctx in t.symbols():
        raise TaskError("reserved-predicate", f"predicate {ctx!r} already occurs in the task")
    cdpis = t.positives + t.negatives
    if not cdpis:
        return t
    rules = list(t.background.rules)
    choice = []
    mapped = {}
    for ex in cdpis:
        a = Atom(ctx, (id_term(ex.id),))
        rules.extend(append_body(ex.context, a).rules)
        choice.append(a)
        mapped[ex.id] = CDPI(ex.id, PartialInterpretation(ex.e.inc | {a}, ex.e.exc), Program())
    rules.append(Rule(Choice(1, tuple(choice), 1)))

    def order(o):
        return CDOE(o.id, mapped[o.first.id], mapped[o.second.id], o.relation)

    return LearningTask(
        Program(tuple(rules)),
        t.hypothesis_space,
        tuple(mapped[ex.id] for ex in t.positives),
        tuple(mapped[ex.id] for ex in t.negatives),
        tuple(order(o) for o in t.brave_orderings),
        tuple(order(o) for o in t.cautious_orderings),
    )


def merge_contexts(t: LearningTask) -> LearningTask:
    """Union every context into the background and drop the contexts.

    This is the naive alternative to the translation above; it generally
    changes the meaning of a task.
    """
    rules = list(t.background.rules)
    mapped = {}
    for ex in t.positives + t.negatives:
        rules.extend(ex.context.rules)
        mapped[ex.id] = CDPI(ex.id, ex.e, Program())

    def order(o):
        return CDOE(o.id, mapped[o.first.id], mapped[o.second.id], o.relation)

    return LearningTask(
        Program(tuple(rules)),
        t.hypothesis_space,
        tuple(mapped[ex.id] for ex in t.positives),
        tuple(mapped[ex.id] for ex in t.negatives),
        tuple(order(o) for o in t.brave_orderings),
        tuple(order(o) for o in t.cautious_orderings),
    )


def subtask(t: LearningTask, positives: Sequence = (), negatives: Sequence = (),
            brave: Sequence = (), cautious: Sequence = ()) -> LearningTask:
    """Same background and space, restricted examples.

    Ordering endpoints are added to the positives when missing.
    """
    pos = list(positives)
    have = {ex.id for ex in pos}
    for o in list(brave) + list(cautious):
        for end in (o.first, o.second):
            if end.id not in have:
                pos.append(end)
                have.add(end.id)
    order = {ex.id: i for i, ex in enumerate(t.positives)}
    pos.sort(key=lambda ex: order.get(ex.id, len(order)))
    return LearningTask(t.background, t.hypothesis_space, tuple(pos), tuple(negatives),
                        tuple(brave), tuple(cautious))
