"""Meta-level coverage checking: one ASP program deciding coverage of every example.

The program reifies two copies of B ∪ H (``as1`` and ``as2``), represents
weak-constraint penalties as ``w(Weight, Level, terms(..), Copy)`` atoms, and
uses ``test``/``test_on`` atoms to select which example an answer set is
checking.  The level-wise comparison of the two copies needs a ``#sum``
aggregate, which the solver does not support; it is evaluated natively on
each answer set of the remaining (lower) layer, and the ordering
constraints are then applied as filters.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grounder import ground
from .solver import AnswerSet, Solver
from .syntax import (
    Atom, Choice, Const, Func, Literal, Program, Rule, Var, WEAK,
    append_body, atom_as_term, reify,
)
from .task import EQUAL, CDPI, LearningTask, Stats, _as_program, id_term

AS1, AS2 = Const("as1"), Const("as2")

DOMINATES_TEXT = """\
dom_lv(L) :- lv(L), #sum{ W: w(W,L,A,as1); -W: w(W,L,A,as2) } < 0.
non_dom_lv(L) :- lv(L), #sum{ W: w(W,L,A,as2); -W: w(W,L,A,as1) } < 0.
non_bef(L) :- lv(L), lv(L2), L < L2, non_dom_lv(L2).
dominated :- dom_lv(L), not non_bef(L)."""


class MetaError(ValueError):
    pass


def _wrap(a: Atom, copy: Const) -> Atom:
    return Atom(copy.value, (atom_as_term(a),))


def _test(ex_id) -> Atom:
    return Atom("test", (id_term(ex_id),))


def _test_on(ex_id, copy: Const) -> Atom:
    return Atom("test_on", (id_term(ex_id), copy))


def weak_rep(p: Program) -> Program:
    """``w(Weight, Level, terms(T..), Copy)`` rules for each weak constraint, per copy."""
    out = []
    for r in p.weak_constraints:
        terms = Func("terms", r.tail.terms) if r.tail.terms else Const("terms")
        for copy in (AS1, AS2):
            body = tuple(
                Literal(_wrap(l.atom, copy), l.negated) if isinstance(l, Literal) else l
                for l in r.body
            )
            out.append(Rule(Atom("w", (r.tail.weight, r.tail.level, terms, copy)), body))
    return Program(tuple(out))


def _levels(p: Program) -> Program:
    consts, variable = {}, False
    for r in p.weak_constraints:
        if isinstance(r.tail.level, Const):
            consts[r.tail.level] = None
        else:
            variable = True
    rules = [Rule(Atom("lv", (lv,))) for lv in consts]
    if variable:
        W, L, T, C = Var("W"), Var("L"), Var("T"), Var("C")
        rules.append(Rule(Atom("lv", (L,)), (Literal(Atom("w", (W, L, T, C))),)))
    return Program(tuple(rules))


def _cov_body(ex: CDPI, copy: Const, head_pred: str) -> Rule:
    body = [Literal(_test_on(ex.id, copy))]
    body += [Literal(_wrap(a, copy)) for a in sorted(ex.e.inc, key=str)]
    body += [Literal(_wrap(a, copy), True) for a in sorted(ex.e.exc, key=str)]
    head = Atom(head_pred, (copy,)) if head_pred == "cov" else Atom(head_pred)
    return Rule(head, tuple(body))


@dataclass(frozen=True)
class MetaProgram:
    """The meta encoding of a task and hypothesis, kept in named parts.

    ``shared`` holds the two reified copies of B ∪ H, their penalty atoms and
    the levels; ``blocks[id]`` holds the coverage rules and reified context of
    one CDPI; ``selection`` is the test choice and ``test_on`` rules.  The
    aggregate-based dominance layer is described by ``DOMINATES_TEXT`` and
    evaluated natively; ``filters`` lists (ordering id, kind) for the ordering
    constraints on top of it, kind being 'brave', 'cautious' or 'equal'.
    """

    shared: Program
    blocks: dict
    selection: dict
    filters: tuple
    test_ids: tuple
    endpoints: dict

    @property
    def lower(self) -> Program:
        """Every rule below the dominance layer, with the test choice."""
        rules = list(self.shared.rules)
        for b in self.blocks.values():
            rules += b.rules
        rules.append(Rule(Choice(1, tuple(_test(x) for x in self.test_ids), 1)))
        for x in self.test_ids:
            rules += self.selection[x].rules
        return Program(tuple(rules))

    def slice(self, ex_id) -> Program:
        """The rules left once ``test(ex_id)`` is fixed as the selected test.

        Rules guarded by ``test_on`` atoms of other examples can never fire
        and are left out.
        """
        rules = list(self.shared.rules)
        for e in self.endpoints[ex_id]:
            rules += self.blocks[e].rules
        rules.append(Rule(_test(ex_id)))
        rules += self.selection[ex_id].rules
        return Program(tuple(rules))

    def __str__(self):
        lines = [str(self.lower), DOMINATES_TEXT]
        for oid, kind in self.filters:
            t = _test(oid)
            if kind == "brave":
                lines.append(f":- {t}, not dominated.")
            elif kind == "cautious":
                lines.append(f":- {t}, dominated.")
            else:
                lines.append(f":- {t}, dominated.")
                lines.append(f":- {t}, dominated_rev.")
        return "\n".join(lines)


def build_meta(t: LearningTask, h) -> MetaProgram:
    examples = t.examples()
    if not examples:
        raise MetaError("task has no examples: the test choice would range over the empty set")
    bh = t.background + _as_program(h)
    for name in ("as1", "as2"):
        if name in t.symbols() or name in bh.symbols():
            raise MetaError(f"predicate name {name!r} is reserved by the meta encoding")
    shared = []
    # two copies of B ∪ H; the second only when some example is tested on it
    shared += reify(bh, "as1").rules
    use2 = Atom("use_as2")
    shared += append_body(reify(bh, "as2"), use2).rules
    shared.append(Rule(use2, (Literal(Atom("test_on", (Var("X"), AS2))),)))
    shared += weak_rep(bh).rules
    shared += _levels(bh).rules

    blocks = {}
    for ex in t.positives:
        rules = [_cov_body(ex, copy, "cov") for copy in (AS1, AS2)]
        for copy in (AS1, AS2):
            rules.append(Rule(None, (Literal(Atom("cov", (copy,)), True), Literal(_test_on(ex.id, copy)))))
        for copy in (AS1, AS2):
            rules += append_body(reify(ex.context, copy.value), _test_on(ex.id, copy)).rules
        blocks[ex.id] = Program(tuple(rules))
    for ex in t.negatives:
        rules = [_cov_body(ex, AS1, "violated")]
        rules += append_body(reify(ex.context, "as1"), _test_on(ex.id, AS1)).rules
        rules.append(Rule(None, (Literal(Atom("violated"), True), Literal(_test_on(ex.id, AS1)))))
        blocks[ex.id] = Program(tuple(rules))

    filters = []
    for o in t.brave_orderings:
        filters.append((o.id, "equal" if o.relation == EQUAL else "brave"))
    for o in t.cautious_orderings:
        filters.append((o.id, "cautious"))

    selection, endpoints = {}, {}
    for ex in t.positives + t.negatives:
        selection[ex.id] = Program((Rule(_test_on(ex.id, AS1), (Literal(_test(ex.id)),)),))
        endpoints[ex.id] = (ex.id,)
    for o in t.brave_orderings + t.cautious_orderings:
        selection[o.id] = Program((
            Rule(_test_on(o.first.id, AS1), (Literal(_test(o.id)),)),
            Rule(_test_on(o.second.id, AS2), (Literal(_test(o.id)),)),
        ))
        endpoints[o.id] = tuple(dict.fromkeys((o.first.id, o.second.id)))
    return MetaProgram(Program(tuple(shared)), blocks, selection, tuple(filters),
                       tuple(ex.id for ex in examples), endpoints)


# ------------------------------------------------------- dominance layer


def _int(t):
    if isinstance(t, Const) and isinstance(t.value, int):
        return t.value
    raise MetaError(f"non-integer weight or level {t}")


def dominance_atoms(model) -> frozenset:
    """Atoms of the dominance layer derived on top of ``model``.

    Follows the rule structure of that layer literally: per-level sums for
    ``dom_lv``/``non_dom_lv``, then ``non_bef`` and ``dominated``.  The
    reverse comparison ``dominated_rev`` (copy 2 dominating copy 1) is derived
    the same way for equality orderings.
    """
    sums = {}
    levels = set()
    for a in model:
        if a.pred == "lv" and len(a.args) == 1:
            levels.add(_int(a.args[0]))
        elif a.pred == "w" and len(a.args) == 4:
            w, lv, _, copy = a.args
            w, lv = _int(w), _int(lv)
            levels.add(lv)
            sign = 1 if copy == AS1 else -1 if copy == AS2 else 0
            sums[lv] = sums.get(lv, 0) + sign * w
    out = set()
    for direction, suffix in ((1, ""), (-1, "_rev")):
        dom = {lv for lv in levels if direction * sums.get(lv, 0) < 0}
        non_dom = {lv for lv in levels if -direction * sums.get(lv, 0) < 0}
        non_bef = {lv for lv in levels if any(l2 > lv for l2 in non_dom)}
        for lv in dom:
            out.add(Atom("dom_lv" + suffix, (Const(lv),)))
        for lv in non_dom:
            out.add(Atom("non_dom_lv" + suffix, (Const(lv),)))
        for lv in non_bef:
            out.add(Atom("non_bef" + suffix, (Const(lv),)))
        if any(lv not in non_bef for lv in dom):
            out.add(Atom("dominated" + suffix))
    return frozenset(out)


def _passes(meta: MetaProgram, model, upper) -> bool:
    dominated = Atom("dominated") in upper
    rev = Atom("dominated_rev") in upper
    for oid, kind in meta.filters:
        if _test(oid) not in model:
            continue
        if kind == "brave" and not dominated:
            return False
        if kind == "cautious" and dominated:
            return False
        if kind == "equal" and (dominated or rev):
            return False
    return True


def meta_answer_sets(meta: MetaProgram, atom_budget=None, stats: Stats = None) -> list:
    """Every answer set of the full meta program, dominance layer included."""
    g = ground(meta.lower, atom_budget)
    if stats:
        stats.record_grounding(g)
        stats.solver_calls += 1
    out = []
    for m in Solver(g).iter_models():
        upper = dominance_atoms(m)
        if _passes(meta, m, upper):
            out.append(AnswerSet(m | upper))
    return out


def test_atom_found(meta: MetaProgram, ex_id, atom_budget=None, stats: Stats = None) -> bool:
    """Whether some answer set of the meta program contains ``test(ex_id)``.

    The test atoms form a splitting set: the answer sets containing
    ``test(ex_id)`` are those of the slice for ``ex_id``.
    """
    g = ground(meta.slice(ex_id), atom_budget)
    if stats:
        stats.record_grounding(g)
        stats.solver_calls += 1
    for m in Solver(g).iter_models():
        if _passes(meta, m, dominance_atoms(m)):
            return True
    return False


def _verdict(kind: str, found: bool) -> bool:
    return found if kind in ("pos", "brave") else not found


def meta_verdicts(t: LearningTask, h, mode: str = "slice", atom_budget=None, stats: Stats = None) -> dict:
    """Example id -> covered, read off the answer sets of the meta program."""
    if not t.examples():
        return {}
    meta = build_meta(t, h)
    if mode == "full":
        found = set()
        for m in meta_answer_sets(meta, atom_budget, stats):
            for ex_id in meta.test_ids:
                if _test(ex_id) in m:
                    found.add(ex_id)
        return {ex.id: _verdict(kind, ex.id in found) for kind, ex in t.labelled_examples()}
    if mode != "slice":
        raise ValueError(f"unknown mode {mode!r}")
    return {
        ex.id: _verdict(kind, test_atom_found(meta, ex.id, atom_budget, stats))
        for kind, ex in t.labelled_examples()
    }


def first_uncovered(t: LearningTask, verdicts: dict):
    for kind, ex in t.labelled_examples():
        if not verdicts[ex.id]:
            return ex
    return None


def find_relevant_example(t: LearningTask, h, atom_budget=None, stats: Stats = None,
                          select=None, cache: dict = None):
    """The first example (E+, E-, O^b, O^c order) not covered by B ∪ H, or None.

    ``select`` may instead pick from the list of all uncovered examples.
    ``cache`` memoises verdicts across calls with different hypotheses: a
    CDPI's verdict only depends on the non-weak rules of H.
    """
    if not t.examples():
        return None
    hp = _as_program(h)
    meta = None
    strong = frozenset(r for r in hp.rules if r.kind != WEAK)
    every = frozenset(hp.rules)

    def covered(kind, ex):
        nonlocal meta
        key = (ex.id, strong if kind in ("pos", "neg") else every)
        if cache is not None and key in cache:
            return cache[key]
        if meta is None:
            meta = build_meta(t, hp)
        v = _verdict(kind, test_atom_found(meta, ex.id, atom_budget, stats))
        if cache is not None:
            cache[key] = v
        return v

    if select is None:
        for kind, ex in t.labelled_examples():
            if not covered(kind, ex):
                return ex
        return None
    uncovered = [ex for kind, ex in t.labelled_examples() if not covered(kind, ex)]
    return select(uncovered) if uncovered else None


def find_relevant_direct(t: LearningTask, h, atom_budget=None):
    from .task import example_covered

    for kind, ex in t.labelled_examples():
        if not example_covered(t, h, kind, ex, atom_budget):
            return ex
    return None
