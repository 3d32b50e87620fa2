"""Weak-constraint penalties and the dominance relation between interpretations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .grounder import GroundProgram, match_atom, subst_term
from .syntax import INT_MAX, INT_MIN, Comparison, Const, Program, Rule, WEAK


class WeakConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class WeakTuple:
    weight: int
    level: int
    terms: tuple = ()

    def __str__(self):
        return "(" + ", ".join([str(self.weight), str(self.level)] + [str(t) for t in self.terms]) + ")"


class Interpretation:
    """A set of ground atoms indexed by predicate signature for matching."""

    __slots__ = ("atoms", "by_sig")

    def __init__(self, atoms: Iterable):
        self.atoms = atoms if isinstance(atoms, frozenset) else frozenset(atoms)
        self.by_sig = {}
        for a in self.atoms:
            self.by_sig.setdefault(a.signature, []).append(a)


def _weak_rules(p) -> tuple:
    if isinstance(p, (Program, GroundProgram)):
        return tuple(r for r in p.rules if r.kind == WEAK)
    return tuple(r for r in p if r.kind == WEAK)


def _as_int(t, what, rule):
    if isinstance(t, Const) and isinstance(t.value, int):
        return t.value
    raise WeakConstraintError(f"non-integer {what} {t} in ground instance of '{rule}'")


def rule_tuples(r: Rule, interp: Interpretation) -> frozenset:
    """Tuples of the satisfied ground instances of weak constraint ``r``."""
    pos = sorted(r.positive_body(), key=lambda a: len(interp.by_sig.get(a.signature, ())))
    out = set()

    def walk(i, s):
        if i == len(pos):
            for lit in r.body:
                if isinstance(lit, Comparison):
                    c = Comparison(lit.op, subst_term(lit.lhs, s), subst_term(lit.rhs, s))
                    if not c.evaluate():
                        return
                elif lit.negated:
                    a = lit.atom
                    g = a if not a.args else type(a)(a.pred, tuple(subst_term(t, s) for t in a.args))
                    if g in interp.atoms:
                        return
            tail = r.tail
            out.add(WeakTuple(
                _as_int(subst_term(tail.weight, s), "weight", r),
                _as_int(subst_term(tail.level, s), "level", r),
                tuple(subst_term(t, s) for t in tail.terms),
            ))
            return
        pat = pos[i]
        for cand in interp.by_sig.get(pat.signature, ()):
            s2 = match_atom(pat, cand, s)
            if s2 is not None:
                walk(i + 1, s2)

    walk(0, {})
    return frozenset(out)


def weak_tuples(p, i) -> frozenset:
    """The set of (weight, level, terms) tuples that ``i`` pays under ``p``.

    ``p`` may be ground or not: weak constraints are matched directly
    against ``i``, so instances missing from a relevance grounding still count.
    """
    interp = i if isinstance(i, Interpretation) else Interpretation(i)
    out = set()
    for r in _weak_rules(p):
        out |= rule_tuples(r, interp)
    return frozenset(out)


def _checked(v):
    if not INT_MIN <= v <= INT_MAX:
        raise OverflowError(f"score {v} outside the 64-bit integer range")
    return v


def score_table(tuples: Iterable[WeakTuple]) -> dict:
    """Level -> summed weight; levels whose sum is 0 are omitted."""
    table = {}
    for t in tuples:
        table[t.level] = _checked(table.get(t.level, 0) + t.weight)
    return {lv: s for lv, s in table.items() if s != 0}


def score_at_level(p, i, level: int) -> int:
    return score_table(weak_tuples(p, i)).get(level, 0)


def compare_tables(t1: dict, t2: dict) -> int:
    """-1 if ``t1`` dominates, 1 if ``t2`` dominates, 0 if equally optimal."""
    for lv in sorted(set(t1) | set(t2), reverse=True):
        a, b = t1.get(lv, 0), t2.get(lv, 0)
        if a != b:
            return -1 if a < b else 1
    return 0


def dominates(p, i1, i2) -> bool:
    """``i1`` has a lower score than ``i2`` at the highest level where they differ."""
    return compare_tables(score_table(weak_tuples(p, i1)), score_table(weak_tuples(p, i2))) < 0


def equally_optimal(p, i1, i2) -> bool:
    return compare_tables(score_table(weak_tuples(p, i1)), score_table(weak_tuples(p, i2))) == 0


def compare(p, i1, i2) -> str:
    """'first', 'second' or 'equal' according to which side dominates."""
    c = compare_tables(score_table(weak_tuples(p, i1)), score_table(weak_tuples(p, i2)))
    return {-1: "first", 1: "second", 0: "equal"}[c]
