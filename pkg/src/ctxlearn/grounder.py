"""Relevance-based instantiation of non-ground programs.

Only rule instances whose positive body atoms are potentially derivable are
produced.  Comparisons are evaluated away, ranges are expanded, and negative
literals over atoms that can never be derived are dropped.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .syntax import (
    Atom, Choice, Comparison, Const, Func, Literal, Program, Range, Rule, Var,
    WeakTail, has_range, unsafe_vars,
)

DEFAULT_ATOM_BUDGET = int(os.environ.get("CTXLEARN_ATOM_BUDGET", "100000"))


class GroundingError(Exception):
    pass


class BudgetExceeded(GroundingError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"ground atom budget of {budget} exceeded")


class UnsafeGroundingError(GroundingError):
    pass


@dataclass(frozen=True)
class GroundProgram:
    """Ground rules plus the Herbrand base they range over.

    ``origins[i]`` is the index (in the input program) of the rule that
    ground rule ``i`` instantiates.
    """

    rules: tuple
    herbrand_base: tuple
    origins: tuple = ()

    @property
    def atoms(self) -> frozenset:
        return frozenset(self.herbrand_base)

    def __str__(self):
        return "\n".join(map(str, self.rules))


# ------------------------------------------------------------ substitution


def subst_term(t, s):
    if isinstance(t, Var):
        return s[t.name]
    if isinstance(t, Func):
        return Func(t.name, tuple(subst_term(a, s) for a in t.args))
    return t


def subst_atom(a: Atom, s) -> Atom:
    if not a.args:
        return a
    return Atom(a.pred, tuple(subst_term(t, s) for t in a.args))


def match_term(pat, t, s):
    """Extend substitution ``s`` so that ``pat`` matches ground ``t``; None on failure."""
    if isinstance(pat, Var):
        bound = s.get(pat.name)
        if bound is None:
            s = dict(s)
            s[pat.name] = t
            return s
        return s if bound == t else None
    if isinstance(pat, Const):
        return s if pat == t else None
    if isinstance(pat, Func):
        if not isinstance(t, Func) or t.name != pat.name or len(t.args) != len(pat.args):
            return None
        for p_arg, t_arg in zip(pat.args, t.args):
            s = match_term(p_arg, t_arg, s)
            if s is None:
                return None
        return s
    return None


def match_atom(pat: Atom, a: Atom, s):
    if pat.pred != a.pred or len(pat.args) != len(a.args):
        return None
    for p_arg, t_arg in zip(pat.args, a.args):
        s = match_term(p_arg, t_arg, s)
        if s is None:
            return None
    return s


def _expand_term(t) -> list:
    if isinstance(t, Range):
        return [Const(v) for v in range(t.lo, t.hi + 1)]
    if isinstance(t, Func) and any(isinstance(a, (Range, Func)) for a in t.args):
        return [Func(t.name, combo) for combo in itertools.product(*map(_expand_term, t.args))]
    return [t]


def expand_ranges(a: Atom) -> list:
    """All atoms denoted by ``a`` once its range terms (at any depth) are unfolded."""
    if not any(isinstance(t, (Range, Func)) for t in a.args):
        return [a]
    return [Atom(a.pred, combo) for combo in itertools.product(*map(_expand_term, a.args))]


def _comparisons_hold(body, s) -> bool:
    for lit in body:
        if isinstance(lit, Comparison):
            c = Comparison(lit.op, subst_term(lit.lhs, s), subst_term(lit.rhs, s))
            if not c.evaluate():
                return False
    return True


def _top(t):
    """Outermost shape of a term, or None for a variable."""
    if isinstance(t, Const):
        return t
    if isinstance(t, Func):
        return (t.name, len(t.args))
    return None


def _paths(args):
    """(position, shape) pairs for arguments and their direct subterms."""
    for i, t in enumerate(args):
        top = _top(t)
        if top is None:
            continue
        yield (i,), top
        if isinstance(t, Func):
            for j, u in enumerate(t.args):
                sub = _top(u)
                if sub is not None:
                    yield (i, j), sub


class _AtomIndex:
    """Possible atoms in discovery order, indexed by the shapes of their arguments."""

    def __init__(self):
        self.ids = {}
        self.by_sig = {}
        self.by_path = {}

    def add(self, a: Atom) -> bool:
        if a in self.ids:
            return False
        self.ids[a] = len(self.ids)
        sig = a.signature
        self.by_sig.setdefault(sig, []).append(a)
        for path, top in _paths(a.args):
            self.by_path.setdefault((sig, path, top), []).append(a)
        return True

    def candidates(self, bound: Atom):
        """Smallest bucket of atoms that may match the partially bound ``bound``."""
        sig = bound.signature
        best = self.by_sig.get(sig, ())
        for path, top in _paths(bound.args):
            b = self.by_path.get((sig, path, top), ())
            if len(b) < len(best):
                best = b
                if not best:
                    break
        return best


def _partial(t, s):
    if isinstance(t, Var):
        return s.get(t.name, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(_partial(a, s) for a in t.args))
    return t


def _join(plan, k, s, index, old_n, new_n):
    """Substitutions extending ``s`` that match positive atoms ``plan[k:]``.

    Each plan entry is (pattern, mode): 'all' matches any possible atom,
    'old' only atoms discovered before ``old_n`` and 'delta' only those
    discovered in ``[old_n, new_n)``.
    """
    if k == len(plan):
        yield s
        return
    pat, mode = plan[k]
    lo, hi = {"all": (0, None), "old": (0, old_n), "delta": (old_n, new_n)}[mode]
    bound = Atom(pat.pred, tuple(_partial(t, s) for t in pat.args)) if pat.args else pat
    ids = index.ids
    if bound.is_ground():
        i = ids.get(bound)
        if i is not None and i >= lo and (hi is None or i < hi):
            yield from _join(plan, k + 1, s, index, old_n, new_n)
        return
    for cand in index.candidates(bound):
        if lo or hi is not None:
            i = ids[cand]
            if i < lo or (hi is not None and i >= hi):
                continue
        s2 = match_atom(pat, cand, s)
        if s2 is not None:
            yield from _join(plan, k + 1, s2, index, old_n, new_n)


def _order_positive(pos):
    """Put atoms with fewer variables first; a cheap join heuristic."""
    return sorted(pos, key=lambda a: len(set(a.vars())))


_INFO = "_ground_info"


def _rule_info(r: Rule):
    """Per-rule static data, cached on the (immutable) rule object."""
    info = r.__dict__.get(_INFO)
    if info is None:
        bad = unsafe_vars(r)
        if bad:
            raise UnsafeGroundingError(f"unsafe variable(s) {', '.join(sorted(bad))} in '{r}'")
        ranged = isinstance(r.head, Atom) and any(has_range(t) for t in r.head.args)
        info = (ranged, _order_positive(r.positive_body()))
        object.__setattr__(r, _INFO, info)
    return info


def _expand_range_heads(rules):
    out = []
    for ri, r in enumerate(rules):
        if _rule_info(r)[0]:
            out.extend((ri, Rule(h, r.body, r.tail)) for h in expand_ranges(r.head))
        else:
            out.append((ri, r))
    return out


def ground(p: Program, atom_budget: int = None) -> GroundProgram:
    """Instantiate ``p`` over its potentially derivable atoms."""
    budget = DEFAULT_ATOM_BUDGET if atom_budget is None else atom_budget
    if budget <= 0:
        raise ValueError("atom_budget must be positive")
    rules = _expand_range_heads(p.rules)
    positives = [_rule_info(r)[1] for _, r in rules]
    index = _AtomIndex()
    instances = {}  # (position in `rules`, substitution) -> bool, discovery order

    def fire(k, s):
        key = (k, tuple(sorted(s.items(), key=lambda kv: kv[0])))
        if key in instances:
            return
        r = rules[k][1]
        ok = _comparisons_hold(r.body, s)
        instances[key] = ok
        if ok:
            for h in r.head_atoms():
                for g in expand_ranges(subst_atom(h, s)):
                    if index.add(g) and len(index.ids) > budget:
                        raise BudgetExceeded(budget)

    # first round over everything, then semi-naive rounds driven by new atoms
    for k, pos in enumerate(positives):
        for s in _join([(a, "all") for a in pos], 0, {}, index, 0, 0):
            fire(k, s)
    by_first = {}
    for k, pos in enumerate(positives):
        for i, pat in enumerate(pos):
            by_first.setdefault(pat.signature, []).append((k, i))
    old_n = 0
    while len(index.ids) > old_n:
        new_n = len(index.ids)
        sigs = {a.signature for a in itertools.islice(index.ids, old_n, new_n)}
        for sig in sigs:
            for k, i in by_first.get(sig, ()):
                pos = positives[k]
                plan = [(pos[i], "delta")]
                plan += [(other, "old" if j < i else "all") for j, other in enumerate(pos) if j != i]
                for s in _join(plan, 0, {}, index, old_n, new_n):
                    fire(k, s)
        old_n = new_n

    possible = index.ids
    by_rule = {}
    for (k, skey), ok in instances.items():
        if ok:
            by_rule.setdefault(k, []).append(dict(skey))
    out_rules, origins, seen = [], [], set()
    for k in range(len(rules)):
        ri, r = rules[k]
        for s in by_rule.get(k, ()):
            g = _instantiate(r, s, possible)
            if (ri, g) in seen:
                continue
            seen.add((ri, g))
            out_rules.append(g)
            origins.append(ri)

    base = dict.fromkeys(possible)
    for g in out_rules:
        for a in g.atoms():
            if a not in base:
                base[a] = None
                if len(base) > budget:
                    raise BudgetExceeded(budget)
    return GroundProgram(tuple(out_rules), tuple(base), tuple(origins))


def _instantiate(r: Rule, s, possible) -> Rule:
    body = []
    for lit in r.body:
        if isinstance(lit, Comparison):
            continue
        a = subst_atom(lit.atom, s)
        if lit.negated and a not in possible:
            continue
        body.append(Literal(a, lit.negated))
    tail = None
    if r.tail is not None:
        tail = WeakTail(
            subst_term(r.tail.weight, s),
            subst_term(r.tail.level, s),
            tuple(subst_term(t, s) for t in r.tail.terms),
        )
    if isinstance(r.head, Choice):
        elems = {}
        for e in r.head.elements:
            for g in expand_ranges(subst_atom(e, s)):
                elems[g] = None
        head = Choice(r.head.lo, tuple(elems), r.head.hi)
    elif isinstance(r.head, Atom):
        head = subst_atom(r.head, s)
    else:
        head = None
    return Rule(head, tuple(body), tail)
