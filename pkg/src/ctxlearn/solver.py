"""Answer-set enumeration for ground normal/choice/constraint programs.

Choice rules are normalised into pairs of normal rules over fresh complement
atoms plus a cardinality check on the chosen elements.  The search is a plain
DPLL over atoms on the Clark completion of the normalised program; every
total assignment is then checked against the least model of its reduct.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .grounder import GroundProgram
from .syntax import Atom, Choice, Literal, WEAK, atom_key

DEFAULT_MODEL_BUDGET = int(os.environ.get("CTXLEARN_MODEL_BUDGET", "1000000"))


class ModelBudgetExceeded(Exception):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"more than {budget} answer sets")


class AnswerSet(frozenset):
    """A set of ground atoms; ``str`` prints it in clingo style."""

    @property
    def atoms(self) -> frozenset:
        return frozenset(self)

    def __str__(self):
        return "{" + ", ".join(str(a) for a in sorted(self, key=atom_key)) + "}"

    def __repr__(self):
        return f"AnswerSet({str(self)})"


@dataclass(frozen=True)
class PartialInterpretation:
    inc: frozenset = frozenset()
    exc: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "inc", frozenset(self.inc))
        object.__setattr__(self, "exc", frozenset(self.exc))
        if self.inc & self.exc:
            raise ValueError("partial interpretation has atoms both included and excluded")

    def __str__(self):
        inc = ", ".join(str(a) for a in sorted(self.inc, key=atom_key))
        exc = ", ".join(str(a) for a in sorted(self.exc, key=atom_key))
        return f"<{{{inc}}}, {{{exc}}}>"


def extends(a: Iterable[Atom], e: PartialInterpretation) -> bool:
    atoms = a if isinstance(a, (set, frozenset)) else set(a)
    return e.inc <= atoms and not (e.exc & atoms)


# ----------------------------------------------------------- normalisation


@dataclass
class _Normalized:
    n_atoms: int                 # original atoms are variables 0..n_atoms-1
    n_decision: int              # original + complement atoms
    rules: list                  # (head var or -1, pos vars, neg vars, guard var or -1)
    cards: list                  # (pos vars, neg vars, guard var or -1, element vars, lo, hi)
    guard_vars: dict             # guard key -> variable


def _normalize(p: GroundProgram, guards: Mapping[int, object]) -> _Normalized:
    index = {a: i for i, a in enumerate(p.herbrand_base)}
    n = len(index)
    next_var = n
    rules, cards = [], []

    def var_of(a):
        return index[a]

    choice_rules = []
    for ri, r in enumerate(p.rules):
        if r.kind == WEAK:
            continue
        gkey = guards.get(ri) if guards else None
        pos = [var_of(a) for a in r.positive_body()]
        neg = [var_of(a) for a in r.negative_body()]
        if isinstance(r.head, Choice):
            choice_rules.append((r, pos, neg, gkey))
        else:
            head = var_of(r.head) if isinstance(r.head, Atom) else -1
            rules.append((head, pos, neg, gkey))

    for r, pos, neg, gkey in choice_rules:
        elems = [var_of(a) for a in r.head.elements]
        for h in elems:
            comp = next_var
            next_var += 1
            rules.append((h, pos, neg + [comp], gkey))
            rules.append((comp, pos, neg + [h], gkey))
        hi = len(elems) if r.head.hi is None else r.head.hi
        cards.append((pos, neg, gkey, elems, r.head.lo, hi))

    n_decision = next_var
    guard_vars = {}
    for coll in (rules, cards):
        for item in coll:
            gkey = item[3] if coll is rules else item[2]
            if gkey is not None and gkey not in guard_vars:
                guard_vars[gkey] = next_var
                next_var += 1
    rules = [(h, pos, neg, guard_vars[g] if g is not None else -1) for h, pos, neg, g in rules]
    cards = [
        (pos, neg, guard_vars[g] if g is not None else -1, elems, lo, hi)
        for pos, neg, g, elems, lo, hi in cards
    ]
    return _Normalized(n, n_decision, rules, cards, guard_vars)


def _pos(v):
    return 2 * v


def _neg(v):
    return 2 * v + 1


class Solver:
    """A ground program compiled once and solvable under many assumptions.

    ``guards`` maps ground-rule indices to hashable keys; a guarded rule only
    takes part in a solve call whose ``enabled`` set contains its key.
    """

    def __init__(self, program: GroundProgram, guards: Mapping[int, object] = None):
        self.program = program
        self.atoms = program.herbrand_base
        self.atom_index = {a: i for i, a in enumerate(self.atoms)}
        norm = _normalize(program, guards or {})
        self.norm = norm
        self.n_atoms = norm.n_atoms
        self.n_decision = norm.n_decision
        self.guard_vars = norm.guard_vars

        nvars = norm.n_decision + len(norm.guard_vars)
        bodies = {}
        clauses = []
        support = [[] for _ in range(norm.n_decision)]

        def body_var(pos, neg, guard):
            nonlocal nvars
            key = (tuple(sorted(set(pos))), tuple(sorted(set(neg))), guard)
            bv = bodies.get(key)
            if bv is not None:
                return bv
            bv = nvars
            nvars += 1
            bodies[key] = bv
            lits = [_pos(v) for v in key[0]] + [_neg(v) for v in key[1]]
            if guard >= 0:
                lits.append(_pos(guard))
            for l in lits:
                clauses.append([_neg(bv), l])
            clauses.append([_pos(bv)] + [l ^ 1 for l in lits])
            return bv

        self.reduct_rules = []
        for head, pos, neg, guard in norm.rules:
            bv = body_var(pos, neg, guard)
            if head < 0:
                clauses.append([_neg(bv)])
            else:
                clauses.append([_neg(bv), _pos(head)])
                support[head].append(bv)
            self.reduct_rules.append((head, pos, neg, guard))
        for v in range(norm.n_decision):
            clauses.append([_neg(v)] + [_pos(b) for b in support[v]])

        self.cards = []
        for pos, neg, guard, elems, lo, hi in norm.cards:
            cond = body_var(pos, neg, guard)
            self.cards.append((cond, elems, lo, hi))

        self.nvars = nvars
        self.units = []
        self.clauses = []
        self.empty_clause = False
        for c in clauses:
            c = list(dict.fromkeys(c))
            if any((l ^ 1) in c for l in c):
                continue
            if not c:
                self.empty_clause = True
            elif len(c) == 1:
                self.units.append(c[0])
            else:
                self.clauses.append(c)
        self.watches = [[] for _ in range(2 * nvars)]
        for ci, c in enumerate(self.clauses):
            self.watches[c[0]].append(ci)
            self.watches[c[1]].append(ci)
        self.card_watch = [[] for _ in range(nvars)]
        for ki, (cond, elems, lo, hi) in enumerate(self.cards):
            self.card_watch[cond].append(ki)
            for e in elems:
                self.card_watch[e].append(ki)

        # positive occurrence lists for the reduct's least-model computation
        self.pos_occ = [[] for _ in range(norm.n_decision)]
        for ri, (head, pos, neg, guard) in enumerate(self.reduct_rules):
            for v in set(pos):
                self.pos_occ[v].append(ri)
        self.tight = self._is_tight()

    # ------------------------------------------------------------ analysis

    def _is_tight(self) -> bool:
        """True when the positive dependency graph over atoms is acyclic."""
        n = self.n_decision
        succ = [[] for _ in range(n)]
        for head, pos, neg, guard in self.reduct_rules:
            if head >= 0:
                for v in pos:
                    succ[v].append(head)
        color = [0] * n
        for root in range(n):
            if color[root]:
                continue
            stack = [(root, iter(succ[root]))]
            color[root] = 1
            while stack:
                v, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[v] = 2
                    stack.pop()
                elif color[nxt] == 1:
                    return False
                elif color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(succ[nxt])))
        return True

    # -------------------------------------------------------------- search

    def iter_models(
        self,
        true: Iterable[Atom] = (),
        false: Iterable[Atom] = (),
        enabled: Iterable = None,
    ) -> Iterator[AnswerSet]:
        """Yield answer sets containing ``true`` and disjoint from ``false``.

        Models come out in lexicographic order of their characteristic
        vectors over the Herbrand base (absent before present).
        """
        if self.empty_clause:
            return
        value = [-1] * self.nvars
        trail = []
        enabled = None if enabled is None else set(enabled)

        def assign(lit):
            v = lit >> 1
            val = 1 - (lit & 1)
            cur = value[v]
            if cur == -1:
                value[v] = val
                trail.append(lit)
                return True
            return cur == val

        for a in true:
            i = self.atom_index.get(a)
            if i is None or not assign(_pos(i)):
                return
        for a in false:
            i = self.atom_index.get(a)
            if i is not None and not assign(_neg(i)):
                return
        for key, gv in self.guard_vars.items():
            on = enabled is None or key in enabled
            assign(_pos(gv) if on else _neg(gv))
        for u in self.units:
            if not assign(u):
                return

        clauses, watches, cards, card_watch = self.clauses, self.watches, self.cards, self.card_watch
        qhead = 0

        def propagate():
            nonlocal qhead
            while qhead < len(trail):
                lit = trail[qhead]
                qhead += 1
                false_lit = lit ^ 1
                wl = watches[false_lit]
                i = 0
                while i < len(wl):
                    ci = wl[i]
                    c = clauses[ci]
                    if c[0] == false_lit:
                        c[0], c[1] = c[1], c[0]
                    other = c[0]
                    ov = value[other >> 1]
                    if ov != -1 and ov == 1 - (other & 1):
                        i += 1
                        continue
                    found = False
                    for k in range(2, len(c)):
                        l = c[k]
                        lv = value[l >> 1]
                        if lv == -1 or lv == 1 - (l & 1):
                            c[1], c[k] = l, c[1]
                            watches[l].append(ci)
                            wl[i] = wl[-1]
                            wl.pop()
                            found = True
                            break
                    if found:
                        continue
                    if ov == -1:
                        value[other >> 1] = 1 - (other & 1)
                        trail.append(other)
                        i += 1
                    else:
                        return False
                for ki in card_watch[lit >> 1]:
                    if not check_card(ki):
                        return False
            return True

        def check_card(ki):
            cond, elems, lo, hi = cards[ki]
            ntrue = nundef = 0
            for e in elems:
                ev = value[e]
                if ev == 1:
                    ntrue += 1
                elif ev == -1:
                    nundef += 1
            cv = value[cond]
            violated = ntrue > hi or ntrue + nundef < lo
            if cv == 1:
                if violated:
                    return False
                if nundef:
                    if ntrue == hi:
                        for e in elems:
                            if value[e] == -1:
                                value[e] = 0
                                trail.append(_neg(e))
                    elif ntrue + nundef == lo:
                        for e in elems:
                            if value[e] == -1:
                                value[e] = 1
                                trail.append(_pos(e))
            elif cv == -1 and violated:
                value[cond] = 0
                trail.append(_neg(cond))
            return True

        for ki in range(len(cards)):
            if not check_card(ki):
                return
        if not propagate():
            return
        if not self.tight and not self._unfounded_prune(value, trail):
            return
        if not propagate():
            return

        n_dec = self.n_decision
        stack = []  # [var, trail length before decision, phase]
        nxt = 0

        def backtrack():
            nonlocal qhead, nxt
            while stack:
                entry = stack[-1]
                v, tl, phase = entry
                while len(trail) > tl:
                    value[trail.pop() >> 1] = -1
                qhead = tl
                nxt = v
                if phase == 0:
                    entry[2] = 1
                    value[v] = 1
                    trail.append(_pos(v))
                    if propagate() and (self.tight or self._unfounded_prune(value, trail)) and propagate():
                        return True
                    continue
                stack.pop()
            return False

        while True:
            while nxt < n_dec and value[nxt] != -1:
                nxt += 1
            if nxt >= n_dec:
                if self._stable(value):
                    yield AnswerSet(self.atoms[i] for i in range(self.n_atoms) if value[i] == 1)
                if not backtrack():
                    return
                continue
            v = nxt
            stack.append([v, len(trail), 0])
            value[v] = 0
            trail.append(_neg(v))
            if not (propagate() and (self.tight or self._unfounded_prune(value, trail)) and propagate()):
                if not backtrack():
                    return

    def _unfounded_prune(self, value, trail) -> bool:
        """Falsify atoms with no possible well-founded derivation.

        Returns False if such an atom is already true.
        """
        rules = self.reduct_rules
        n_dec = self.n_decision
        remaining = []
        derived = [False] * n_dec
        queue = []
        for ri, (head, pos, neg, guard) in enumerate(rules):
            if head < 0 or (guard >= 0 and value[guard] == 0):
                remaining.append(-1)
                continue
            blocked = False
            for v in neg:
                if value[v] == 1:
                    blocked = True
                    break
            if not blocked:
                for v in pos:
                    if value[v] == 0:
                        blocked = True
                        break
            if blocked:
                remaining.append(-1)
                continue
            cnt = len(set(pos))
            remaining.append(cnt)
            if cnt == 0 and not derived[head]:
                derived[head] = True
                queue.append(head)
        pos_occ = self.pos_occ
        while queue:
            v = queue.pop()
            for ri in pos_occ[v]:
                c = remaining[ri]
                if c > 0:
                    c -= 1
                    remaining[ri] = c
                    if c == 0:
                        h = rules[ri][0]
                        if not derived[h]:
                            derived[h] = True
                            queue.append(h)
        for v in range(n_dec):
            if not derived[v]:
                cur = value[v]
                if cur == 1:
                    return False
                if cur == -1:
                    value[v] = 0
                    trail.append(_neg(v))
        return True

    def _stable(self, value) -> bool:
        """Least model of the reduct equals the assignment on all atoms."""
        lm = least_model_of_reduct(self.reduct_rules, self.pos_occ, self.n_decision, value)
        for v in range(self.n_decision):
            if lm[v] != (value[v] == 1):
                return False
        return True

    def index_of(self, a: Atom):
        return self.atom_index.get(a)


def least_model_of_reduct(rules, pos_occ, n, value) -> list:
    """Least model of the reduct of normal ``rules`` w.r.t. assignment ``value``."""
    remaining = []
    lm = [False] * n
    queue = []
    for head, pos, neg, guard in rules:
        if head < 0 or (guard >= 0 and value[guard] != 1) or any(value[v] == 1 for v in neg):
            remaining.append(-1)
            continue
        cnt = len(set(pos))
        remaining.append(cnt)
        if cnt == 0 and not lm[head]:
            lm[head] = True
            queue.append(head)
    while queue:
        v = queue.pop()
        for ri in pos_occ[v]:
            c = remaining[ri]
            if c > 0:
                c -= 1
                remaining[ri] = c
                if c == 0:
                    h = rules[ri][0]
                    if not lm[h]:
                        lm[h] = True
                        queue.append(h)
    return lm


def answer_sets(p: GroundProgram, max_models: int = 0, model_budget: int = None) -> list:
    """All answer sets of ``p`` (or the first ``max_models`` when positive)."""
    budget = DEFAULT_MODEL_BUDGET if model_budget is None else model_budget
    out = []
    for m in Solver(p).iter_models():
        out.append(m)
        if max_models and len(out) >= max_models:
            break
        if len(out) > budget:
            raise ModelBudgetExceeded(budget)
    return out


def is_answer_set(p: GroundProgram, interpretation: Iterable[Atom]) -> bool:
    """Reduct-based stability test, independent of the search in ``Solver``.

    The interpretation is extended to complement atoms of normalised choice
    rules; it must satisfy every rule (including choice bounds) and coincide
    with the least model of the reduct.
    """
    interp = set(interpretation)
    base = set(p.herbrand_base)
    if not interp <= base:
        return False

    def holds(lit):
        return (lit.atom in interp) != lit.negated

    for r in p.rules:
        if r.kind == WEAK:
            continue
        body_true = all(holds(l) for l in r.body if isinstance(l, Literal))
        if not body_true:
            continue
        if r.head is None:
            return False
        if isinstance(r.head, Atom) and r.head not in interp:
            return False
        if isinstance(r.head, Choice):
            k = sum(1 for a in r.head.elements if a in interp)
            hi = len(r.head.elements) if r.head.hi is None else r.head.hi
            if not r.head.lo <= k <= hi:
                return False

    # Gelfond-Lifschitz reduct of the normalised program, complement atom
    # (i, j) standing for "element j of choice rule i is not chosen".
    extended = {("a", a) for a in interp}
    normal = []
    for ri, r in enumerate(p.rules):
        if r.kind == WEAK or (r.head is None):
            continue
        pos = [("a", a) for a in r.positive_body()]
        neg = [("a", a) for a in r.negative_body()]
        if isinstance(r.head, Choice):
            body_true = all(holds(l) for l in r.body if isinstance(l, Literal))
            for j, h in enumerate(r.head.elements):
                comp = ("c", ri, j)
                if body_true and h not in interp:
                    extended.add(comp)
                normal.append((("a", h), pos, neg + [comp]))
                normal.append((comp, pos, neg + [("a", h)]))
        else:
            normal.append((("a", r.head), pos, neg))

    reduct = [(h, pos) for h, pos, neg in normal if not any(n in extended for n in neg)]
    lm = set()
    changed = True
    while changed:
        changed = False
        for h, pos in reduct:
            if h not in lm and all(b in lm for b in pos):
                lm.add(h)
                changed = True
    return lm == extended
