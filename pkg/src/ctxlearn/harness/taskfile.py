"""Reading and writing learning tasks in a small directive-based text format.

    #background { rules }
    #hypothesis { rules }
    #pos(id, {inc atoms}, {exc atoms}, { context rules }).
    #neg(id, {inc atoms}, {exc atoms}, { context rules }).
    #brave_ordering(id1, id2).          % or (ordering_id, id1, id2)
    #brave_equality(id1, id2).
    #cautious_ordering(id1, id2).

The context argument of #pos/#neg may be omitted; the trailing period after
a directive is optional.
"""

from __future__ import annotations

from pathlib import Path

from ..solver import PartialInterpretation
from ..syntax import ASPSyntaxError, Parser, Program, atom_key, check_arities
from ..task import CDOE, CDPI, EQUAL, STRICT, LearningTask, TaskError

ORDERING_DIRECTIVES = {
    "#brave_ordering": ("brave", STRICT),
    "#brave_equality": ("brave", EQUAL),
    "#cautious_ordering": ("cautious", STRICT),
}


class _TaskParser(Parser):
    def block(self) -> list:
        self.expect("{")
        rules = self.parse_rules(stop="}")
        self.expect("}")
        return rules

    def atom_set(self) -> list:
        self.expect("{")
        atoms = []
        if not self.at("}"):
            atoms.append(self.parse_atom())
            while self.at(",") or self.at(";"):
                self.next()
                atoms.append(self.parse_atom())
        self.expect("}")
        for a in atoms:
            if not a.is_ground():
                self.error(f"example atom {a} is not ground")
        return atoms

    def ident(self) -> str:
        t = self.peek()
        if t.kind == "ident" or t.kind == "num":
            self.next()
            return t.text
        self.error(f"expected an identifier, found {t.text or 'end of input'!r}")

    def end_directive(self):
        if self.at("."):
            self.next()


def parse_task(text: str) -> LearningTask:
    p = _TaskParser(text)
    background, space = [], []
    examples = {"pos": [], "neg": []}
    orderings = []  # (mode, relation, oid or None, id1, id2, token)
    while p.peek().kind != "eof":
        t = p.peek()
        if t.kind != "directive":
            p.error(f"expected a directive, found {t.text!r}")
        p.next()
        d = t.text
        if d == "#background":
            background += p.block()
        elif d == "#hypothesis":
            space += p.block()
        elif d in ("#pos", "#neg"):
            p.expect("(")
            ex_id = p.ident()
            p.expect(",")
            inc = p.atom_set()
            p.expect(",")
            exc = p.atom_set()
            context = []
            if p.at(","):
                p.next()
                context = p.block()
            p.expect(")")
            p.end_directive()
            if set(inc) & set(exc):
                raise ASPSyntaxError(f"example {ex_id} includes and excludes the same atom", t.line, t.col)
            examples[d[1:]].append(
                CDPI(ex_id, PartialInterpretation(frozenset(inc), frozenset(exc)), Program(tuple(context)))
            )
        elif d in ORDERING_DIRECTIVES:
            p.expect("(")
            ids = [p.ident()]
            while p.at(","):
                p.next()
                ids.append(p.ident())
            p.expect(")")
            p.end_directive()
            if len(ids) not in (2, 3):
                raise ASPSyntaxError(f"{d} takes two or three arguments", t.line, t.col)
            oid = ids[0] if len(ids) == 3 else None
            mode, relation = ORDERING_DIRECTIVES[d]
            orderings.append((mode, relation, oid, ids[-2], ids[-1]))
        else:
            raise ASPSyntaxError(f"unknown directive {d}", t.line, t.col)

    arities = check_arities(background + space)
    for ex in examples["pos"] + examples["neg"]:
        check_arities(ex.context.rules, arities)

    positives = {ex.id: ex for ex in examples["pos"]}
    used = {ex.id for ex in examples["pos"] + examples["neg"]} | {o[2] for o in orderings if o[2]}
    brave, cautious = [], []
    counter = 0
    for mode, relation, oid, a, b in orderings:
        for end in (a, b):
            if end not in positives:
                raise TaskError("ordering-endpoint", f"ordering refers to {end}, which is not a positive example")
        if oid is None:
            counter += 1
            while f"o{counter}" in used:
                counter += 1
            oid = f"o{counter}"
            used.add(oid)
        o = CDOE(oid, positives[a], positives[b], relation)
        (brave if mode == "brave" else cautious).append(o)
    return LearningTask(Program(tuple(background)), tuple(space), tuple(examples["pos"]),
                        tuple(examples["neg"]), tuple(brave), tuple(cautious))


def load_task(path) -> LearningTask:
    return parse_task(Path(path).read_text(encoding="utf-8"))


def _atoms(atoms) -> str:
    return "{" + ", ".join(str(a) for a in sorted(atoms, key=atom_key)) + "}"


def _block(rules, indent="  ") -> str:
    if not rules:
        return "{ }"
    return "{\n" + "\n".join(indent + str(r) for r in rules) + "\n}"


def format_task(t: LearningTask) -> str:
    out = []
    if t.background.rules:
        out.append("#background " + _block(t.background.rules))
    if t.hypothesis_space:
        out.append("#hypothesis " + _block(t.hypothesis_space))
    for tag, coll in (("#pos", t.positives), ("#neg", t.negatives)):
        for ex in coll:
            ctx = ""
            if ex.context.rules:
                ctx = ", { " + " ".join(str(r) for r in ex.context.rules) + " }"
            out.append(f"{tag}({ex.id}, {_atoms(ex.e.inc)}, {_atoms(ex.e.exc)}{ctx}).")
    for o in t.brave_orderings:
        tag = "#brave_equality" if o.relation == EQUAL else "#brave_ordering"
        out.append(f"{tag}({o.id}, {o.first.id}, {o.second.id}).")
    for o in t.cautious_orderings:
        out.append(f"#cautious_ordering({o.id}, {o.first.id}, {o.second.id}).")
    return "\n".join(out) + ("\n" if out else "")


def save_task(t: LearningTask, path):
    Path(path).write_text(format_task(t), encoding="utf-8")
