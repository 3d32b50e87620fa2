"""AST, parser and pretty-printer for the ASP fragment.

The fragment covers normal rules, hard constraints, choice rules and weak
constraints, with default negation and comparison literals in bodies.
Integer ranges (``lo..hi``) may appear in head atoms (including choice
elements) only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class ASPSyntaxError(ValueError):
    """Raised on malformed program text, with a 1-based line/column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        loc = f"{line}:{col}: " if line else ""
        super().__init__(f"{loc}{msg}")


class ArityClashError(ASPSyntaxError):
    pass


class UnsafeRuleError(ASPSyntaxError):
    pass


# --------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Const:
    """A constant: an identifier (str) or an integer."""

    value: Union[str, int]

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Range:
    lo: int
    hi: int

    def __str__(self):
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple

    def __str__(self):
        return f"{self.name}({','.join(map(str, self.args))})"


Term = Union[Const, Var, Range, Func]


def term_vars(t) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Func):
        for a in t.args:
            yield from term_vars(a)


def is_ground_term(t) -> bool:
    if isinstance(t, Const):
        return True
    if isinstance(t, Func):
        return all(is_ground_term(a) for a in t.args)
    return False


def term_key(t):
    """Total order on ground terms: integers < symbols < compound terms."""
    if isinstance(t, Const):
        if isinstance(t.value, int):
            return (0, t.value)
        return (1, t.value)
    if isinstance(t, Func):
        return (2, len(t.args), t.name, tuple(term_key(a) for a in t.args))
    raise TypeError(f"term_key on non-ground term {t}")


# --------------------------------------------------------------------- atoms


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(map(str, self.args))})"

    @property
    def signature(self):
        return (self.pred, len(self.args))

    def is_ground(self) -> bool:
        return all(is_ground_term(a) for a in self.args)

    def vars(self) -> Iterator[str]:
        for a in self.args:
            yield from term_vars(a)


def atom_key(a: Atom):
    return (a.pred, len(a.args), tuple(term_key(t) for t in a.args))


def atom_as_term(a: Atom) -> Term:
    return Func(a.pred, a.args) if a.args else Const(a.pred)


def term_as_atom(t: Term) -> Atom:
    if isinstance(t, Func):
        return Atom(t.name, t.args)
    if isinstance(t, Const) and isinstance(t.value, str):
        return Atom(t.value)
    raise ValueError(f"term {t} does not denote an atom")


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self):
        return f"not {self.atom}" if self.negated else str(self.atom)


COMPARISON_OPS = ("<", ">", "<=", ">=", "=", "!=")


@dataclass(frozen=True)
class Comparison:
    op: str
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} {self.op} {self.rhs}"

    def vars(self) -> Iterator[str]:
        yield from term_vars(self.lhs)
        yield from term_vars(self.rhs)

    def evaluate(self) -> bool:
        a, b = term_key(self.lhs), term_key(self.rhs)
        return {
            "<": a < b,
            ">": a > b,
            "<=": a <= b,
            ">=": a >= b,
            "=": a == b,
            "!=": a != b,
        }[self.op]


BodyLiteral = Union[Literal, Comparison]


# --------------------------------------------------------------------- rules


@dataclass(frozen=True)
class Choice:
    """Choice head ``lo { elements } hi``; ``hi=None`` means no upper bound."""

    lo: int
    elements: tuple
    hi: Union[int, None] = None

    def __str__(self):
        hi = "" if self.hi is None else f" {self.hi}"
        return f"{self.lo} {{ {'; '.join(map(str, self.elements))} }}{hi}"


@dataclass(frozen=True)
class WeakTail:
    weight: Term
    level: Term
    terms: tuple = ()

    def __str__(self):
        extra = "".join(f", {t}" for t in self.terms)
        return f"[{self.weight}@{self.level}{extra}]"


NORMAL, CONSTRAINT, CHOICE, WEAK = "normal", "constraint", "choice", "weak"


@dataclass(frozen=True)
class Rule:
    head: Union[Atom, Choice, None] = None
    body: tuple = ()
    tail: Union[WeakTail, None] = None

    @property
    def kind(self) -> str:
        if self.tail is not None:
            return WEAK
        if self.head is None:
            return CONSTRAINT
        if isinstance(self.head, Choice):
            return CHOICE
        return NORMAL

    @property
    def is_fact(self) -> bool:
        return self.kind == NORMAL and not self.body

    def head_atoms(self) -> tuple:
        if isinstance(self.head, Atom):
            return (self.head,)
        if isinstance(self.head, Choice):
            return self.head.elements
        return ()

    def atoms(self) -> Iterator[Atom]:
        yield from self.head_atoms()
        for lit in self.body:
            if isinstance(lit, Literal):
                yield lit.atom

    def positive_body(self) -> list:
        return [l.atom for l in self.body if isinstance(l, Literal) and not l.negated]

    def negative_body(self) -> list:
        return [l.atom for l in self.body if isinstance(l, Literal) and l.negated]

    def is_ground(self) -> bool:
        return not list(rule_vars(self))

    def __str__(self):
        body = ", ".join(map(str, self.body))
        if self.kind == WEAK:
            return f":~ {body}.{self.tail}"
        if self.head is None:
            return f":- {body}."
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {body}."


def rule_vars(r: Rule) -> Iterator[str]:
    for a in r.head_atoms():
        yield from a.vars()
    for lit in r.body:
        if isinstance(lit, Literal):
            yield from lit.atom.vars()
        else:
            yield from lit.vars()
    if r.tail is not None:
        for t in (r.tail.weight, r.tail.level, *r.tail.terms):
            yield from term_vars(t)


def unsafe_vars(r: Rule) -> set:
    bound = set()
    for a in r.positive_body():
        bound.update(a.vars())
    return set(rule_vars(r)) - bound


def rule_length(r: Rule) -> int:
    """Literal count: head atoms (a choice head counts its elements) + body."""
    head = len(r.head.elements) if isinstance(r.head, Choice) else int(isinstance(r.head, Atom))
    return head + len(r.body)


@dataclass(frozen=True)
class Program:
    rules: tuple = ()

    def __post_init__(self):
        if not isinstance(self.rules, tuple):
            object.__setattr__(self, "rules", tuple(self.rules))

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def __add__(self, other: "Program") -> "Program":
        return Program(self.rules + tuple(other.rules))

    def __str__(self):
        return "\n".join(map(str, self.rules))

    @property
    def weak_constraints(self) -> tuple:
        return tuple(r for r in self.rules if r.kind == WEAK)

    def without_weak(self) -> "Program":
        return Program(r for r in self.rules if r.kind != WEAK)

    def predicates(self) -> set:
        return {a.pred for r in self.rules for a in r.atoms()}

    def symbols(self) -> set:
        """Every predicate, functor and symbolic constant name in the program."""
        out = set()
        for r in self.rules:
            for a in r.atoms():
                out.add(a.pred)
                for t in a.args:
                    _collect_symbols(t, out)
        return out


def _collect_symbols(t, out):
    if isinstance(t, Const) and isinstance(t.value, str):
        out.add(t.value)
    elif isinstance(t, Func):
        out.add(t.name)
        for a in t.args:
            _collect_symbols(a, out)


# --------------------------------------------------------- transformations


def append_body(p: Program, a: Atom) -> Program:
    """Append the ground atom ``a`` to the body of every rule of ``p``."""
    lit = Literal(a)
    return Program(Rule(r.head, r.body + (lit,), r.tail) for r in p.rules)


def _wrap(a: Atom, wrapper: str) -> Atom:
    return Atom(wrapper, (atom_as_term(a),))


def reify_atoms(atoms: Iterable[Atom], wrapper: str) -> frozenset:
    return frozenset(_wrap(a, wrapper) for a in atoms)


def reify(p: Program, wrapper: str) -> Program:
    """Drop weak constraints and replace every atom ``a`` by ``wrapper(a)``."""
    if wrapper in p.symbols():
        raise ValueError(f"wrapper predicate {wrapper!r} already occurs in the program")
    out = []
    for r in p.rules:
        if r.kind == WEAK:
            continue
        if isinstance(r.head, Atom):
            head = _wrap(r.head, wrapper)
        elif isinstance(r.head, Choice):
            head = Choice(r.head.lo, tuple(_wrap(a, wrapper) for a in r.head.elements), r.head.hi)
        else:
            head = None
        body = tuple(
            Literal(_wrap(l.atom, wrapper), l.negated) if isinstance(l, Literal) else l
            for l in r.body
        )
        out.append(Rule(head, body))
    return Program(out)


# ------------------------------------------------------------------ parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<punct>:-|:~|\.\.|<=|>=|!=|[.,;(){}\[\]@<>=-])
  | (?P<num>\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_']*)
  | (?P<ident>[a-z][A-Za-z0-9_']*)
  | (?P<directive>\#[a-z_]+)
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ASPSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    """Recursive-descent parser over a token list.

    Also used by the task-file reader, which needs to parse rule blocks
    delimited by a closing brace.
    """

    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("punct", "ident", "directive") and t.text == text

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            found = t.text or "end of input"
            raise ASPSyntaxError(f"expected {text!r}, found {found!r}", t.line, t.col)
        return self.next()

    def error(self, msg: str):
        t = self.peek()
        raise ASPSyntaxError(msg, t.line, t.col)

    # grammar
    def parse_rules(self, stop: str = None) -> list:
        rules = []
        while True:
            t = self.peek()
            if t.kind == "eof" or (stop is not None and self.at(stop)):
                break
            start = t
            r = self.parse_rule()
            _check_safe(r, start)
            rules.append(r)
        return rules

    def parse_rule(self) -> Rule:
        if self.at(":~"):
            self.next()
            body = () if self.at(".") else self.parse_body()
            self.expect(".")
            if not self.at("["):
                self.error("weak constraint missing tail [w@p, ...]")
            return Rule(None, body, self.parse_tail())
        if self.at(":-"):
            self.next()
            # an empty constraint body is always violated; the printer emits it as ":- ."
            body = () if self.at(".") else self.parse_body()
            self.expect(".")
            return Rule(None, body)
        head = self.parse_head()
        body = ()
        if self.at(":-"):
            self.next()
            body = self.parse_body()
        self.expect(".")
        if self.at("["):
            self.error("only weak constraints (:~) take a [w@p] tail")
        return Rule(head, body)

    def parse_head(self):
        t = self.peek()
        if t.kind == "num" or (t.kind == "punct" and t.text in ("{", "-")):
            return self.parse_choice()
        return self.parse_atom()

    def parse_choice(self) -> Choice:
        lo = 0
        if not self.at("{"):
            lo = self.parse_int()
        self.expect("{")
        elements = []
        if not self.at("}"):
            elements.append(self.parse_atom())
            while self.at(";") or self.at(","):
                self.next()
                elements.append(self.parse_atom())
        self.expect("}")
        hi = None
        if self.peek().kind == "num" or self.at("-"):
            hi = self.parse_int()
        return Choice(lo, tuple(elements), hi)

    def parse_body(self) -> tuple:
        lits = [self.parse_body_literal()]
        while self.at(","):
            self.next()
            lits.append(self.parse_body_literal())
        return tuple(lits)

    def parse_body_literal(self):
        if self.at("not"):
            self.next()
            return Literal(self.parse_atom(), True)
        t = self.peek()
        if t.kind == "ident" and not (self.peek(1).kind == "punct" and self.peek(1).text in COMPARISON_OPS):
            return Literal(self.parse_atom())
        lhs = self.parse_term()
        op = self.peek()
        if not (op.kind == "punct" and op.text in COMPARISON_OPS):
            self.error("expected a comparison operator")
        self.next()
        rhs = self.parse_term()
        for side in (lhs, rhs):
            if isinstance(side, Range):
                self.error("range terms are not allowed in comparisons")
        return Comparison(op.text, lhs, rhs)

    def parse_tail(self) -> WeakTail:
        self.expect("[")
        weight = self.parse_term()
        self.expect("@")
        level = self.parse_term()
        terms = []
        while self.at(","):
            self.next()
            terms.append(self.parse_term())
        self.expect("]")
        return WeakTail(weight, level, tuple(terms))

    def parse_atom(self) -> Atom:
        t = self.peek()
        if t.kind != "ident" or t.text == "not":
            self.error(f"expected an atom, found {t.text or 'end of input'!r}")
        self.next()
        args = ()
        if self.at("("):
            args = self.parse_args()
        return Atom(t.text, args)

    def parse_args(self) -> tuple:
        self.expect("(")
        args = [self.parse_term()]
        while self.at(","):
            self.next()
            args.append(self.parse_term())
        self.expect(")")
        return tuple(args)

    def parse_int(self) -> int:
        neg = False
        if self.at("-"):
            self.next()
            neg = True
        t = self.peek()
        if t.kind != "num":
            self.error("expected an integer")
        self.next()
        v = -int(t.text) if neg else int(t.text)
        if not INT_MIN <= v <= INT_MAX:
            raise ASPSyntaxError("integer out of 64-bit range", t.line, t.col)
        return v

    def parse_term(self):
        t = self.peek()
        if t.kind == "num" or (t.kind == "punct" and t.text == "-"):
            v = self.parse_int()
            if self.at(".."):
                self.next()
                hi = self.parse_int()
                if hi < v:
                    self.error(f"empty range {v}..{hi}")
                return Range(v, hi)
            return Const(v)
        if t.kind == "var":
            self.next()
            return Var(t.text)
        if t.kind == "ident":
            self.next()
            if self.at("("):
                return Func(t.text, self.parse_args())
            return Const(t.text)
        self.error(f"expected a term, found {t.text or 'end of input'!r}")


def has_range(t) -> bool:
    if isinstance(t, Range):
        return True
    if isinstance(t, Func):
        return any(has_range(a) for a in t.args)
    return False


def _check_safe(r: Rule, start: Token):
    bad = unsafe_vars(r)
    if bad:
        raise UnsafeRuleError(
            f"unsafe variable(s) {', '.join(sorted(bad))} in rule '{r}'", start.line, start.col
        )
    ranged_ok = set(r.head_atoms())
    for a in r.atoms():
        if a not in ranged_ok and any(has_range(t) for t in a.args):
            raise ASPSyntaxError(
                f"range terms are only allowed in rule heads: '{r}'",
                start.line, start.col,
            )
    if r.tail is not None:
        for t in (r.tail.weight, r.tail.level, *r.tail.terms):
            if has_range(t):
                raise ASPSyntaxError("range terms are not allowed in weak tails", start.line, start.col)


def check_arities(rules: Sequence[Rule], known: dict = None) -> dict:
    """Raise ArityClashError when one predicate name is used with two arities."""
    seen = dict(known or {})
    for r in rules:
        for a in r.atoms():
            prev = seen.setdefault(a.pred, len(a.args))
            if prev != len(a.args):
                raise ArityClashError(f"predicate {a.pred} used with arities {prev} and {len(a.args)}")
    return seen


def parse_program(text: str) -> Program:
    p = Parser(text)
    rules = p.parse_rules()
    check_arities(rules)
    return Program(tuple(rules))


def parse_rule(text: str) -> Rule:
    prog = parse_program(text)
    if len(prog) != 1:
        raise ASPSyntaxError(f"expected exactly one rule, got {len(prog)}")
    return prog.rules[0]


def parse_atom(text: str) -> Atom:
    p = Parser(text)
    a = p.parse_atom()
    if p.peek().kind != "eof":
        p.error("trailing input after atom")
    return a
