"""Journey-preference tasks: learn weak constraints from orderings over journeys.

A journey is a tuple of legs, each leg a (mode, distance, crime rating)
triple, and is encoded as a context of facts about ``leg(i)`` terms.
"""

from __future__ import annotations

import random
from functools import cmp_to_key
from dataclasses import dataclass

from ..preference import Interpretation, compare_tables, rule_tuples, score_table
from ..syntax import Program, parse_rule
from ..task import CDOE, CDPI, EQUAL, STRICT, LearningTask

MODES = ("bus", "car", "walk", "bicycle")


@dataclass(frozen=True)
class JourneyConfig:
    max_distance: int = 200          # distances are drawn from 1..max_distance
    max_legs: int = 3
    alternatives: int = 4            # journeys per request
    space_cap: int = 14              # hypothesis-space size after sampling
    max_truth: int = 3
    mutation_tries: int = 50


Leg = tuple  # (mode, distance, crime)


def journey_facts(journey) -> str:
    facts = []
    for i, (mode, dist, crime) in enumerate(journey, start=1):
        facts.append(f"mode(leg({i}),{mode}). distance(leg({i}),{dist}). crime_rating(leg({i}),{crime}).")
    return " ".join(facts)


def journey_program(journey) -> Program:
    from ..syntax import parse_program

    return parse_program(journey_facts(journey))


def journey_atoms(journey) -> frozenset:
    return frozenset(r.head for r in journey_program(journey).rules)


def weak_space() -> tuple:
    """Every weak constraint of the template family, without duplicates.

    Bodies talk about a single leg and use at most three literals; weights
    are 1 or the leg distance, levels 1..3.
    """
    bodies = []  # (body text, has distance variable, tail variables)
    for m in MODES:
        bodies.append((f"mode(L,{m})", False, "L"))
    for m in MODES:
        for c in range(1, 5):
            bodies.append((f"mode(L,{m}), crime_rating(L,R), R > {c}", False, "L,R"))
    for c in range(1, 5):
        bodies.append((f"crime_rating(L,R), R > {c}", False, "L,R"))
    for m in MODES:
        bodies.append((f"mode(L,{m}), distance(L,D)", True, "L,D"))
    bodies.append(("distance(L,D)", True, "L,D"))
    for c in range(1, 5):
        bodies.append((f"crime_rating(L,R), R > {c}, distance(L,D)", True, "L,R,D"))
    rules, seen = [], set()
    for body, has_d, tail in bodies:
        weights = ["D"] if has_d else ["1"]
        for w in weights:
            for lv in (1, 2, 3):
                r = parse_rule(f":~ {body}.[{w}@{lv}, {tail}]")
                if r not in seen:
                    seen.add(r)
                    rules.append(r)
    return tuple(rules)


class _Scorer:
    def __init__(self, rules):
        self.rules = tuple(rules)
        self._cache = {}

    def table(self, journey) -> dict:
        t = self._cache.get(journey)
        if t is None:
            interp = Interpretation(journey_atoms(journey))
            tuples = set()
            for r in self.rules:
                tuples |= rule_tuples(r, interp)
            t = score_table(tuples)
            self._cache[journey] = t
        return t

    def cmp(self, j1, j2) -> int:
        return compare_tables(self.table(j1), self.table(j2))


def random_leg(rng: random.Random, cfg: JourneyConfig) -> Leg:
    return (rng.choice(MODES), rng.randint(1, cfg.max_distance), rng.randint(1, 5))


def random_journey(rng: random.Random, cfg: JourneyConfig) -> tuple:
    return tuple(random_leg(rng, cfg) for _ in range(rng.randint(1, cfg.max_legs)))


def random_request(rng: random.Random, cfg: JourneyConfig) -> list:
    """Distinct alternative journeys for one trip."""
    out = []
    while len(out) < cfg.alternatives:
        j = random_journey(rng, cfg)
        if j not in out:
            out.append(j)
    return out


def mutate(rng: random.Random, journey, cfg: JourneyConfig) -> tuple:
    legs = list(journey)
    i = rng.randrange(len(legs))
    mode, dist, crime = legs[i]
    field = rng.randrange(3)
    if field == 0:
        mode = rng.choice(MODES)
    elif field == 1:
        dist = rng.randint(1, cfg.max_distance)
    else:
        crime = rng.randint(1, 5)
    legs[i] = (mode, dist, crime)
    return tuple(legs)


@dataclass
class JourneyData:
    task: LearningTask
    truth: Program
    space: tuple
    journeys: dict          # example id -> journey


def gen_journey(n_orderings: int, equality_fraction: float = 0.0, seed=0,
                cfg: JourneyConfig = JourneyConfig()) -> tuple:
    """(task, truth) for ``n_orderings`` orderings; see ``gen_journey_data``."""
    data = gen_journey_data(n_orderings, equality_fraction, seed, cfg)
    return data.task, data.truth


def sample_space_and_truth(rng: random.Random, cfg: JourneyConfig):
    full = weak_space()
    space = tuple(sorted(rng.sample(range(len(full)), min(cfg.space_cap, len(full)))))
    space_rules = tuple(full[i] for i in space)
    k = rng.randint(1, cfg.max_truth)
    truth = Program(tuple(space_rules[i] for i in sorted(rng.sample(range(len(space_rules)), k))))
    return space_rules, truth


def gen_journey_data(n_orderings: int, equality_fraction: float = 0.0, seed=0,
                     cfg: JourneyConfig = JourneyConfig(), max_requests: int = 10000) -> JourneyData:
    """Sample a truth, then orderings ⟨optimal, non-optimal⟩ within random requests.

    A fraction of the orderings are equality orderings between an optimal
    journey and a mutated copy that the truth scores identically (falling back
    to a leg permutation, which always ties, when no such mutation is found).
    """
    if n_orderings < 1:
        raise ValueError("n_orderings must be at least 1")
    if not 0 <= equality_fraction <= 1:
        raise ValueError("equality_fraction must lie in [0, 1]")
    rng = random.Random(seed)
    space, truth = sample_space_and_truth(rng, cfg)
    scorer = _Scorer(truth.rules)
    n_equal = round(n_orderings * equality_fraction)
    n_strict = n_orderings - n_equal

    journeys = []
    index = {}

    def example_of(j):
        if j not in index:
            index[j] = f"j{len(journeys) + 1}"
            journeys.append(j)
        return index[j]

    pairs = []  # (id1, id2, relation)
    seen_pairs = set()
    strict_left, equal_left = n_strict, n_equal
    for _ in range(max_requests):
        if strict_left == 0 and equal_left == 0:
            break
        req = random_request(rng, cfg)
        best = min(req, key=cmp_to_key(scorer.cmp))
        optimal = [j for j in req if scorer.cmp(j, best) == 0]
        others = [j for j in req if scorer.cmp(best, j) < 0]
        if strict_left and others:
            a, b = rng.choice(optimal), rng.choice(others)
            if (a, b) not in seen_pairs:
                seen_pairs.add((a, b))
                pairs.append((a, b, STRICT))
                strict_left -= 1
        if equal_left:
            a = rng.choice(optimal)
            b = None
            for _ in range(cfg.mutation_tries):
                m = mutate(rng, a, cfg)
                if m != a and scorer.cmp(a, m) == 0:
                    b = m
                    break
            if b is None and len(a) > 1:
                b = tuple(reversed(a))
            if b is not None and b != a and (a, b) not in seen_pairs:
                seen_pairs.add((a, b))
                pairs.append((a, b, EQUAL))
                equal_left -= 1
    if strict_left or equal_left:
        raise RuntimeError("could not realise the requested orderings under the sampled truth")

    # interleave so that any prefix has roughly the requested mix
    rng.shuffle(pairs)
    ids = [(example_of(a), example_of(b), rel) for a, b, rel in pairs]
    positives = {jid: CDPI(jid, context=journey_program(j)) for j, jid in index.items()}
    orderings = tuple(CDOE(f"o{k + 1}", positives[a], positives[b], rel) for k, (a, b, rel) in enumerate(ids))
    task = LearningTask(Program(), space, tuple(positives[index[j]] for j in journeys), (), orderings, ())
    return JourneyData(task, truth, space, {index[j]: j for j in journeys})


def test_pairs(n: int, seed, cfg: JourneyConfig = JourneyConfig()) -> list:
    """Held-out journey pairs, each drawn from one fresh request."""
    rng = random.Random(f"test-{seed}")
    out = []
    while len(out) < n:
        req = random_request(rng, cfg)
        a, b = rng.sample(req, 2)
        out.append((a, b))
    return out


def evaluate_accuracy(learned: Program, truth: Program, pairs) -> float:
    """Fraction of pairs on which both programs induce the same relation."""
    if not pairs:
        return 1.0
    ls, ts = _Scorer(learned.weak_constraints if isinstance(learned, Program) else learned), _Scorer(truth.weak_constraints)
    agree = sum(1 for a, b in pairs if ls.cmp(a, b) == ts.cmp(a, b))
    return agree / len(pairs)
