"""Seeded benchmark runs over the Hamilton and journey task families, written as CSV."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from importlib import resources

from ..grounder import BudgetExceeded
from ..learner import LearnTimeout, learn
from ..solver import ModelBudgetExceeded
from .hamilton import gen_hamilton
from .journey import JourneyConfig, evaluate_accuracy, gen_journey_data, test_pairs

COLUMNS = ("task", "variant", "n_pos", "n_neg", "n_brave", "n_cautious", "time_s",
           "peak_ground_atoms", "relevant_size", "hypothesis_length", "accuracy")
TIMEOUT_MARK = "TO"
BUDGET_MARK = "OOM"


@dataclass
class BenchRecord:
    task: str
    variant: str
    n_pos: int
    n_neg: int
    n_brave: int
    n_cautious: int
    time_s: str
    peak_ground_atoms: str
    relevant_size: str
    hypothesis_length: str
    accuracy: str = "-"


def default_config(kind: str) -> dict:
    text = resources.files("ctxlearn.harness").joinpath("configs", f"{kind}.json").read_text()
    return json.loads(text)


def _tasks(config: dict, seed: int):
    """(name, task, accuracy function or None) in config order."""
    kind = config["kind"]
    if kind == "hamilton":
        for n_pos, n_neg in config["sizes"]:
            for variant in config["variants"]:
                t = gen_hamilton(config.get("max_nodes", 4), n_pos, n_neg, variant, seed)
                yield f"hamilton{variant}_p{n_pos}_n{n_neg}_s{seed}", t, None
    elif kind == "journey":
        cfg = JourneyConfig(**config.get("journey", {}))
        n_test = config.get("test_pairs", 200)
        for n in config["orderings"]:
            for eq in config["equality_fractions"]:
                data = gen_journey_data(n, eq, seed, cfg)
                pairs = test_pairs(n_test, seed, cfg)

                def acc(h, truth=data.truth, pairs=pairs):
                    return evaluate_accuracy(h.program, truth, pairs)

                yield f"journey_o{n}_eq{eq:g}_s{seed}", data.task, acc
    else:
        raise ValueError(f"unknown benchmark kind {kind!r}")


def run_bench(config: dict, seed: int = 0) -> list:
    records = []
    timeout = config.get("timeout")
    for name, t, acc in _tasks(config, seed):
        counts = (len(t.positives), len(t.negatives), len(t.brave_orderings), len(t.cautious_orderings))
        for variant in config["learners"]:
            try:
                res = learn(t, variant, timeout=timeout)
            except LearnTimeout:
                records.append(BenchRecord(name, variant, *counts, TIMEOUT_MARK, "-", "-", "-", "-"))
                continue
            except (BudgetExceeded, ModelBudgetExceeded):
                records.append(BenchRecord(name, variant, *counts, BUDGET_MARK, "-", "-", "-", "-"))
                continue
            h = res.hypothesis
            records.append(BenchRecord(
                name, variant, *counts,
                f"{res.stats.wall_time:.3f}",
                str(res.stats.peak_ground_atoms),
                str(res.stats.relevant_size),
                "UNSAT" if h is None else str(h.length),
                "-" if acc is None or h is None else f"{acc(h):.4f}",
            ))
    return records


def to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        d = asdict(r)
        w.writerow([d[c] for c in COLUMNS])
    return buf.getvalue()
