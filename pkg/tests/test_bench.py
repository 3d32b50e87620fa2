import csv
import io

from ctxlearn.harness.bench import COLUMNS, TIMEOUT_MARK, default_config, run_bench, to_csv

SMALL_HAMILTON = {
    "kind": "hamilton", "max_nodes": 3, "sizes": [[2, 2]], "variants": ["A", "B"],
    "learners": ["batch", "iterative", "iterative_pt"], "timeout": 120,
}
SMALL_JOURNEY = {
    "kind": "journey", "orderings": [4], "equality_fractions": [0, 0.5], "test_pairs": 20,
    "learners": ["iterative"], "timeout": 120,
}


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_three_learners_two_tasks_six_rows():
    out = rows(to_csv(run_bench(SMALL_HAMILTON, seed=0)))
    assert len(out) == 6
    assert [r["variant"] for r in out] == ["batch", "iterative", "iterative_pt"] * 2
    assert {r["hypothesis_length"] for r in out} != {"UNSAT"}


def test_header():
    assert to_csv([]).strip() == ",".join(COLUMNS)


def _without_times(text):
    return [{k: v for k, v in r.items() if k != "time_s"} for r in rows(text)]


def test_fixed_seed_is_reproducible():
    a = to_csv(run_bench(SMALL_JOURNEY, seed=4))
    b = to_csv(run_bench(SMALL_JOURNEY, seed=4))
    assert _without_times(a) == _without_times(b)
    assert all(r["accuracy"] != "-" for r in rows(a))


def test_timeout_marker():
    cfg = dict(SMALL_HAMILTON, timeout=0, variants=["A"], learners=["batch"])
    (row,) = rows(to_csv(run_bench(cfg, seed=0)))
    assert row["time_s"] == TIMEOUT_MARK


def test_shipped_configs_load():
    assert default_config("hamilton")["kind"] == "hamilton"
    assert default_config("journey")["kind"] == "journey"
