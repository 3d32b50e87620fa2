"""Command-line interface.

Exit codes: 0 success, 1 unsatisfiable, 2 input error, 3 budget or timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .grounder import GroundingError, BudgetExceeded, ground
from .harness.bench import default_config, run_bench, to_csv
from .harness.taskfile import format_task, load_task
from .learner import LearnTimeout, MODES, learn
from .meta import MetaError, find_relevant_example, find_relevant_direct, meta_verdicts
from .solver import ModelBudgetExceeded, answer_sets
from .syntax import ASPSyntaxError, parse_program
from .task import TaskError, direct_verdicts, translate_loas

EXIT_OK, EXIT_UNSAT, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def cmd_solve(args) -> int:
    g = ground(parse_program(_read(args.program)))
    models = answer_sets(g, args.models)
    for k, m in enumerate(models, start=1):
        print(f"Answer: {k}")
        print(" ".join(str(a) for a in sorted(m, key=str)))
    if not models:
        print("UNSATISFIABLE")
        return EXIT_UNSAT
    print("SATISFIABLE")
    return EXIT_OK


def cmd_ground(args) -> int:
    g = ground(parse_program(_read(args.program)))
    if g.rules:
        print(g)
    return EXIT_OK


def cmd_translate(args) -> int:
    print(format_task(translate_loas(load_task(args.task))), end="")
    return EXIT_OK


def cmd_find_relevant(args) -> int:
    t = load_task(args.task)
    h = parse_program(_read(args.hypothesis))
    if args.all:
        verdicts = direct_verdicts(t, h) if args.direct else meta_verdicts(t, h)
        for ex_id, ok in verdicts.items():
            print(f"{ex_id} {'covered' if ok else 'uncovered'}")
        return EXIT_OK
    ex = find_relevant_direct(t, h) if args.direct else find_relevant_example(t, h)
    print("nil" if ex is None else ex.id)
    return EXIT_OK


def cmd_learn(args) -> int:
    t = load_task(args.task)
    res = learn(t, args.mode, timeout=args.timeout)
    if args.trace:
        for rec in res.trace:
            print(f"% iteration {rec.iteration}: relevant {rec.example_id}, "
                  f"hypothesis {list(rec.hypothesis) if rec.hypothesis is not None else 'UNSAT'}, "
                  f"length {rec.length}", file=sys.stderr)
    s = res.stats
    print(f"% iterations={s.iterations} relevant={s.relevant_size} solver_calls={s.solver_calls} "
          f"peak_ground_atoms={s.peak_ground_atoms} time={s.wall_time:.3f}s", file=sys.stderr)
    if res.hypothesis is None:
        print("UNSATISFIABLE")
        return EXIT_UNSAT
    if res.hypothesis.rules:
        print(res.hypothesis)
    print(f"% length {res.hypothesis.length}")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = json.loads(_read(args.config)) if args.config else default_config(args.kind)
    if config.get("kind") != args.kind:
        raise ValueError(f"config describes {config.get('kind')!r} tasks, not {args.kind!r}")
    if args.timeout is not None:
        config["timeout"] = args.timeout
    text = to_csv(run_bench(config, args.seed))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ctxlearn", description="Context-dependent learning from ordered answer sets.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="print the answer sets of a program")
    s.add_argument("program")
    s.add_argument("-n", "--models", type=int, default=0, help="stop after N answer sets (0 = all)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("ground", help="print the ground instantiation of a program")
    s.add_argument("program")
    s.set_defaults(func=cmd_ground)

    s = sub.add_parser("translate", help="print the context-free translation of a task")
    s.add_argument("task")
    s.set_defaults(func=cmd_translate)

    s = sub.add_parser("find-relevant", help="print the first example a hypothesis does not cover")
    s.add_argument("task")
    s.add_argument("hypothesis")
    s.add_argument("--direct", action="store_true", help="check examples directly instead of via the meta program")
    s.add_argument("--all", action="store_true", help="print a verdict for every example")
    s.set_defaults(func=cmd_find_relevant)

    s = sub.add_parser("learn", help="learn an optimal hypothesis")
    s.add_argument("task")
    s.add_argument("--mode", choices=sorted(MODES), default="iterative")
    s.add_argument("--timeout", type=float, default=None, help="seconds")
    s.add_argument("--trace", action="store_true", help="print per-iteration records to stderr")
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("bench", help="run a seeded benchmark and write CSV")
    s.add_argument("kind", choices=["hamilton", "journey"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.add_argument("--config", default=None, help="JSON config (defaults to the shipped one)")
    s.add_argument("--timeout", type=float, default=None, help="per-run timeout in seconds")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BudgetExceeded, ModelBudgetExceeded, LearnTimeout) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ASPSyntaxError, TaskError, MetaError, GroundingError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
