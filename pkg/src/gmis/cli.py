"""Command-line harness.

Subcommands:

* ``run <config>`` — execute an experiment and write the result table,
* ``validate <config>`` — schema-check a config without running it,
* ``list-schemes`` — print the named schemes and their costs
  (``--expert`` adds the full sampling x weighting matrix),
* ``report <results.csv>`` — render figures from an existing table.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, InputError
from .config import load_config
from .indexing import SamplingMode
from .runner import (check_finite, diagnostics_to_csv, rows_to_csv,
                     rows_to_json, run_experiment)
from .schemes import NAMED_SCHEMES, SCHEME_OF_PAIR
from .weights import WeightingOption

THREADS_ENV = "GMIS_THREADS"

_COST_NOTES = {
    "R1": "N proposal evals",
    "R2": "between N and N² proposal evals",
    "R3": "N² proposal evals",
    "N1": "N proposal evals",
    "N2": "N(N+1)/2 proposal evals",
    "N3": "N² proposal evals",
}


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmis",
        description="Multiple importance sampling experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=None,
                     help="override the config's master seed")
    run.add_argument("--replicates", type=int, default=None,
                     help="override the config's replicate count")
    run.add_argument("--out", default=None,
                     help="output path (default: config's 'output' field)")
    run.add_argument("--threads", type=int, default=_default_threads(),
                     help=f"worker threads (default ${THREADS_ENV} or 1)")
    run.add_argument("--json", action="store_true",
                     help="write JSON instead of CSV")
    run.add_argument("--timings", action="store_true",
                     help="include wall-clock times (breaks byte determinism)")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("config")

    ls = sub.add_parser("list-schemes", help="print the scheme table")
    ls.add_argument("--expert", action="store_true",
                    help="also print the full sampling x weighting matrix")

    rep = sub.add_parser("report", help="render figures from a results CSV")
    rep.add_argument("results")
    rep.add_argument("--out-dir", default=None)
    return parser


def cmd_run(args) -> int:
    doc = load_config(args.config)
    rows, diag = run_experiment(doc, seed=args.seed,
                                replicates=args.replicates,
                                threads=max(1, args.threads),
                                timings=args.timings)
    check_finite(rows)
    out = args.out or doc.get("output") or "results.csv"
    payload = rows_to_json(rows) if args.json else rows_to_csv(rows)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)
    print(f"wrote {len(rows)} result rows to {out}")
    if diag:
        diag_path = os.path.splitext(out)[0] + "_diagnostics.csv"
        with open(diag_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(diagnostics_to_csv(diag))
        print(f"wrote {len(diag)} diagnostic rows to {diag_path}")
    return 0


def cmd_validate(args) -> int:
    load_config(args.config)
    print(f"{args.config}: OK")
    return 0


def cmd_list_schemes(args) -> int:
    print("scheme | sampling | weighting | cost per block")
    print("-------+----------+-----------+---------------")
    for name in ("R1", "R2", "R3", "N1", "N2", "N3"):
        mode, option = NAMED_SCHEMES[name]
        print(f"{name:6} | {mode.value:8} | {option.value:9} | "
              f"{_COST_NOTES[name]}")
    if args.expert:
        print()
        print("full sampling x weighting matrix (cell -> named scheme):")
        header = "      " + "".join(f"{o.value:>6}" for o in WeightingOption)
        print(header)
        for mode in SamplingMode:
            cells = []
            for option in WeightingOption:
                name = SCHEME_OF_PAIR[(mode, option)]
                canonical = NAMED_SCHEMES[name] == (mode, option)
                cells.append(f"{name + ('' if canonical else '*'):>6}")
            print(f"{mode.value:6}" + "".join(cells))
        print("(* = collapses to the named scheme shown)")
    return 0


def cmd_report(args) -> int:
    from .report import render_report
    written = render_report(args.results, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "validate": cmd_validate,
                "list-schemes": cmd_list_schemes, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
