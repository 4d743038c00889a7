"""Command-line front end: ``liftlab {gen,colour,oracle,sweep,lemma}``.

JSON-lines go to standard output (or ``--out``), diagnostics to standard
error.  Exit codes: 0 success, 2 usage or configuration error, 3 an
experiment's own check failed.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import experiments
from .base_graph import BaseGraphError, build_join_graph
from .colouring import run, verify_proper
from .lift import LiftGraph, random_lift
from .oracle import DEFAULT_VERTEX_CAP, SimpleGraph, chromatic_number, find_colouring, parse_edges
from .stats.harness import ResourceCapExceeded, TrialConfig, run_trials, summarize_by_h

EXIT_OK, EXIT_USAGE, EXIT_CHECK_FAILED = 0, 2, 3
SEED_ENV = "LIFTLAB_SEED"

LEMMAS = dict(experiments.LEMMAS)
LEMMAS.update(
    {
        "pale-invariant": experiments.pale_invariant_experiment,
        "exchangeability": experiments.exchangeability_experiment,
        "oracle-agreement": experiments.oracle_agreement_experiment,
        "failure-trends": experiments.failure_trends,
    }
)

CURVE_TITLES = {
    "cycles": ("cycle count", False),
    "gaps-cont": ("a", True),
    "gaps-disc": ("a", True),
    "subset-gaps": ("a", True),
}


class UsageError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(float(t)) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=3, help="cycle length of the base graph (default 3)")
    common.add_argument("--s", type=int, default=2, help="size of the stable set (default 2)")
    common.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    common.add_argument("--out", default=None, help="write output here instead of standard output")
    common.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")

    parser = argparse.ArgumentParser(prog="liftlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="emit a random lift")
    p.add_argument("--h", type=_positive_int, required=True)

    p = sub.add_parser("colour", parents=[common], help="run the colouring algorithm once")
    p.add_argument("--h", type=_positive_int, required=True)
    p.add_argument("--schedule", choices=("lazy", "upfront"), default="lazy")
    p.add_argument("--timing", action="store_true", help="fill in the millis field")

    p = sub.add_parser("oracle", parents=[common], help="exact chromatic number of a lift")
    p.add_argument("--h", type=_positive_int, default=None)
    p.add_argument("--input", default=None, help="lift serialization or 0-based edge list ('-' for stdin)")
    p.add_argument("--cap", type=_positive_int, default=5, help="largest number of colours tried")
    p.add_argument("--force", action="store_true", help=f"allow more than {DEFAULT_VERTEX_CAP} vertices")

    p = sub.add_parser("sweep", parents=[common], help="many trials over a list of h")
    p.add_argument("--hs", type=_int_list, required=True, help="e.g. '1000,10000'")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--schedule", choices=("lazy", "upfront"), default="lazy")
    p.add_argument("--records", default=None, help="also write one JSON line per trial to this file")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--max-work", type=_positive_int, default=None, help="cap on sum(h) * trials")
    p.add_argument("--figure", default=None, help="save a hazard plot to this image file")

    p = sub.add_parser("lemma", parents=[common], help="run one experiment")
    p.add_argument("name", choices=sorted(LEMMAS))
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--samples", type=_positive_int, default=None)
    p.add_argument("--Ns", type=_int_list, default=None)
    p.add_argument("--h", type=_positive_int, default=None)
    p.add_argument("--hs", type=_int_list, default=None)
    p.add_argument("--trials", type=_positive_int, default=None)
    p.add_argument("--lifts", type=_positive_int, default=None)
    p.add_argument("--workers", type=_positive_int, default=None)
    p.add_argument("--figure", default=None, help="save the curve to this image file")
    return parser


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_csv(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def cmd_gen(args) -> int:
    base = build_join_graph(args.k, args.s)
    lift = random_lift(base, args.h, np.random.default_rng(args.seed))
    with _output(args.out) as fh:
        if args.format == "csv":
            us, vs = lift.edge_arrays()
            _write_csv(fh, ("u", "v"), zip(us.tolist(), vs.tolist()))
        else:
            rec = {
                "k": args.k,
                "s": args.s,
                "h": args.h,
                "seed": args.seed,
                "n_vertices": lift.n_vertices,
                "perms": [np.asarray(p).tolist() for p in lift.perms],
            }
            fh.write(dumps(rec) + "\n")
    return EXIT_OK


def cmd_colour(args) -> int:
    out = run(build_join_graph(args.k, args.s), args.h, args.seed, schedule=args.schedule, timing=args.timing)
    with _output(args.out) as fh:
        if args.format == "csv":
            rec = out.to_record()
            _write_csv(fh, list(rec), [["" if v is None else v for v in rec.values()]])
        else:
            fh.write(out.to_json() + "\n")
    return EXIT_OK


def _read_oracle_input(args):
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    if any(":" in line for line in text.splitlines() if line.strip()):
        lift = LiftGraph.parse(build_join_graph(args.k, args.s), text)
        return lift, SimpleGraph.from_lift(lift)
    return None, parse_edges(text)


def cmd_oracle(args) -> int:
    if args.input is not None:
        lift, g = _read_oracle_input(args)
    elif args.h is not None:
        lift = random_lift(build_join_graph(args.k, args.s), args.h, np.random.default_rng(args.seed))
        g = SimpleGraph.from_lift(lift)
    else:
        raise UsageError("oracle needs --h or --input")
    if g.n > DEFAULT_VERTEX_CAP and not args.force:
        raise UsageError(f"graph has {g.n} vertices (> {DEFAULT_VERTEX_CAP}); pass --force to search anyway")
    chi = chromatic_number(g, args.cap)
    witness = find_colouring(g, chi) if chi else None
    if witness is not None and lift is not None and not verify_proper(lift, np.asarray(witness) + 1):
        raise AssertionError("oracle witness is not a proper colouring")
    rec = {
        "k": args.k if lift is not None else None,
        "s": args.s if lift is not None else None,
        "h": lift.h if lift is not None else None,
        "seed": args.seed if args.input is None else None,
        "n": g.n,
        "m": g.n_edges,
        "cap": args.cap,
        "chromatic_number": chi,
        "exceeds_cap": chi is None,
        "colouring": witness,
    }
    with _output(args.out) as fh:
        if args.format == "csv":
            _write_csv(fh, ("vertex", "colour"), enumerate(witness or []))
        else:
            fh.write(dumps(rec) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = TrialConfig(
        k=args.k,
        s=args.s,
        hs=tuple(args.hs),
        trials=args.trials,
        master_seed=args.seed,
        schedule=args.schedule,
        run_options={"timing": True} if args.timing else {},
    )
    if args.max_work is not None:
        config.max_work = args.max_work
    config.validate()
    outcomes = []
    rec_fh = open(args.records, "w") if args.records else None
    try:
        for i, o in enumerate(run_trials(config, workers=args.workers)):
            outcomes.append(o)
            if rec_fh:
                rec_fh.write(o.to_json() + "\n")
            if (i + 1) % args.trials == 0:
                print(f"h={o.h}: {args.trials} trials done", file=sys.stderr)
    finally:
        if rec_fh:
            rec_fh.close()
    summaries = summarize_by_h(outcomes)
    with _output(args.out) as fh:
        if args.format == "csv":
            statuses = list(summaries[0]["statuses"])
            rows = [
                [s["h"], s["trials"], *(s["statuses"][st] for st in statuses), s["mean_cycles"], s["mean_max_chunk"]]
                for s in summaries
            ]
            _write_csv(fh, ["h", "trials", *statuses, "mean_cycles", "mean_max_chunk"], rows)
        else:
            for s in summaries:
                fh.write(dumps(s) + "\n")
    if args.figure:
        from .plotting import plot_sweep

        plot_sweep(summaries, args.figure, title=f"G({args.k},{args.s})")
    return EXIT_OK


BASE_DEFAULTS = {"k": 3, "s": 2}
LEMMA_FLAGS = ("n", "samples", "Ns", "h", "hs", "trials", "lifts", "workers", "k", "s")


def cmd_lemma(args) -> int:
    fn = LEMMAS[args.name]
    params = inspect.signature(fn).parameters
    kwargs = {"seed": args.seed}
    for flag in LEMMA_FLAGS:
        value = getattr(args, flag)
        if value is None or (flag in BASE_DEFAULTS and flag not in params and value == BASE_DEFAULTS[flag]):
            continue
        if flag not in params:
            raise UsageError(f"lemma {args.name} does not take --{flag}")
        kwargs[flag] = tuple(value) if isinstance(value, list) else value
    if args.name in ("max-chunk", "chunk-cycles", "failure-trends"):
        TrialConfig(k=args.k, s=args.s, hs=kwargs.get("hs", (1000, 10_000, 100_000)), trials=1).validate()
    result = fn(**kwargs)
    rows = result.get("rows")
    with _output(args.out) as fh:
        if args.format == "csv":
            if rows is None:
                raise UsageError(f"lemma {args.name} has no curve to export as CSV")
            _write_csv(fh, ("a", "empirical", "exact_or_bound", "N"), [["" if v is None else v for v in r] for r in rows])
        else:
            fh.write(dumps(result) + "\n")
    if args.figure:
        if rows is None:
            raise UsageError(f"lemma {args.name} has no curve to plot")
        from .plotting import plot_curve

        xlabel, logy = CURVE_TITLES[args.name]
        plot_curve(rows, args.figure, title=args.name, xlabel=xlabel, logy=logy)
    if not result["passed"]:
        print(f"lemma {args.name}: check failed", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "colour": cmd_colour,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "lemma": cmd_lemma,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return COMMANDS[args.command](args)
    except (UsageError, BaseGraphError, ResourceCapExceeded, ValueError, OSError) as exc:
        print(f"liftlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
