"""Command-line front end: ``glava build | query | monitor | validate | bench``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(unparseable input, unreadable or corrupt files), 3 internal invariant
violation (including a failed bound validation).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from collections.abc import Sequence

from glava import errors
from glava.evaluation import (
    StreamModel,
    compare_shapes,
    gen_stream,
    size_for_bounds,
    time_build,
    validate_bounds,
)
from glava.hashing import HashSpec
from glava.pattern import parse_pattern
from glava.query import (
    PointMonitor,
    estimate_degree,
    estimate_edge,
    estimate_flow,
    estimate_reach,
    estimate_subgraph,
    estimate_subgraph_fast,
)
from glava.sketch import AGGREGATIONS, GLavaSummary, resolve_schedule
from glava.stream import parse_element, read_stream

log = logging.getLogger("glava")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

USAGE_ERRORS = (
    errors.InvalidParameterError,
    errors.UnsupportedOperationError,
    errors.DirectionError,
    errors.MissingCompanionError,
    errors.UnsupportedPatternError,
    errors.ComplexityGuardError,
    errors.IncompatibleSummaryError,
)
DATA_ERRORS = (
    errors.ParseError,
    errors.CorruptPayloadError,
    errors.FormatVersionError,
    errors.InvalidDeletionError,
    errors.UnknownLabelError,
    OSError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    raw = os.environ.get("GLAVA_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GLAVA_SEED must be an integer, got {raw!r}") from None


def emit(record: dict) -> None:
    sys.stdout.write(json.dumps(record) + "\n")
    sys.stdout.flush()


# -- hash tables ---------------------------------------------------------------

def read_hash_table(path: str) -> HashSpec | tuple[HashSpec, HashSpec]:
    """Read a ``label row [col]`` map; ``%range R [C]`` fixes the bucket counts."""
    rows: dict[str, int] = {}
    cols: dict[str, int] = {}
    declared: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith("#"):
                continue
            try:
                if tokens[0] == "%range":
                    declared = [int(t) for t in tokens[1:]]
                    if len(declared) not in (1, 2):
                        raise ValueError
                    continue
                if len(tokens) not in (2, 3):
                    raise ValueError
                rows[tokens[0]] = int(tokens[1])
                if len(tokens) == 3:
                    cols[tokens[0]] = int(tokens[2])
            except ValueError:
                raise errors.ParseError("expected 'label row [col]' or '%range R [C]'", line.rstrip("\n"), lineno) from None
    if cols and set(cols) != set(rows):
        raise errors.ParseError(f"{path}: every label needs a column bucket when any has one")
    m = declared[0] if declared else max(rows.values(), default=1)
    if not cols:
        return HashSpec.from_table(rows, m)
    p = declared[1] if len(declared) == 2 else max(cols.values())
    return HashSpec.from_table(rows, m), HashSpec.from_table(cols, p)


# -- summary construction ---------------------------------------------------------

def add_sizing_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, help="number of sketches")
    p.add_argument("--cell-budget", type=int, help="cells per sketch (m*p)")
    p.add_argument("--epsilon", type=float, help="error factor; sizes d and w together with --delta")
    p.add_argument("--delta", type=float, help="failure probability")
    p.add_argument("--schedule", default="square", help="square, mixed or explicit shapes like 7x2,2x7")
    p.add_argument("--seed", type=int, help="hash family seed (default: $GLAVA_SEED or 0)")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--aggregation", choices=AGGREGATIONS, default="sum")
    p.add_argument("--companions", action="store_true", help="keep unit-weight counters for degree queries")
    p.add_argument("--hash-table", action="append", default=[], metavar="FILE",
                   help="fixed label->bucket map, one per sketch (repeatable)")


def summary_from_args(args) -> GLavaSummary:
    seed = args.seed if args.seed is not None else default_seed()
    if args.hash_table:
        tables = [read_hash_table(path) for path in args.hash_table]
        if args.d is not None and args.d != len(tables):
            raise UsageError(f"--d {args.d} but {len(tables)} hash tables given")
        summary = GLavaSummary.from_tables(
            tables, not args.undirected, args.aggregation, args.companions
        )
        if args.cell_budget is not None and any(s.cells != args.cell_budget for s in summary.shapes):
            raise UsageError(f"hash tables give shapes {summary.shapes}, not {args.cell_budget} cells")
        return summary
    lemma = args.epsilon is not None or args.delta is not None
    if lemma == (args.cell_budget is not None):
        raise UsageError("give exactly one of --cell-budget or --epsilon/--delta")
    if lemma:
        if args.epsilon is None or args.delta is None:
            raise UsageError("--epsilon and --delta go together")
        params = size_for_bounds(args.epsilon, args.delta)
        if args.d is not None and args.d != params.d:
            raise UsageError(f"--d {args.d} conflicts with d={params.d} implied by --delta")
        d, budget = params.d, params.w**2
    else:
        d, budget = (args.d if args.d is not None else 3), args.cell_budget
    return GLavaSummary.build(
        d, budget, args.schedule, seed, not args.undirected, args.aggregation, args.companions
    )


def open_input(path: str):
    if path == "-":
        return sys.stdin
    return open(path, encoding="utf-8")


# -- subcommands ------------------------------------------------------------------

def cmd_build(args) -> int:
    summary = summary_from_args(args)
    with open_input(args.input) as fh:
        summary.extend(read_stream(fh))
    summary.save(args.output)
    info = {
        "elements": summary.elements,
        "total_weight": summary.total_weight,
        "d": summary.d,
        "shapes": [str(s) for s in summary.shapes],
        "output": args.output,
    }
    if args.format == "records":
        emit(info)
    else:
        print(f"elements      {info['elements']}")
        print(f"total weight  {info['total_weight']:g}")
        print(f"sketches      {summary.d} x [{', '.join(info['shapes'])}]")
        print(f"written to    {args.output}")
    return EXIT_OK


def cmd_query(args) -> int:
    summary = GLavaSummary.load(args.summary)
    if args.kind == "edge":
        est = estimate_edge(summary, args.a, args.b)
    elif args.kind == "flow":
        est = estimate_flow(summary, args.a, args.dir)
    elif args.kind == "degree":
        est = estimate_degree(summary, args.a, args.dir)
    elif args.kind == "reach":
        est = estimate_reach(summary, args.a, args.b)
    else:
        with open(args.pattern, encoding="utf-8") as fh:
            query = parse_pattern(fh.read(), "sum_weights" if args.mode == "sum" else "count_matches")
        est = (estimate_subgraph_fast if args.fast else estimate_subgraph)(summary, query)
    if args.format == "records":
        emit(est.to_dict())
    else:
        value = est.value if isinstance(est.value, bool) else f"{est.value:g}"
        print(f"{args.kind}: {value}  (per sketch: {list(est.per_sketch) or list(est.terms)})")
    return EXIT_OK


def cmd_monitor(args) -> int:
    summary = GLavaSummary.load(args.summary) if args.summary else summary_from_args(args)
    direction = args.dir
    if direction is None:
        direction = "in" if summary.directed else "undirected"
    monitor = PointMonitor(summary, args.node, direction, args.threshold,
                           "below" if args.below else "above")
    alarms = skipped = 0
    with open_input(args.input) as fh:
        for lineno, line in enumerate(fh, start=1):
            try:
                e = parse_element(line, lineno)
            except errors.ParseError as exc:
                skipped += 1
                log.warning("skipping element: %s", exc)
                continue
            if e is None:
                continue
            alarm = monitor.observe(e)
            if alarm is not None:
                alarms += 1
                emit({"alarm": alarm.to_dict()})
    if args.save:
        summary.save(args.save)
    log.info("observed %d elements, %d alarms, %d skipped lines", monitor.observed, alarms, skipped)
    return EXIT_OK


MODEL_KEYS = {
    "kind": str, "n_nodes": int, "n_elements": int, "seed": int,
    "exponent": float, "background": str, "max_weight": int,
}


def parse_model_config(pairs: Sequence[str]) -> dict:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in MODEL_KEYS:
            raise UsageError(f"bad model setting {pair!r}; keys are {sorted(MODEL_KEYS)}")
        try:
            out[key] = MODEL_KEYS[key](value.strip())
        except ValueError:
            raise UsageError(f"bad value in {pair!r}") from None
    return out


def add_model_args(p: argparse.ArgumentParser, elements: int) -> None:
    p.add_argument("--kind", choices=("uniform", "zipf"), help="label distribution (default zipf)")
    p.add_argument("--exponent", type=float, help="zipf exponent (default 1.1)")
    p.add_argument("--nodes", type=int, help="distinct labels (default 500)")
    p.add_argument("--elements", type=int, help=f"stream length (default {elements})")
    p.add_argument("--max-weight", type=int, help="weights uniform on 1..max (default 1)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="generator setting, e.g. exponent=1.4 (repeatable)")
    p.add_argument("--config", help="file of KEY=VALUE generator settings")


def model_from_args(args, elements: int, seed: int) -> StreamModel:
    settings = {"kind": "zipf", "n_nodes": 500, "n_elements": elements, "seed": seed, "exponent": 1.1}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        settings.update(parse_model_config(lines))
    settings.update(parse_model_config(args.set))
    flags = {
        "kind": args.kind, "exponent": args.exponent, "n_nodes": args.nodes,
        "n_elements": args.elements, "max_weight": args.max_weight,
    }
    settings.update({k: v for k, v in flags.items() if v is not None})
    return StreamModel(**settings)


def cmd_validate(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    model = model_from_args(args, 20_000, seed)
    result = validate_bounds(
        args.epsilon, args.delta, model, args.trials, args.queries, seed, args.injective
    )
    summary = {
        "epsilon": args.epsilon,
        "delta": args.delta,
        "d": result.params.d,
        "w": result.params.w,
        "trials": len(result.reports),
        "queries": result.queries,
        "violation_rate": result.violation_rate,
        "node_violation_rate": result.node_violation_rate,
        "underestimates": result.underestimates,
        "passed": result.passed,
    }
    if args.format == "records":
        for report in result.reports:
            emit(report.to_dict())
        emit({"summary": summary})
    else:
        print(f"{'trial':<10} {'mean err':>9} {'max err':>9} {'eps*N':>9} {'viol.':>7} {'eps*n':>7} {'viol.':>7}")
        for r in result.reports:
            print(f"{r.label:<10} {r.mean_error:>9.3f} {r.max_error:>9.3f} {r.threshold:>9.1f}"
                  f" {r.violation_rate:>7.3f} {r.node_threshold:>7.1f} {r.node_violation_rate:>7.3f}")
        print(f"\nd={result.params.d} w={result.params.w}: violation rate {result.violation_rate:.4f}"
              f" (bound eps*N) vs delta={args.delta}; {result.node_violation_rate:.4f} against eps*n")
        print("PASS" if result.passed else "FAIL")
    return EXIT_OK if result.passed else EXIT_INTERNAL


def cmd_bench(args) -> int:
    schedules = [s for s in args.schedules.split(";") if s.strip()] if args.schedules else []
    if not schedules:
        raise UsageError("need at least one schedule")
    seed = args.seed if args.seed is not None else default_seed()
    model = model_from_args(args, 100_000, seed)
    for name in schedules:
        resolve_schedule(args.d, args.cell_budget, name)

    accuracy = compare_shapes(args.cell_budget, schedules, model.replace(n_elements=min(model.n_elements, 20_000)),
                              args.queries, args.d, seed)
    small = gen_stream(model)
    large = gen_stream(model.replace(n_elements=2 * model.n_elements, seed=model.seed + 1))
    build = {"d": args.d, "cell_budget": args.cell_budget, "schedule": schedules[0], "seed": seed}
    t_small = time_build(small, args.repeats, **build)
    t_large = time_build(large, args.repeats, **build)
    probe = GLavaSummary.build(**build)
    probe.update(small[0])
    touches = probe.touches
    result = {
        "schedules": {k: v.to_dict() for k, v in accuracy.reports.items()},
        "build_seconds": {str(len(small)): t_small, str(len(large)): t_large},
        "throughput_eps": len(large) / t_large if t_large > 0 else math.inf,
        "linearity_ratio": t_large / t_small if t_small > 0 else math.inf,
        "touches_per_update": touches,
    }
    if args.format == "records":
        emit(result)
    else:
        print(accuracy.table())
        print()
        print(f"build {len(small):>8} elements: {t_small:.3f} s")
        print(f"build {len(large):>8} elements: {t_large:.3f} s  (ratio {result['linearity_ratio']:.2f})")
        print(f"throughput: {result['throughput_eps']:,.0f} elements/s")
        print(f"cell touches per update: {touches} (d={args.d})")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glava", description="Graph-stream summaries with node-hashed sketches.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="summarise a stream file")
    p.add_argument("--input", required=True, help="stream file, or - for stdin")
    p.add_argument("--output", required=True, help="summary file to write")
    add_sizing_args(p)
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer a query from a saved summary")
    p.add_argument("--summary", required=True)
    p.add_argument("--format", choices=("table", "records"), default="records")
    qs = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    q = qs.add_parser("edge")
    q.add_argument("a")
    q.add_argument("b")
    q = qs.add_parser("reach")
    q.add_argument("a")
    q.add_argument("b")
    for kind in ("flow", "degree"):
        q = qs.add_parser(kind)
        q.add_argument("a")
        q.add_argument("--dir", choices=("in", "out", "undirected"), default="in" if kind == "flow" else "out")
    q = qs.add_parser("subgraph")
    q.add_argument("--pattern", required=True, help="pattern file, one 'src dst' edge per line")
    q.add_argument("--mode", choices=("sum", "count"), default="sum")
    q.add_argument("--fast", action="store_true", help="sum of per-edge minima")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("monitor", help="threshold alarms on a node's flow over a piped stream")
    p.add_argument("--node", required=True)
    p.add_argument("--dir", choices=("in", "out", "undirected"))
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--below", action="store_true", help="alarm when the flow would fall below")
    p.add_argument("--input", default="-")
    p.add_argument("--summary", help="continue from a saved summary instead of a fresh one")
    p.add_argument("--save", help="write the summary here at end of stream")
    add_sizing_args(p)
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("validate", help="empirical check of the edge-error bound")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.add_argument("--injective", action="store_true", help="collision-free table hashing")
    add_model_args(p, 20_000)
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="shape comparison, build throughput and update cost")
    p.add_argument("--schedules", default="square;mixed", help="';'-separated schedules")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--cell-budget", type=int, default=1024)
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int)
    add_model_args(p, 100_000)
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on --help and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (UsageError, *USAGE_ERRORS) as exc:
        print(f"glava: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"glava: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"glava: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
