"""Command-line entry point: ``skyway {generate,recompose,bench,skip-analysis}``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import (
    ExperimentConfig,
    TABLE1_RANGES,
    run_experiment,
    skip_analysis,
    strip_timing,
    summarize_metrics,
    write_results,
)
from .network import GenParams, NetworkError, generate_network, load_network, save_network, with_failed_edge
from .pathfind import PreconditionError
from .reactive import DEFAULT_CELL_FRAC, DEFAULT_VAL_FRAC, Algorithm, recompose


def _default_seed() -> int:
    raw = os.environ.get("SKYWAY_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"SKYWAY_SEED must be an integer, got {raw!r}")


def _algorithm(text: str) -> Algorithm:
    try:
        return Algorithm.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown algorithm {text!r}; choose from {', '.join(a.value for a in Algorithm)}"
        ) from None


def _algorithms(text: str) -> tuple[Algorithm, ...]:
    return tuple(_algorithm(t) for t in text.split(",") if t.strip())


def _edge(text: str) -> tuple[int, int]:
    try:
        u, v = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'u,v' node ids, got {text!r}") from None
    return u, v


def _range(kind):
    def parse(text: str):
        parts = text.split(",")
        try:
            vals = [kind(p) for p in parts]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected 'lo,hi' or a single value, got {text!r}") from None
        if len(vals) == 1:
            vals = vals * 2
        if len(vals) != 2:
            raise argparse.ArgumentTypeError(f"expected 'lo,hi' or a single value, got {text!r}")
        return tuple(vals)

    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skyway", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    g = sub.add_parser("generate", help="write a random network file")
    g.add_argument("--nodes", type=int, default=1000)
    g.add_argument("--size", type=float, default=1000.0, help="network size (side of the square map)")
    g.add_argument("--max-connectivity", type=int, default=10)
    g.add_argument("--neighbor-radius-frac", type=float, default=0.1)
    g.add_argument("--seed", type=int, default=seed, help="default: $SKYWAY_SEED or 0")
    g.add_argument("--out", default="-", help="output file, '-' for stdout")

    r = sub.add_parser("recompose", help="bridge one failed segment and print the result as JSON")
    r.add_argument("--network", required=True, help="network file")
    r.add_argument("--fail", type=_edge, required=True, metavar="U,V")
    r.add_argument("--algorithm", type=_algorithm, default=Algorithm.TWO_PHASED,
                   help=f"one of {', '.join(a.value for a in Algorithm)} (default two-phase)")
    r.add_argument("--cell-size", type=float, default=None,
                   help=f"cell size for cell-density (default {DEFAULT_CELL_FRAC} x network size)")
    r.add_argument("--val-frac", type=float, default=DEFAULT_VAL_FRAC)
    r.add_argument("--no-skip", action="store_true", help="disable two-phase stage skipping")
    r.add_argument("--early-exit", action="store_true", help="stop Dijkstra at the target")
    r.add_argument("--no-timing", action="store_true", help="zero all elapsed fields")

    b = sub.add_parser("bench", help="run a seeded benchmark sweep")
    b.add_argument("--config", help="JSON file mirroring ExperimentConfig; flags given explicitly override it")
    b.add_argument("--out", required=True, help="output directory for results.csv / results.json")
    _bench_flags(b)
    b.add_argument("--no-timing", action="store_true", help="zero elapsed fields for reproducible output")
    b.add_argument("--jobs", type=int, default=None, help="worker processes (default: available cores)")

    s = sub.add_parser("skip-analysis", help="classify two-phase stage skips as effective or not")
    s.add_argument("--scenarios", type=int, default=69)
    s.add_argument("--config", help="JSON file mirroring ExperimentConfig (ranges, val_frac)")
    _bench_flags(s, with_algorithms=False)
    s.add_argument("--out", default="-", help="report file, '-' for stdout")
    return p


def _bench_flags(p, with_algorithms=True):
    # defaults of None mean "take from --config or ExperimentConfig"
    p.add_argument("--trials", type=int, default=None)
    if with_algorithms:
        p.add_argument("--algorithms", type=_algorithms, default=None,
                       help="comma list, e.g. radius,cell-density,two-phase,global-dijkstra")
    p.add_argument("--nodes", type=_range(int), default=None, metavar="LO,HI",
                   help=f"default {TABLE1_RANGES['nodes']}")
    p.add_argument("--max-connectivity", type=_range(int), default=None, metavar="LO,HI")
    p.add_argument("--size", dest="network_size", type=_range(float), default=None, metavar="LO,HI")
    p.add_argument("--neighbor-radius-frac", type=_range(float), default=None, metavar="LO,HI")
    p.add_argument("--cell-size", type=float, default=None)
    p.add_argument("--val-frac", type=float, default=None)
    p.add_argument("--seed", type=int, default=None, help="default: $SKYWAY_SEED or 0")
    p.add_argument("--no-skip", action="store_true")
    p.add_argument("--early-exit", action="store_true")
    p.add_argument("--allow-out-of-range", action="store_true", help="permit ranges beyond the standard table")


def _config(args) -> ExperimentConfig:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key in ("trials", "algorithms", "nodes", "max_connectivity", "network_size",
                "neighbor_radius_frac", "cell_size", "val_frac", "seed"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    doc.setdefault("seed", _default_seed())
    if args.no_skip:
        doc["skip_stages"] = False
    if args.early_exit:
        doc["early_exit"] = True
    if args.allow_out_of_range:
        doc["strict_ranges"] = False
    if args.command == "bench":
        if args.jobs is not None:
            doc["jobs"] = args.jobs
        doc.setdefault("jobs", os.cpu_count() or 1)
    return ExperimentConfig.from_dict(doc)


def _emit(text: str, dest: str) -> None:
    if dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def _cmd_generate(args) -> int:
    params = GenParams(args.nodes, args.max_connectivity, args.size, args.neighbor_radius_frac, args.seed)
    _emit(save_network(generate_network(params)), args.out)
    return 0


def _cmd_recompose(args) -> int:
    with open(args.network, encoding="utf-8") as fh:
        net = load_network(fh)
    u, v = args.fail
    view = with_failed_edge(net, u, v)
    res = recompose(view, u, v, args.algorithm, cell_size=args.cell_size, val_frac=args.val_frac,
                    skip_stages=not args.no_skip, early_exit=args.early_exit)
    doc = {"algorithm": args.algorithm.value, "failed_edge": [u, v], **res.to_dict(timing=not args.no_timing)}
    print(json.dumps(doc, indent=1))
    return 0


def _cmd_bench(args) -> int:
    config = _config(args)
    records = run_experiment(config)
    if args.no_timing:
        records = strip_timing(records)
    summary = summarize_metrics(records)
    csv_path, json_path = write_results(args.out, records, summary)
    for algo, row in summary["algorithms"].items():
        ovh = row["mean_distance_overhead"]
        print(f"{algo:16s} n={row['n']:<5d} overhead={ovh if ovh is None else round(ovh, 4)} "
              f"node_compression={row['mean_node_compression']:.4f} fallback={row['fallback_rate']:.3f}")
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _cmd_skip(args) -> int:
    config = _config(args)
    if args.scenarios < 1:
        raise ValueError("--scenarios must be >= 1")
    report = skip_analysis(config, args.scenarios)
    _emit(json.dumps(report.to_dict(), indent=1) + "\n", args.out)
    return 0


COMMANDS = {
    "generate": _cmd_generate,
    "recompose": _cmd_recompose,
    "bench": _cmd_bench,
    "skip-analysis": _cmd_skip,
}


def run_cli(argv=None) -> int:
    """Run the CLI; returns 0 on success, 1 on runtime errors, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (NetworkError, PreconditionError, ValueError, OSError) as exc:
        print(f"skyway {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
