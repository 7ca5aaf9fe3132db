"""Seeded benchmark harness for reactive recomposition.

Each trial draws network parameters from the configured ranges, generates a
network, routes a random request globally and fails one segment of that
route. Every configured algorithm then bridges the same failed view, and its
result is compared against the global Dijkstra baseline of that trial.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path as FsPath

import numpy as np

from .network import GenParams, generate_network, with_failed_edge
from .pathfind import dijkstra
from .reactive import (
    DEFAULT_CELL_FRAC,
    DEFAULT_VAL_FRAC,
    Algorithm,
    SkipReport,
    analyze_stage_skipping,
    recompose,
)

__all__ = [
    "TABLE1_RANGES",
    "ExperimentConfig",
    "TrialRecord",
    "CSV_COLUMNS",
    "sample_scenario",
    "run_trial",
    "run_experiment",
    "summarize_metrics",
    "emit_results",
    "write_results",
    "records_from_json",
    "strip_timing",
    "skip_analysis",
]

TABLE1_RANGES = {
    "nodes": (100, 5000),
    "max_connectivity": (5, 20),
    "network_size": (1000.0, 10000.0),
    "neighbor_radius_frac": (0.05, 0.3),
}

CSV_COLUMNS = (
    "trial,algorithm,num_nodes,num_edges,network_size,failed_u,failed_v,search_ns,region_ns,"
    "path_length,baseline_length,distance_overhead,node_compression,edge_compression,"
    "iterations,fallback,stage_skips"
).split(",")

DEFAULT_ALGORITHMS = (
    Algorithm.RADIUS,
    Algorithm.CELL_DENSITY,
    Algorithm.TWO_PHASED,
    Algorithm.GLOBAL_DIJKSTRA,
)


@dataclass
class ExperimentConfig:
    trials: int = 10
    algorithms: tuple[Algorithm, ...] = DEFAULT_ALGORITHMS
    nodes: tuple[int, int] = TABLE1_RANGES["nodes"]
    max_connectivity: tuple[int, int] = TABLE1_RANGES["max_connectivity"]
    network_size: tuple[float, float] = TABLE1_RANGES["network_size"]
    neighbor_radius_frac: tuple[float, float] = TABLE1_RANGES["neighbor_radius_frac"]
    cell_size: float | None = None  # absolute; None means cell_size_frac x network size
    cell_size_frac: float = DEFAULT_CELL_FRAC
    val_frac: float = DEFAULT_VAL_FRAC
    seed: int = 0
    skip_stages: bool = True
    early_exit: bool = False
    strict_ranges: bool = True
    jobs: int = 1

    def __post_init__(self):
        self.algorithms = tuple(Algorithm.parse(a) if isinstance(a, str) else a for a in self.algorithms)
        for name in TABLE1_RANGES:
            lo, hi = getattr(self, name)
            setattr(self, name, (lo, hi))
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.algorithms:
            raise ValueError("no algorithms configured")
        for name, (tlo, thi) in TABLE1_RANGES.items():
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: empty range {lo}..{hi}")
            if self.strict_ranges and (lo < tlo or hi > thi):
                raise ValueError(f"{name}: range {lo}..{hi} outside {tlo}..{thi}; set strict_ranges=False to override")
        if self.cell_size is not None and not self.cell_size > 0:
            raise ValueError("cell_size must be positive")
        if not self.cell_size_frac > 0 or not self.val_frac > 0:
            raise ValueError("cell_size_frac and val_frac must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = [a.value for a in self.algorithms]
        for name in TABLE1_RANGES:
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class TrialRecord:
    trial: int
    algorithm: str
    num_nodes: int
    num_edges: int
    network_size: float
    failed_u: int
    failed_v: int
    search_ns: int = 0
    region_ns: int = 0
    path_length: float | None = None
    baseline_length: float | None = None
    distance_overhead: float | None = None
    node_compression: float | None = None
    edge_compression: float | None = None
    iterations: int = 0
    fallback: bool = False
    stage_skips: tuple[tuple[str, bool], ...] = ()
    skipped: bool = False
    path: tuple[int, ...] | None = None
    allowed_node_counts: tuple[int, ...] = ()

    @property
    def total_ns(self) -> int:
        return self.search_ns + self.region_ns

    def to_dict(self) -> dict:
        d = asdict(self)
        for key, val in d.items():
            if isinstance(val, float):
                d[key] = _round9(val)
        d["stage_skips"] = [[s, k] for s, k in self.stage_skips]
        d["path"] = None if self.path is None else list(self.path)
        d["allowed_node_counts"] = list(self.allowed_node_counts)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TrialRecord:
        d = dict(d)
        d["stage_skips"] = tuple((s, bool(k)) for s, k in d.get("stage_skips", ()))
        d["path"] = None if d.get("path") is None else tuple(d["path"])
        d["allowed_node_counts"] = tuple(d.get("allowed_node_counts", ()))
        return cls(**d)

    def rounded(self) -> TrialRecord:
        """Copy with floats at the 9 significant digits used on output."""
        return replace(self, **{
            f.name: _round9(getattr(self, f.name))
            for f in fields(self) if isinstance(getattr(self, f.name), float)
        })


def _round9(x: float) -> float:
    return float(f"{x:.9g}")


def _uniform(rng, lo, hi, integer=False):
    if integer:
        return int(rng.integers(lo, hi + 1))
    return float(lo if lo == hi else rng.uniform(lo, hi))


def sample_params(config: ExperimentConfig, rng: np.random.Generator) -> GenParams:
    return GenParams(
        num_nodes=_uniform(rng, *config.nodes, integer=True),
        max_connectivity=_uniform(rng, *config.max_connectivity, integer=True),
        network_size=_uniform(rng, *config.network_size),
        neighbor_radius_frac=_uniform(rng, *config.neighbor_radius_frac),
        seed=int(rng.integers(2**31 - 1)),
    )


def sample_scenario(config: ExperimentConfig, rng: np.random.Generator):
    """Network and failed segment for one trial.

    Returns ``(net, (u, v))`` where ``(u, v)`` lies on the global shortest
    path between a random source and destination, in travel direction.
    """
    net = generate_network(sample_params(config, rng))
    ids = net.ids
    s, t = (int(x) for x in rng.choice(ids, size=2, replace=False))
    route = dijkstra(net, s, t)[0].nodes  # generated networks are connected
    k = int(rng.integers(len(route) - 1))
    return net, (route[k], route[k + 1])


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def run_trial(config: ExperimentConfig, trial: int) -> list[TrialRecord]:
    net, (u, v) = sample_scenario(config, _trial_rng(config.seed, trial))
    view = with_failed_edge(net, u, v)
    base = dict(
        trial=trial,
        num_nodes=net.num_nodes,
        num_edges=net.num_edges,
        network_size=net.network_size,
        failed_u=u,
        failed_v=v,
    )
    baseline = dijkstra(view, u, v)
    if baseline is None:
        return [TrialRecord(algorithm=a.value, skipped=True, **base) for a in config.algorithms]
    baseline_length = baseline[0].total_length
    cell_size = config.cell_size or config.cell_size_frac * net.network_size
    out = []
    for algo in config.algorithms:
        res = recompose(view, u, v, algo, cell_size=cell_size, val_frac=config.val_frac,
                        skip_stages=config.skip_stages, early_exit=config.early_exit)
        length = None if res.path is None else res.path.total_length
        out.append(TrialRecord(
            algorithm=algo.value,
            search_ns=res.search_elapsed,
            region_ns=res.region_build_elapsed,
            path_length=length,
            baseline_length=baseline_length,
            distance_overhead=None if length is None else length / baseline_length,
            node_compression=res.allowed_node_counts[-1] / view.num_nodes,
            edge_compression=res.allowed_edge_counts[-1] / view.num_edges,
            iterations=res.iterations,
            fallback=res.fell_back_to_global,
            stage_skips=tuple((s.stage, s.skipped) for s in res.stage_skips),
            path=None if res.path is None else res.path.nodes,
            allowed_node_counts=tuple(res.allowed_node_counts),
            **base,
        ))
    return out


def _run_one(args):
    return run_trial(*args)


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """All trial records, ordered by trial id then configured algorithm order."""
    jobs = config.jobs or os.cpu_count() or 1
    work = [(config, t) for t in range(config.trials)]
    if jobs > 1 and config.trials > 1:
        with ProcessPoolExecutor(jobs) as pool:
            chunks = list(pool.map(_run_one, work))
    else:
        chunks = [_run_one(w) for w in work]
    return [rec for chunk in chunks for rec in chunk]


def strip_timing(records):
    return [replace(r, search_ns=0, region_ns=0) for r in records]


def _stats(values) -> dict:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return {"mean": None, "median": None, "p95": None}
    return {
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "p95": float(np.percentile(arr, 95)),
    }


def _mean(values):
    return float(np.mean(values)) if len(values) else None


def summarize_metrics(records) -> dict:
    """Per-algorithm aggregates; time ratios are taken per trial, then averaged."""
    records = list(records)
    if not records:
        raise ValueError("no records to summarise")
    live = [r for r in records if not r.skipped]
    baseline = {r.trial: r for r in live if r.algorithm == Algorithm.GLOBAL_DIJKSTRA.value}
    out = {
        "trials": len({r.trial for r in records}),
        "skipped_trials": len({r.trial for r in records if r.skipped}),
        "algorithms": {},
    }
    for algo in sorted({r.algorithm for r in live}):
        rows = sorted((r for r in live if r.algorithm == algo), key=lambda r: r.trial)
        found = [r for r in rows if r.distance_overhead is not None]
        search_ratio, total_ratio = [], []
        for r in rows:
            ref = baseline.get(r.trial)
            if ref is not None and ref.search_ns > 0:
                search_ratio.append(r.search_ns / ref.search_ns)
                total_ratio.append(r.total_ns / ref.total_ns)
        out["algorithms"][algo] = {
            "n": len(rows),
            "search_ns": _stats([r.search_ns for r in rows]),
            "total_ns": _stats([r.total_ns for r in rows]),
            "mean_distance_overhead": _mean([r.distance_overhead for r in found]),
            "mean_node_compression": _mean([r.node_compression for r in rows]),
            "mean_edge_compression": _mean([r.edge_compression for r in rows]),
            "mean_iterations": _mean([r.iterations for r in rows]),
            "fallback_rate": _mean([float(r.fallback) for r in rows]),
            "search_time_ratio_vs_global": _mean(search_ratio),
            "total_time_ratio_vs_global": _mean(total_ratio),
        }
    return out


def _cell(val) -> str:
    if val is None:
        return ""
    if isinstance(val, bool):
        return "1" if val else "0"
    if isinstance(val, float):
        return f"{val:.9g}"
    return str(val)


def _csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        row = []
        for col in CSV_COLUMNS:
            if col == "stage_skips":
                row.append(";".join(f"{s}={int(k)}" for s, k in r.stage_skips))
            else:
                row.append(_cell(getattr(r, col)))
        w.writerow(row)
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float):
        return _round9(obj) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def emit_results(records, summary=None, fmt: str = "csv") -> str:
    """Render records as CSV, or records plus summary as JSON."""
    fmt = fmt.lower()
    if fmt == "csv":
        return _csv(records)
    if fmt == "json":
        doc = {"records": [r.to_dict() for r in records], "summary": _clean(summary or {})}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def records_from_json(text: str) -> list[TrialRecord]:
    return [TrialRecord.from_dict(d) for d in json.loads(text)["records"]]


def write_results(out_dir, records, summary=None) -> tuple[FsPath, FsPath]:
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out / "results.csv", out / "results.json"
    csv_path.write_text(emit_results(records, summary, "csv"), encoding="utf-8")
    json_path.write_text(emit_results(records, summary, "json"), encoding="utf-8")
    return csv_path, json_path


def skip_analysis(config: ExperimentConfig, scenarios: int, seed: int | None = None) -> SkipReport:
    """Stage-skipping report over random scenarios drawn from ``config``."""

    def draw(rng):
        while True:
            net, (u, v) = sample_scenario(config, rng)
            view = with_failed_edge(net, u, v)
            if dijkstra(view, u, v) is not None:
                return view, u, v

    return analyze_stage_skipping(draw, scenarios, config.seed if seed is None else seed, config.val_frac)
