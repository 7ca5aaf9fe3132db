"""Reactive recomposition of a broken skyway segment.

Given a failed-edge view and the two nodes the failure disconnected, each
algorithm searches for a replacement path inside a growing bounding region
and falls back to a whole-network search once the region stops paying off.
"""
from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import (
    NodeSetRegion,
    WholeNetwork,
    build_cell_grid,
    build_circle,
    build_partial_areas,
    build_rhombus_regions,
    nodes_in_region,
)
from .pathfind import Path, PreconditionError, astar, bellman_ford, dijkstra

__all__ = [
    "Algorithm",
    "FailureType",
    "StageRecord",
    "RecompositionResult",
    "radius_recompose",
    "cell_density_recompose",
    "two_phased_recompose",
    "global_recompose",
    "recompose",
    "allowed_edge_count",
    "SkipEntry",
    "SkipReport",
    "analyze_stage_skipping",
    "DEFAULT_CELL_FRAC",
    "DEFAULT_VAL_FRAC",
]

RADIUS_GROWTH = 0.2
RADIUS_CAP = 0.5
GLOBAL_NODE_FRAC = 0.5
DEFAULT_CELL_FRAC = 0.05
DEFAULT_VAL_FRAC = 0.5

STAGES = (("triangle", 0.25), ("midpoint_rhombus", 0.5), ("rectangle", 1.0))


class Algorithm(str, Enum):
    RADIUS = "radius"
    CELL_DENSITY = "cell-density"
    TWO_PHASED = "two-phase"
    GLOBAL_DIJKSTRA = "global-dijkstra"
    ASTAR = "astar"
    BELLMAN_FORD = "bellman-ford"

    @classmethod
    def parse(cls, name: str) -> Algorithm:
        key = name.strip().lower().replace("_", "-")
        aliases = {
            "two-phased": cls.TWO_PHASED,
            "global": cls.GLOBAL_DIJKSTRA,
            "dijkstra": cls.GLOBAL_DIJKSTRA,
            "a*": cls.ASTAR,
            "cell": cls.CELL_DENSITY,
        }
        if key in aliases:
            return aliases[key]
        for member in cls:
            if member.value == key or member.name.lower().replace("_", "-") == key:
                return member
        raise ValueError(f"unknown algorithm {name!r}")

    @property
    def is_local(self) -> bool:
        return self in (Algorithm.RADIUS, Algorithm.CELL_DENSITY, Algorithm.TWO_PHASED)


class FailureType(str, Enum):
    ENVIRONMENTAL = "environmental"
    OPERATIONAL = "operational"
    NAVIGATIONAL = "navigational"
    REGULATORY = "regulatory"
    INFRASTRUCTURE = "infrastructure"
    SERVICE_LEVEL = "service-level"


@dataclass(frozen=True)
class StageRecord:
    stage: str
    skipped: bool
    node_count: int = 0
    found: bool = False

    def to_dict(self) -> dict:
        return {"stage": self.stage, "skipped": self.skipped, "node_count": self.node_count, "found": self.found}


@dataclass
class RecompositionResult:
    path: Path | None
    regions: list = field(default_factory=list)
    fell_back_to_global: bool = False
    stage_skips: list[StageRecord] = field(default_factory=list)
    region_build_elapsed: int = 0
    search_elapsed: int = 0
    allowed_node_counts: list[int] = field(default_factory=list)
    allowed_edge_counts: list[int] = field(default_factory=list)
    added_node_counts: list[int] = field(default_factory=list)
    final_allowed: frozenset = field(default=frozenset(), repr=False)

    @property
    def iterations(self) -> int:
        return len(self.regions)

    @property
    def total_elapsed(self) -> int:
        return self.region_build_elapsed + self.search_elapsed

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "path": None if self.path is None else self.path.to_dict(),
            "iterations": self.iterations,
            "fell_back_to_global": self.fell_back_to_global,
            "regions": [_region_summary(r) for r in self.regions],
            "allowed_node_counts": list(self.allowed_node_counts),
            "allowed_edge_counts": list(self.allowed_edge_counts),
            "added_node_counts": list(self.added_node_counts),
            "stage_skips": [s.to_dict() for s in self.stage_skips],
            "region_build_ns": self.region_build_elapsed if timing else 0,
            "search_ns": self.search_elapsed if timing else 0,
        }


def _region_summary(region) -> dict:
    if isinstance(region, NodeSetRegion):
        return {"kind": "nodes", "size": len(region.ids)}
    return region.to_dict()


def allowed_edge_count(net, allowed) -> int:
    """Edges of ``net`` with both endpoints in ``allowed``."""
    total = 0
    for u in allowed:
        for v, _ in net.neighbors(u):
            if v in allowed:
                total += 1
    return total // 2


class _Run:
    """Accumulates regions, counts and timings for one recomposition."""

    def __init__(self, net, a, b, engine=dijkstra, early_exit=False):
        self.net = net
        self.a, self.b = a, b
        self.engine = engine
        self.early_exit = early_exit
        self.result = RecompositionResult(path=None)

    @contextmanager
    def building(self):
        t0 = time.perf_counter_ns()
        try:
            yield
        finally:
            self.result.region_build_elapsed += time.perf_counter_ns() - t0

    def _record(self, region, allowed, count_edges=True):
        r = self.result
        r.regions.append(region)
        r.allowed_node_counts.append(len(allowed))
        r.allowed_edge_counts.append(allowed_edge_count(self.net, allowed) if count_edges else self.net.num_edges)
        r.final_allowed = frozenset(allowed)

    def search(self, region, allowed) -> bool:
        self._record(region, allowed)
        t0 = time.perf_counter_ns()
        found = self.engine(self.net, self.a, self.b, allowed, early_exit=self.early_exit)
        self.result.search_elapsed += time.perf_counter_ns() - t0
        if found is not None:
            self.result.path = found[0]
            return True
        return False

    def search_global(self, fallback=True) -> bool:
        r = self.result
        r.regions.append(WholeNetwork())
        r.allowed_node_counts.append(self.net.num_nodes)
        r.allowed_edge_counts.append(self.net.num_edges)
        r.final_allowed = frozenset()
        r.fell_back_to_global = fallback
        t0 = time.perf_counter_ns()
        found = self.engine(self.net, self.a, self.b, early_exit=self.early_exit)
        r.search_elapsed += time.perf_counter_ns() - t0
        r.path = None if found is None else found[0]
        return found is not None


def _check_pair(net, a, b):
    for n in (a, b):
        if n not in net:
            raise PreconditionError(f"unknown node {n}")
    if a == b:
        raise PreconditionError("recomposition needs two distinct nodes")


def radius_recompose(
    net, a: int, b: int, *, growth: float = RADIUS_GROWTH, cap: float = RADIUS_CAP, early_exit: bool = False
) -> RecompositionResult:
    """Search inside a circle around the broken segment, growing it on failure.

    The first circle has radius |ab|; each miss adds ``growth`` x network
    size, and once the radius exceeds ``cap`` x network size the whole
    network is searched.
    """
    _check_pair(net, a, b)
    run = _Run(net, a, b, early_exit=early_exit)
    pa, pb = net.position(a), net.position(b)
    size = net.network_size
    radius = math.dist(pa, pb) or growth * size
    while True:
        with run.building():
            circle = build_circle(pa, pb, radius)
            allowed = nodes_in_region(net, circle) | {a, b}
        if run.search(circle, allowed):
            break
        radius += growth * size
        if radius > cap * size:
            run.search_global()
            break
    return run.result


def cell_density_recompose(
    net, a: int, b: int, cell_size: float | None = None, *, early_exit: bool = False
) -> RecompositionResult:
    """Search inside density-scaled squares around the neighbours of a and b.

    Every neighbour (and a, b themselves) gets a square whose half-width is
    the density multiplier of its cell times DO; DO starts at ``cell_size``
    and grows by ``cell_size`` per miss. Once the squares cover the whole
    network the search goes global.
    """
    _check_pair(net, a, b)
    if cell_size is None:
        cell_size = DEFAULT_CELL_FRAC * net.network_size
    if not cell_size > 0:
        raise ValueError("cell_size must be positive")
    run = _Run(net, a, b, early_exit=early_exit)
    with run.building():
        grid = build_cell_grid(net, cell_size)
        nn = {a, b}
        for end in (a, b):
            nn.update(v for v, _ in net.neighbors(end))
        nn = sorted(nn)
        pts = net.coords[[net.row(n) for n in nn]]
    do = cell_size
    while True:
        with run.building():
            squares = build_partial_areas(pts, grid, do)
            allowed = nodes_in_region(net, squares) | {a, b}
            whole = len(allowed) == net.num_nodes or squares.covers_box(net.bbox)
        if whole:
            run.search_global()
            break
        if run.search(squares, allowed):
            break
        do += cell_size
    return run.result


def _grow_by_closest_neighbor(net, allowed: set) -> set:
    """Each member adds its nearest graph neighbour outside the current set."""
    grown = set(allowed)
    for n in sorted(allowed):
        best = None
        for v, w in net.neighbors(n):
            if v in allowed:
                continue
            if best is None or w < best[0] or (w == best[0] and v < best[1]):
                best = (w, v)
        if best is not None:
            grown.add(best[1])
    return grown


def two_phased_recompose(
    net,
    a: int,
    b: int,
    val_frac: float = DEFAULT_VAL_FRAC,
    *,
    skip_stages: bool = True,
    global_frac: float = GLOBAL_NODE_FRAC,
    early_exit: bool = False,
) -> RecompositionResult:
    """Corridor search between a and b, then neighbour-by-neighbour growth.

    Phase 1 tries the triangle, the midpoint rhombus and the full rectangle
    in turn. With ``skip_stages`` a stage is passed over when it holds fewer
    than its area fraction of the rectangle's nodes, counting nodes other
    than a and b. Phase 2 starts from the
    rectangle's nodes and lets every member add its closest graph neighbour
    until a path appears or the set reaches ``global_frac`` of the network.
    """
    _check_pair(net, a, b)
    if not val_frac > 0:
        raise ValueError("val_frac must be positive")
    run = _Run(net, a, b, early_exit=early_exit)
    with run.building():
        rr = build_rhombus_regions(net.position(a), net.position(b), val_frac, net)
        shapes = {"triangle": rr.triangle, "midpoint_rhombus": rr.midpoint_rhombus, "rectangle": rr.full}
        members = {name: nodes_in_region(net, shape) for name, shape in shapes.items()}
    # a and b sit on every region's boundary, so the skip rule compares the
    # candidate nodes between them rather than the raw membership
    ends = {a, b}
    rect_count = len(members["rectangle"] - ends)

    found = False
    allowed: set = set(ends)
    for name, frac in STAGES:
        count = len(members[name] - ends)
        allowed = allowed | members[name]
        if skip_stages and frac < 1 and count < frac * rect_count:
            run.result.stage_skips.append(StageRecord(name, True, count))
            continue
        found = run.search(shapes[name], allowed)
        run.result.stage_skips.append(StageRecord(name, False, count, found))
        if found:
            break

    while not found:
        with run.building():
            grown = _grow_by_closest_neighbor(net, allowed)
            added = len(grown) - len(allowed)
        run.result.added_node_counts.append(added)
        if added == 0 or len(grown) >= global_frac * net.num_nodes:
            run.search_global()
            break
        allowed = grown
        found = run.search(NodeSetRegion(frozenset(allowed)), allowed)
    return run.result


_ENGINES = {
    Algorithm.GLOBAL_DIJKSTRA: dijkstra,
    Algorithm.ASTAR: astar,
    Algorithm.BELLMAN_FORD: bellman_ford,
}


def global_recompose(
    net, a: int, b: int, engine: Callable = dijkstra, *, early_exit: bool = False
) -> RecompositionResult:
    """Whole-network search with the given engine."""
    _check_pair(net, a, b)
    run = _Run(net, a, b, engine, early_exit)
    run.search_global(fallback=False)
    return run.result


def recompose(
    net,
    a: int,
    b: int,
    algorithm: Algorithm | str,
    *,
    cell_size: float | None = None,
    val_frac: float = DEFAULT_VAL_FRAC,
    skip_stages: bool = True,
    early_exit: bool = False,
) -> RecompositionResult:
    """Dispatch to the named algorithm.

    ``early_exit`` makes Dijkstra stop at the target instead of settling the
    whole search space; see :func:`skyway.pathfind.dijkstra`.
    """
    algorithm = Algorithm.parse(algorithm) if isinstance(algorithm, str) else algorithm
    if algorithm is Algorithm.RADIUS:
        return radius_recompose(net, a, b, early_exit=early_exit)
    if algorithm is Algorithm.CELL_DENSITY:
        return cell_density_recompose(net, a, b, cell_size, early_exit=early_exit)
    if algorithm is Algorithm.TWO_PHASED:
        return two_phased_recompose(net, a, b, val_frac, skip_stages=skip_stages, early_exit=early_exit)
    return global_recompose(net, a, b, _ENGINES[algorithm], early_exit=early_exit)


@dataclass(frozen=True)
class SkipEntry:
    scenario: int
    stage: str
    effective: bool
    skip_nodes: int
    noskip_nodes: int

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "stage": self.stage,
            "classification": "EFFECTIVE" if self.effective else "INEFFECTIVE",
            "skip_nodes": self.skip_nodes,
            "noskip_nodes": self.noskip_nodes,
        }


@dataclass
class SkipReport:
    scenarios: int
    entries: list[SkipEntry] = field(default_factory=list)
    effective_runs: list[int] = field(default_factory=list)
    ineffective_runs: list[int] = field(default_factory=list)
    # final allowed-node counts per scenario: with skipping, without skipping
    run_nodes: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def effective(self) -> int:
        return sum(e.effective for e in self.entries)

    @property
    def ineffective(self) -> int:
        return sum(not e.effective for e in self.entries)

    def _mean_nodes(self, runs, which=0) -> float | None:
        if not runs:
            return None
        return float(np.mean([self.run_nodes[s][which] for s in runs]))

    @property
    def mean_effective_nodes(self) -> float | None:
        return self._mean_nodes(self.effective_runs)

    @property
    def mean_ineffective_nodes(self) -> float | None:
        return self._mean_nodes(self.ineffective_runs)

    @property
    def effective_to_ineffective_ratio(self) -> float | None:
        """Mean searched nodes of effective-skip runs over ineffective-skip runs."""
        e, i = self.mean_effective_nodes, self.mean_ineffective_nodes
        return None if e is None or i is None or i == 0 else e / i

    @property
    def ineffective_to_noskip_ratio(self) -> float | None:
        """For ineffective-skip runs: searched nodes with skipping over without."""
        if not self.ineffective_runs:
            return None
        ratios = [self.run_nodes[s][0] / self.run_nodes[s][1] for s in self.ineffective_runs]
        return float(np.mean(ratios))

    def to_dict(self) -> dict:
        return {
            "scenarios": self.scenarios,
            "skips": len(self.entries),
            "effective": self.effective,
            "ineffective": self.ineffective,
            "effective_runs": len(self.effective_runs),
            "ineffective_runs": len(self.ineffective_runs),
            "mean_effective_nodes": self.mean_effective_nodes,
            "mean_ineffective_nodes": self.mean_ineffective_nodes,
            "effective_to_ineffective_node_ratio": self.effective_to_ineffective_ratio,
            "ineffective_to_noskip_node_ratio": self.ineffective_to_noskip_ratio,
            "entries": [e.to_dict() for e in self.entries],
        }


def _final_nodes(result: RecompositionResult) -> int:
    return result.allowed_node_counts[-1] if result.allowed_node_counts else 0


def analyze_stage_skipping(
    source: Sequence | Callable[[np.random.Generator], tuple],
    scenarios: int | None = None,
    seed: int = 0,
    val_frac: float = DEFAULT_VAL_FRAC,
) -> SkipReport:
    """Classify every skipped two-phased stage as effective or ineffective.

    ``source`` is either a sequence of ``(view, a, b)`` fixtures or a
    callable drawing one such scenario from a numpy generator. Each scenario
    runs twice, with and without skipping. A skip is effective when the
    no-skip run searched that stage and found nothing there; it is
    ineffective when the no-skip run found its path in that stage or an
    earlier (nested) one.
    """
    if callable(source):
        if scenarios is None or scenarios < 1:
            raise ValueError("scenarios must be >= 1")
        rng = np.random.default_rng(seed)
        items: Iterable = (source(rng) for _ in range(scenarios))
        total = scenarios
    else:
        items = list(source) if scenarios is None else list(source)[:scenarios]
        total = len(items)
        if total < 1:
            raise ValueError("need at least one scenario")

    order = [name for name, _ in STAGES]
    report = SkipReport(scenarios=total)
    for k, (view, a, b) in enumerate(items):
        with_skip = two_phased_recompose(view, a, b, val_frac, skip_stages=True)
        skipped = [s.stage for s in with_skip.stage_skips if s.skipped]
        if not skipped:
            continue
        no_skip = two_phased_recompose(view, a, b, val_frac, skip_stages=False)
        outcome = {s.stage: s.found for s in no_skip.stage_skips}
        report.run_nodes[k] = (_final_nodes(with_skip), _final_nodes(no_skip))
        all_effective = True
        for stage in skipped:
            if stage in outcome:
                effective = not outcome[stage]
            else:
                # the no-skip run stopped at an earlier stage, nested inside this one
                earlier = order[: order.index(stage)]
                effective = not any(outcome.get(s, False) for s in earlier)
            all_effective &= effective
            report.entries.append(SkipEntry(k, stage, effective, *report.run_nodes[k]))
        (report.effective_runs if all_effective else report.ineffective_runs).append(k)
    return report
