"""Instrumented shortest-path engines over a network or failed-edge view.

All engines share one restriction rule: with ``allowed`` given, an edge may
be used only when both of its endpoints are allowed. Ties between equal
tentative distances are broken by the smaller node id.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

__all__ = [
    "Path",
    "SearchStats",
    "PreconditionError",
    "OracleSizeError",
    "dijkstra",
    "astar",
    "bellman_ford",
    "brute_force_shortest",
    "path_length",
]

BRUTE_FORCE_LIMIT = 12


class PreconditionError(ValueError):
    pass


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    total_length: float

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def segments(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes, self.nodes[1:]))

    def uses_edge(self, u: int, v: int) -> bool:
        return any({a, b} == {u, v} for a, b in self.segments)

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "total_length": self.total_length}


@dataclass
class SearchStats:
    nodes_considered: int = 0
    edges_considered: int = 0
    settled: int = 0
    elapsed: int = 0  # nanoseconds


def path_length(net, nodes) -> float:
    """Sum of edge lengths along ``nodes`` in traversal order."""
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        for m, w in net.neighbors(a):
            if m == b:
                total += w
                break
        else:
            raise ValueError(f"({a}, {b}) is not an edge")
    return total


def _check(net, src, dst, allowed):
    for end in (src, dst):
        if end not in net:
            raise PreconditionError(f"unknown node {end}")
        if allowed is not None and end not in allowed:
            raise PreconditionError(f"node {end} excluded by the allowed set")


def _unwind(pred, dst) -> tuple[int, ...]:
    out = [dst]
    while pred[out[-1]] is not None:
        out.append(pred[out[-1]])
    return tuple(reversed(out))


def dijkstra(net, src: int, dst: int, allowed=None, early_exit: bool = False):
    """Shortest ``src``->``dst`` path, or None when unreachable.

    Returns ``(Path, SearchStats)``. By default every node reachable inside
    the search space is settled, so the cost tracks the size of that space;
    ``early_exit`` stops as soon as ``dst`` is settled.
    """
    _check(net, src, dst, allowed)
    t0 = time.perf_counter_ns()
    stats = SearchStats(nodes_considered=1)
    dist = {src: 0.0}
    pred = {src: None}
    done = set()
    heap = [(0.0, src)]
    neighbors = net.neighbors
    found = False
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        stats.settled += 1
        if u == dst:
            found = True
            if early_exit:
                break
        for v, w in neighbors(u):
            stats.edges_considered += 1
            if v in done or (allowed is not None and v not in allowed):
                continue
            nd = d + w
            old = dist.get(v)
            if old is None or nd < old:
                if old is None:
                    stats.nodes_considered += 1
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    stats.elapsed = time.perf_counter_ns() - t0
    if not found:
        return None
    return Path(_unwind(pred, dst), dist[dst]), stats


def astar(net, src: int, dst: int, allowed=None, early_exit: bool = True):
    """A* with the straight-line distance to ``dst`` as heuristic.

    Edge lengths are Euclidean, so the heuristic is consistent; a settled
    node is still reopened on strict improvement to absorb rounding. The
    search is goal-directed; ``early_exit`` is accepted for interface parity
    and ignored.
    """
    _check(net, src, dst, allowed)
    t0 = time.perf_counter_ns()
    stats = SearchStats(nodes_considered=1)
    tx, ty = net.position(dst)
    position = net.position

    def h(n):
        x, y = position(n)
        return math.hypot(x - tx, y - ty)

    g = {src: 0.0}
    pred = {src: None}
    closed = set()
    heap = [(h(src), 0.0, src)]
    neighbors = net.neighbors
    found = False
    while heap:
        _, gu, u = heapq.heappop(heap)
        if u in closed or gu > g[u]:
            continue
        closed.add(u)
        stats.settled += 1
        if u == dst:
            found = True
            break
        for v, w in neighbors(u):
            stats.edges_considered += 1
            if allowed is not None and v not in allowed:
                continue
            nd = gu + w
            old = g.get(v)
            if old is None or nd < old:
                if old is None:
                    stats.nodes_considered += 1
                g[v] = nd
                pred[v] = u
                closed.discard(v)
                heapq.heappush(heap, (nd + h(v), nd, v))
    stats.elapsed = time.perf_counter_ns() - t0
    if not found:
        return None
    return Path(_unwind(pred, dst), g[dst]), stats


def bellman_ford(net, src: int, dst: int, allowed=None, early_exit: bool = False):
    """Bellman-Ford over the undirected edge list.

    Runs at most |V|-1 relaxation rounds and stops after a round without
    change; ``early_exit`` is accepted for interface parity and ignored.
    """
    _check(net, src, dst, allowed)
    t0 = time.perf_counter_ns()
    stats = SearchStats()
    arcs = []
    for e in net.edges():
        if allowed is None or (e.u in allowed and e.v in allowed):
            arcs.append((e.u, e.v, e.length))
            arcs.append((e.v, e.u, e.length))
    arcs.sort()
    dist = {src: 0.0}
    pred = {src: None}
    n = net.num_nodes if allowed is None else len(allowed)
    for _ in range(max(n - 1, 0)):
        changed = False
        for u, v, w in arcs:
            stats.edges_considered += 1
            du = dist.get(u)
            if du is None:
                continue
            nd = du + w
            old = dist.get(v)
            if old is None or nd < old:
                dist[v] = nd
                pred[v] = u
                changed = True
        if not changed:
            break
    stats.nodes_considered = stats.settled = len(dist)
    stats.elapsed = time.perf_counter_ns() - t0
    if dst not in dist:
        return None
    return Path(_unwind(pred, dst), dist[dst]), stats


def brute_force_shortest(net, src: int, dst: int, allowed=None):
    """Exhaustive simple-path enumeration. Test oracle for tiny graphs only."""
    pool = set(net.ids.tolist()) if allowed is None else set(allowed)
    if len(pool) > BRUTE_FORCE_LIMIT:
        raise OracleSizeError(f"brute force limited to {BRUTE_FORCE_LIMIT} nodes, got {len(pool)}")
    _check(net, src, dst, allowed)
    best = None

    def walk(u, seen, trail, length):
        nonlocal best
        if u == dst:
            if best is None or length < best[1]:
                best = (tuple(trail), length)
            return
        for v, w in net.neighbors(u):
            if v in pool and v not in seen:
                seen.add(v)
                trail.append(v)
                walk(v, seen, trail, length + w)
                trail.pop()
                seen.discard(v)

    walk(src, {src}, [src], 0.0)
    return None if best is None else Path(*best)
