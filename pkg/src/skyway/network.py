"""Skyway network data model, random generation, file I/O and failure views.

A skyway network is an undirected geometric graph: nodes are rooftops with
planar coordinates, edges are line-of-sight flight segments whose length is
the Euclidean distance between their endpoints.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import IO, Iterator, Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

__all__ = [
    "Node",
    "Edge",
    "DroneProfile",
    "GenParams",
    "SkywayNetwork",
    "FailedEdgeView",
    "NetworkError",
    "ParseError",
    "ValidationError",
    "EmptyNetworkError",
    "UnknownEdgeError",
    "generate_network",
    "load_network",
    "save_network",
    "dumps_network",
    "loads_network",
    "with_failed_edge",
]

LENGTH_RTOL = 1e-9


class NetworkError(Exception):
    """Base class for network construction and query errors."""


class ParseError(NetworkError, ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class ValidationError(NetworkError, ValueError):
    pass


class EmptyNetworkError(NetworkError, ValueError):
    pass


class UnknownEdgeError(NetworkError, KeyError):
    def __str__(self) -> str:  # KeyError repr-quotes its message otherwise
        return str(self.args[0]) if self.args else ""


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Edge:
    """A skyway segment. ``cost`` and ``battery`` are carried, not routed on."""

    u: int
    v: int
    length: float
    cost: float
    battery: float

    def other(self, n: int) -> int:
        return self.v if n == self.u else self.u

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


@dataclass(frozen=True)
class DroneProfile:
    id: str = "drone-0"
    battery_capacity: float = 1.0e6
    payload_capacity: float = 5.0

    def __post_init__(self):
        if self.battery_capacity <= 0 or self.payload_capacity <= 0:
            raise ValueError("drone capacities must be positive")


@dataclass(frozen=True)
class GenParams:
    num_nodes: int
    max_connectivity: int
    network_size: float
    neighbor_radius_frac: float
    seed: int = 0

    def __post_init__(self):
        if self.num_nodes < 2:
            raise ValueError("num_nodes must be >= 2")
        if self.max_connectivity < 1:
            raise ValueError("max_connectivity must be >= 1")
        if not self.network_size > 0:
            raise ValueError("network_size must be positive")
        if not 0 < self.neighbor_radius_frac <= 1:
            raise ValueError("neighbor_radius_frac must lie in (0, 1]")

    @property
    def neighbor_radius(self) -> float:
        return self.neighbor_radius_frac * self.network_size


def _euclid(a: Node, b: Node) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


class SkywayNetwork:
    """Immutable undirected geometric graph.

    ``adjacency`` maps a node id to a tuple of ``(neighbor_id, Edge)`` pairs
    sorted by neighbor id. ``coords`` is an ``(n, 2)`` array aligned with
    ``ids``; both follow the order of ``nodes``.
    """

    def __init__(self, nodes, edges, seed: int | None = None):
        nodes = tuple(nodes)
        if not nodes:
            raise ValidationError("network has no nodes")
        index: dict[int, int] = {}
        for i, n in enumerate(nodes):
            if n.id in index:
                raise ValidationError(f"duplicate node id {n.id}")
            if not (math.isfinite(n.x) and math.isfinite(n.y)):
                raise ValidationError(f"node {n.id} has non-finite coordinates")
            index[n.id] = i

        adj: dict[int, list[tuple[int, Edge]]] = {n.id: [] for n in nodes}
        seen: set[tuple[int, int]] = set()
        for e in edges:
            if e.u not in index or e.v not in index:
                missing = e.u if e.u not in index else e.v
                raise ValidationError(f"edge ({e.u}, {e.v}) references unknown node {missing}")
            if e.u == e.v:
                raise ValidationError(f"self-loop on node {e.u}")
            if e.key in seen:
                raise ValidationError(f"duplicate edge ({e.u}, {e.v})")
            exact = _euclid(nodes[index[e.u]], nodes[index[e.v]])
            if not e.length > 0:
                raise ValidationError(f"edge ({e.u}, {e.v}) has non-positive length")
            if abs(e.length - exact) > LENGTH_RTOL * exact:
                raise ValidationError(
                    f"edge ({e.u}, {e.v}) length {e.length!r} differs from endpoint distance {exact!r}"
                )
            seen.add(e.key)
            adj[e.u].append((e.v, e))
            adj[e.v].append((e.u, e))

        self.nodes: tuple[Node, ...] = nodes
        self.seed = seed
        self._index = index
        self.adjacency: Mapping[int, tuple[tuple[int, Edge], ...]] = {
            k: tuple(sorted(v, key=lambda p: p[0])) for k, v in adj.items()
        }
        # (neighbor, length) pairs; the hot loop of every search reads these
        self._weights = {k: tuple((m, e.length) for m, e in v) for k, v in self.adjacency.items()}
        self._num_edges = len(seen)
        self.ids = np.fromiter((n.id for n in nodes), dtype=np.int64, count=len(nodes))
        self.coords = np.array([(n.x, n.y) for n in nodes], dtype=float)
        lo = self.coords.min(axis=0)
        hi = self.coords.max(axis=0)
        self.bbox = (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
        self.network_size = max(self.bbox[2] - self.bbox[0], self.bbox[3] - self.bbox[1])

    def __repr__(self) -> str:
        return f"SkywayNetwork(nodes={len(self.nodes)}, edges={self.num_edges})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkywayNetwork):
            return NotImplemented
        return self.nodes == other.nodes and set(self.edges()) == set(other.edges())

    __hash__ = None

    @property
    def base(self) -> SkywayNetwork:
        return self

    @property
    def failed_edge(self) -> tuple[int, int] | None:
        return None

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return self._num_edges

    def __contains__(self, node_id) -> bool:
        return node_id in self._index

    def node(self, node_id: int) -> Node:
        try:
            return self.nodes[self._index[node_id]]
        except KeyError:
            raise KeyError(f"unknown node {node_id}") from None

    def position(self, node_id: int) -> tuple[float, float]:
        n = self.node(node_id)
        return (n.x, n.y)

    def row(self, node_id: int) -> int:
        """Row of ``node_id`` in ``coords``/``ids``."""
        return self._index[node_id]

    def neighbors(self, node_id: int) -> tuple[tuple[int, float], ...]:
        return self._weights[node_id]

    def has_edge(self, u: int, v: int) -> bool:
        return any(m == v for m, _ in self._weights.get(u, ()))

    def edge(self, u: int, v: int) -> Edge:
        for m, e in self.adjacency.get(u, ()):
            if m == v:
                return e
        raise UnknownEdgeError(f"no edge ({u}, {v})")

    def edges(self) -> Iterator[Edge]:
        for u, pairs in self.adjacency.items():
            for v, e in pairs:
                if u < v:
                    yield e

    def distance(self, u: int, v: int) -> float:
        return _euclid(self.node(u), self.node(v))


class FailedEdgeView:
    """Read-only view of a network with one undirected edge removed.

    Node data, coordinates and all untouched adjacency lists are shared with
    the base network.
    """

    def __init__(self, net: SkywayNetwork, u: int, v: int):
        if not net.has_edge(u, v):
            raise UnknownEdgeError(f"no edge ({u}, {v}) to fail")
        self._net = net
        self._failed = (u, v)
        self._override = {
            u: tuple(p for p in net.neighbors(u) if p[0] != v),
            v: tuple(p for p in net.neighbors(v) if p[0] != u),
        }
        self.adjacency = _FailedAdjacency(net.adjacency, u, v)

    def __repr__(self) -> str:
        return f"FailedEdgeView({self._net!r}, failed={self._failed})"

    @property
    def base(self) -> SkywayNetwork:
        return self._net

    @property
    def failed_edge(self) -> tuple[int, int]:
        return self._failed

    nodes = property(lambda self: self._net.nodes)
    ids = property(lambda self: self._net.ids)
    coords = property(lambda self: self._net.coords)
    bbox = property(lambda self: self._net.bbox)
    network_size = property(lambda self: self._net.network_size)
    num_nodes = property(lambda self: self._net.num_nodes)
    seed = property(lambda self: self._net.seed)

    @property
    def num_edges(self) -> int:
        return self._net.num_edges - 1

    def __contains__(self, node_id) -> bool:
        return node_id in self._net

    def node(self, node_id: int) -> Node:
        return self._net.node(node_id)

    def position(self, node_id: int) -> tuple[float, float]:
        return self._net.position(node_id)

    def row(self, node_id: int) -> int:
        return self._net.row(node_id)

    def distance(self, u: int, v: int) -> float:
        return self._net.distance(u, v)

    def _is_failed(self, u: int, v: int) -> bool:
        a, b = self._failed
        return (u == a and v == b) or (u == b and v == a)

    def neighbors(self, node_id: int) -> tuple[tuple[int, float], ...]:
        hit = self._override.get(node_id)
        return hit if hit is not None else self._net.neighbors(node_id)

    def has_edge(self, u: int, v: int) -> bool:
        return not self._is_failed(u, v) and self._net.has_edge(u, v)

    def edge(self, u: int, v: int) -> Edge:
        if self._is_failed(u, v):
            raise UnknownEdgeError(f"edge ({u}, {v}) has failed")
        return self._net.edge(u, v)

    def edges(self) -> Iterator[Edge]:
        for e in self._net.edges():
            if not self._is_failed(e.u, e.v):
                yield e


class _FailedAdjacency(Mapping):
    def __init__(self, base, u, v):
        self._base = base
        self._override = {
            u: tuple(p for p in base[u] if p[0] != v),
            v: tuple(p for p in base[v] if p[0] != u),
        }

    def __getitem__(self, key):
        hit = self._override.get(key)
        return hit if hit is not None else self._base[key]

    def __iter__(self):
        return iter(self._base)

    def __len__(self):
        return len(self._base)


def with_failed_edge(net: SkywayNetwork, u: int, v: int) -> FailedEdgeView:
    """Return a view of ``net`` in which segment ``(u, v)`` is unavailable."""
    if isinstance(net, FailedEdgeView):
        raise NetworkError("only one failed segment per view is supported")
    return FailedEdgeView(net, u, v)


def _make_edge(u: int, v: int, length: float) -> Edge:
    # cost and battery default to the flown distance
    return Edge(u, v, length, cost=length, battery=length)


def generate_network(params: GenParams) -> SkywayNetwork:
    """Random skyway network for the given parameters.

    Nodes are uniform in ``[0, network_size]^2``. Each node proposes edges to
    at most ``max_connectivity`` nearest nodes within the neighbor radius; the
    proposals are symmetrised, and the largest connected component is kept
    and re-indexed ``0..m-1`` in generation order.
    """
    rng = np.random.default_rng(params.seed)
    pts = rng.uniform(0.0, params.network_size, size=(params.num_nodes, 2))
    radius = params.neighbor_radius
    k = min(params.max_connectivity + 1, params.num_nodes)
    dist, nbr = cKDTree(pts).query(pts, k=k, distance_upper_bound=radius)
    dist = np.asarray(dist).reshape(params.num_nodes, k)
    nbr = np.asarray(nbr).reshape(params.num_nodes, k)

    src = np.repeat(np.arange(params.num_nodes), k)
    dst = nbr.ravel()
    ok = (dst < params.num_nodes) & (dst != src)
    lo = np.minimum(src[ok], dst[ok])
    hi = np.maximum(src[ok], dst[ok])
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0) if ok.any() else np.empty((0, 2), int)
    if len(pairs) == 0:
        raise EmptyNetworkError("no edges formed; neighbor radius too small for this node set")

    n = params.num_nodes
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    sizes = np.bincount(labels[pairs[:, 0]], minlength=labels.max() + 1)
    keep_label = int(np.argmax(sizes))
    keep = np.flatnonzero(labels == keep_label)
    new_id = -np.ones(n, dtype=np.int64)
    new_id[keep] = np.arange(len(keep))

    nodes = [Node(int(new_id[i]), float(pts[i, 0]), float(pts[i, 1])) for i in keep]
    edges = []
    for a, b in pairs:
        if labels[a] != keep_label:
            continue
        na, nb = nodes[new_id[a]], nodes[new_id[b]]
        edges.append(_make_edge(na.id, nb.id, _euclid(na, nb)))
    return SkywayNetwork(nodes, edges, seed=params.seed)


def _network_dict(net: SkywayNetwork) -> dict:
    meta = {"network_size": net.network_size}
    if net.seed is not None:
        meta["seed"] = net.seed
    return {
        "nodes": [{"id": n.id, "x": n.x, "y": n.y} for n in net.nodes],
        "edges": [{"u": e.u, "v": e.v, "length": e.length} for e in net.edges()],
        "meta": meta,
    }


def dumps_network(net: SkywayNetwork) -> str:
    return json.dumps(_network_dict(net), indent=1) + "\n"


def save_network(net: SkywayNetwork, dest: IO[str] | None = None) -> str:
    """Serialise ``net`` as network-file JSON; also write it to ``dest`` if given."""
    text = dumps_network(net)
    if dest is not None:
        dest.write(text)
    return text


def _number(obj, key, where, kind=float):
    if key not in obj:
        raise ParseError("missing field", field=f"{where}.{key}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ParseError(f"expected a number, got {val!r}", field=f"{where}.{key}")
    if kind is int:
        if isinstance(val, float) and not val.is_integer():
            raise ParseError(f"expected an integer, got {val!r}", field=f"{where}.{key}")
        return int(val)
    return float(val)


def loads_network(text: str | bytes) -> SkywayNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    raw_nodes = doc.get("nodes")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_nodes, list):
        raise ParseError("expected a list", field="nodes")
    if not isinstance(raw_edges, list):
        raise ParseError("expected a list", field="edges")

    nodes = []
    for i, obj in enumerate(raw_nodes):
        if not isinstance(obj, dict):
            raise ParseError("expected an object", field=f"nodes[{i}]")
        where = f"nodes[{i}]"
        nodes.append(Node(_number(obj, "id", where, int), _number(obj, "x", where), _number(obj, "y", where)))
    if not nodes:
        raise ValidationError("network file has an empty node list")
    by_id = {n.id: n for n in nodes}

    edges = []
    for i, obj in enumerate(raw_edges):
        if not isinstance(obj, dict):
            raise ParseError("expected an object", field=f"edges[{i}]")
        where = f"edges[{i}]"
        u, v = _number(obj, "u", where, int), _number(obj, "v", where, int)
        for end in (u, v):
            if end not in by_id:
                raise ValidationError(f"{where} references unknown node {end}")
        if "length" in obj and obj["length"] is not None:
            length = _number(obj, "length", where)
        else:
            length = _euclid(by_id[u], by_id[v])
        edges.append(_make_edge(u, v, length))
    if not edges:
        raise ValidationError("network file has no edges")

    seed = doc.get("meta", {}).get("seed") if isinstance(doc.get("meta"), dict) else None
    return SkywayNetwork(nodes, edges, seed=seed if isinstance(seed, int) else None)


def load_network(source: IO | str | bytes | os.PathLike) -> SkywayNetwork:
    """Parse network-file JSON from a stream, text, bytes or a filesystem path.

    Plain strings are treated as JSON text; pass a ``pathlib.Path`` to read a file.
    """
    if isinstance(source, os.PathLike):
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    elif hasattr(source, "read"):
        source = source.read()
    return loads_network(source)
