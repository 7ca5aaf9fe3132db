"""Drone delivery services, composition plans and failure handling.

A plan is a chain of per-segment services from the request source to its
destination. When a segment becomes unavailable the plan is repaired by a
reactive recomposition between the segment's endpoints (or, for the global
strategy, by a fresh route from the segment start to the destination).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from .network import DroneProfile, with_failed_edge
from .pathfind import Path, PreconditionError, dijkstra
from .reactive import (
    DEFAULT_VAL_FRAC,
    Algorithm,
    FailureType,
    RecompositionResult,
    global_recompose,
    recompose,
)

__all__ = [
    "DEFAULT_DRONE",
    "DroneDeliveryService",
    "CustomerDeliveryRequest",
    "CompositionPlan",
    "FailureEvent",
    "NoPathError",
    "SpliceMismatchError",
    "compose_initial",
    "splice_plan",
    "handle_failure",
    "make_failure",
]

DEFAULT_DRONE = DroneProfile()


class NoPathError(RuntimeError):
    pass


class SpliceMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class DroneDeliveryService:
    service_id: str
    drone: DroneProfile
    start_location: int
    end_location: int
    start_time: float
    end_time: float
    qos: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.start_location == self.end_location:
            raise ValueError("a service must move between two distinct nodes")
        if self.end_time < self.start_time:
            raise ValueError("service ends before it starts")

    @property
    def length(self) -> float:
        return self.qos["length"]

    def to_dict(self) -> dict:
        return {
            "service_id": self.service_id,
            "drone": self.drone.id,
            "start_location": self.start_location,
            "end_location": self.end_location,
            "start_time": self.start_time,
            "end_time": self.end_time,
            "qos": dict(self.qos),
        }


@dataclass(frozen=True)
class CustomerDeliveryRequest:
    source: int
    destination: int
    start_time: float = 0.0
    package_weight: float = 1.0

    def __post_init__(self):
        if self.source == self.destination:
            raise ValueError("source and destination must differ")
        if not self.package_weight > 0:
            raise ValueError("package weight must be positive")


@dataclass(frozen=True)
class CompositionPlan:
    request: CustomerDeliveryRequest
    services: tuple[DroneDeliveryService, ...]
    speed: float = 1.0

    @property
    def total_length(self) -> float:
        return sum(s.length for s in self.services)

    @property
    def nodes(self) -> list[int]:
        if not self.services:
            return [self.request.source]
        return [self.services[0].start_location] + [s.end_location for s in self.services]

    def service(self, service_id: str) -> tuple[int, DroneDeliveryService]:
        for k, s in enumerate(self.services):
            if s.service_id == service_id:
                return k, s
        raise KeyError(f"no service {service_id!r} in plan")

    def validate(self) -> None:
        """Raise ValueError unless the services form a timed chain from source to destination."""
        if not self.services:
            raise ValueError("empty plan")
        if self.services[0].start_location != self.request.source:
            raise ValueError("plan does not start at the request source")
        if self.services[-1].end_location != self.request.destination:
            raise ValueError("plan does not end at the request destination")
        for prev, nxt in zip(self.services, self.services[1:]):
            if prev.end_location != nxt.start_location:
                raise ValueError(f"services {prev.service_id} and {nxt.service_id} do not chain")
            if nxt.start_time < prev.end_time:
                raise ValueError(f"services {prev.service_id} and {nxt.service_id} overlap in time")
        if len({s.service_id for s in self.services}) != len(self.services):
            raise ValueError("duplicate service ids")

    def to_dict(self) -> dict:
        r = self.request
        return {
            "request": {
                "source": r.source,
                "destination": r.destination,
                "start_time": r.start_time,
                "package_weight": r.package_weight,
            },
            "speed": self.speed,
            "services": [s.to_dict() for s in self.services],
            "total_length": self.total_length,
        }


@dataclass(frozen=True)
class FailureEvent:
    failure_type: FailureType
    failed_service: str
    location: tuple[float, float]
    timestamp: float
    failed_edge: tuple[int, int]


def _qos(edge, speed) -> dict:
    return {
        "length": edge.length,
        "cost": edge.cost,
        "battery": edge.battery,
        "flight_time": edge.length / speed,
    }


def _chain(net, nodes, start_time, speed, ids, drone) -> list[DroneDeliveryService]:
    out = []
    t = start_time
    for sid, (u, v) in zip(ids, zip(nodes, nodes[1:])):
        qos = _qos(net.edge(u, v), speed)
        end = t + qos["flight_time"]
        out.append(DroneDeliveryService(sid, drone, u, v, t, end, qos))
        t = end
    return out


def compose_initial(
    net, request: CustomerDeliveryRequest, speed: float = 1.0, drone: DroneProfile = DEFAULT_DRONE
) -> CompositionPlan:
    """Plan along the global shortest path, services timed back to back."""
    if not speed > 0:
        raise ValueError("speed must be positive")
    found = dijkstra(net, request.source, request.destination)
    if found is None:
        raise NoPathError(f"destination {request.destination} unreachable from {request.source}")
    nodes = found[0].nodes
    ids = [f"DDS-{k:04d}" for k in range(len(nodes) - 1)]
    return CompositionPlan(request, tuple(_chain(net, nodes, request.start_time, speed, ids, drone)), speed)


def make_failure(net, plan: CompositionPlan, service_id: str, timestamp: float | None = None,
                 failure_type: FailureType = FailureType.INFRASTRUCTURE) -> FailureEvent:
    """Failure event for one planned service, located at its segment midpoint."""
    _, svc = plan.service(service_id)
    (ux, uy), (vx, vy) = net.position(svc.start_location), net.position(svc.end_location)
    return FailureEvent(
        failure_type,
        service_id,
        ((ux + vx) / 2, (uy + vy) / 2),
        svc.start_time if timestamp is None else timestamp,
        (svc.start_location, svc.end_location),
    )


def _locate(plan: CompositionPlan, failure: FailureEvent) -> tuple[int, DroneDeliveryService]:
    k, svc = plan.service(failure.failed_service)
    if {svc.start_location, svc.end_location} != set(failure.failed_edge):
        raise SpliceMismatchError(
            f"failed edge {failure.failed_edge} is not the segment of service {svc.service_id}"
        )
    return k, svc


def _retime(net, plan, prefix, new_nodes, new_ids, tail, t0):
    """Chain ``new_nodes`` from ``t0`` and shift the untouched tail after it."""
    drone = prefix[-1].drone if prefix else (tail[0].drone if tail else DEFAULT_DRONE)
    middle = _chain(net.base, new_nodes, t0, plan.speed, new_ids, drone)
    t = middle[-1].end_time if middle else t0
    rest = []
    for s in tail:
        dur = s.end_time - s.start_time
        rest.append(replace(s, start_time=t, end_time=t + dur))
        t += dur
    return CompositionPlan(plan.request, tuple(prefix) + tuple(middle) + tuple(rest), plan.speed)


def splice_plan(original: CompositionPlan, failure: FailureEvent, subpath: Path, net) -> CompositionPlan:
    """Replace the failed segment of ``original`` by ``subpath``.

    ``subpath`` must run from the failed service's start node to its end
    node. The result is a walk, so it may revisit nodes of the original
    plan. Times are reassigned from the failed service onward.
    """
    k, svc = _locate(original, failure)
    if subpath.nodes[0] != svc.start_location or subpath.nodes[-1] != svc.end_location:
        raise SpliceMismatchError(
            f"subpath {subpath.nodes[0]}->{subpath.nodes[-1]} does not bridge "
            f"{svc.start_location}->{svc.end_location}"
        )
    if subpath.uses_edge(*failure.failed_edge):
        raise SpliceMismatchError("subpath traverses the failed segment")
    ids = [f"{svc.service_id}.r{j}" for j in range(len(subpath.nodes) - 1)]
    return _retime(net, original, original.services[:k], subpath.nodes, ids,
                   original.services[k + 1:], svc.start_time)


def handle_failure(
    net,
    plan: CompositionPlan,
    failure: FailureEvent,
    strategy: Algorithm | str = Algorithm.TWO_PHASED,
    *,
    cell_size: float | None = None,
    val_frac: float = DEFAULT_VAL_FRAC,
) -> tuple[CompositionPlan, RecompositionResult]:
    """Repair ``plan`` after ``failure`` with the chosen strategy.

    Local strategies bridge the broken segment and splice the bridge in.
    ``GLOBAL_DIJKSTRA`` reroutes from the segment start straight to the
    destination over the whole failed network.
    """
    strategy = Algorithm.parse(strategy) if isinstance(strategy, str) else strategy
    k, svc = _locate(plan, failure)
    if failure.timestamp > svc.start_time:
        raise PreconditionError(
            f"service {svc.service_id} was already entered at t={svc.start_time}; "
            f"failure reported at t={failure.timestamp}"
        )
    view = with_failed_edge(net, *failure.failed_edge)
    u, v = svc.start_location, svc.end_location

    if strategy is Algorithm.GLOBAL_DIJKSTRA:
        result = global_recompose(view, u, plan.request.destination)
        if result.path is None:
            raise NoPathError(f"destination {plan.request.destination} unreachable after failure")
        ids = [f"{svc.service_id}.g{j}" for j in range(len(result.path.nodes) - 1)]
        return _retime(view, plan, plan.services[:k], result.path.nodes, ids, (), svc.start_time), result

    result = recompose(view, u, v, strategy, cell_size=cell_size, val_frac=val_frac)
    if result.path is None:
        raise NoPathError(f"segment {u}->{v} cannot be bridged after failure")
    return splice_plan(plan, failure, result.path, view), result
