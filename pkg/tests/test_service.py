import pytest

from skyway.network import with_failed_edge
from skyway.pathfind import Path, PreconditionError
from skyway.reactive import Algorithm, FailureType
from skyway.service import (
    CompositionPlan,
    CustomerDeliveryRequest,
    DroneDeliveryService,
    NoPathError,
    SpliceMismatchError,
    compose_initial,
    handle_failure,
    make_failure,
    splice_plan,
)

from conftest import A, ACB, B, C, E, make_net


@pytest.fixture
def plan5(net5):
    return compose_initial(net5, CustomerDeliveryRequest(A, E, start_time=100.0))


def test_compose_initial(net5):
    plan = compose_initial(net5, CustomerDeliveryRequest(A, B))
    assert plan.total_length == 10.0
    assert [s.service_id for s in plan.services] == ["DDS-0000"]
    svc = plan.services[0]
    assert svc.qos["length"] == svc.qos["cost"] == svc.qos["battery"] == 10.0
    assert (svc.start_time, svc.end_time) == (0.0, 10.0)
    plan.validate()


def test_compose_timing_with_speed(net5):
    plan = compose_initial(net5, CustomerDeliveryRequest(A, E, start_time=5.0), speed=2.0)
    assert plan.nodes == [A, B, E]
    assert plan.services[0].end_time == pytest.approx(10.0)
    assert plan.services[1].start_time == plan.services[0].end_time
    plan.validate()


def test_compose_unreachable():
    net = make_net({0: (0, 0), 1: (1, 0), 2: (9, 9), 3: (9, 8)}, [(0, 1), (2, 3)])
    with pytest.raises(NoPathError):
        compose_initial(net, CustomerDeliveryRequest(0, 3))


def test_request_and_service_validation():
    with pytest.raises(ValueError):
        CustomerDeliveryRequest(1, 1)
    with pytest.raises(ValueError):
        CustomerDeliveryRequest(1, 2, package_weight=0)
    with pytest.raises(ValueError):
        DroneDeliveryService("x", None, 1, 1, 0, 1)


def test_handle_failure_two_phase(net5, plan5):
    failure = make_failure(net5, plan5, "DDS-0000")
    assert failure.location == (5.0, 0.0) and failure.failed_edge == (A, B)
    new, result = handle_failure(net5, plan5, failure, Algorithm.TWO_PHASED)
    assert new.nodes == [A, C, B, E]
    assert new.total_length == pytest.approx(ACB + plan5.services[1].length, abs=1e-6)
    assert result.path.total_length == pytest.approx(ACB, abs=1e-6)
    assert [s.service_id for s in new.services] == ["DDS-0000.r0", "DDS-0000.r1", "DDS-0001"]
    new.validate()
    assert new.services[-1].start_time == pytest.approx(100.0 + ACB)


@pytest.mark.parametrize("strategy", ["radius", "cell-density", "two-phase", "global-dijkstra", "astar"])
def test_every_strategy_repairs(net5, plan5, strategy):
    failure = make_failure(net5, plan5, "DDS-0000")
    new, _ = handle_failure(net5, plan5, failure, strategy)
    new.validate()
    assert new.nodes[-1] == E
    assert not any({s.start_location, s.end_location} == {A, B} for s in new.services)


def test_global_reroute_never_longer(net5, plan5):
    failure = make_failure(net5, plan5, "DDS-0000")
    local, _ = handle_failure(net5, plan5, failure, Algorithm.TWO_PHASED)
    glob, res = handle_failure(net5, plan5, failure, Algorithm.GLOBAL_DIJKSTRA)
    assert glob.total_length <= local.total_length + 1e-9
    assert all(s.service_id.startswith("DDS-0000.g") for s in glob.services)
    assert not res.fell_back_to_global


def test_failure_after_service_started(net5, plan5):
    failure = make_failure(net5, plan5, "DDS-0000", timestamp=101.0)
    with pytest.raises(PreconditionError):
        handle_failure(net5, plan5, failure)


def test_failure_with_wrong_edge(net5, plan5):
    failure = make_failure(net5, plan5, "DDS-0000")
    bad = type(failure)(failure.failure_type, "DDS-0001", failure.location, 0.0, (A, B))
    with pytest.raises(SpliceMismatchError):
        handle_failure(net5, plan5, bad)


def test_unbridgeable_segment(net5, plan5):
    failure = make_failure(net5, plan5, "DDS-0001", failure_type=FailureType.ENVIRONMENTAL)
    with pytest.raises(NoPathError):
        handle_failure(net5, plan5, failure)


def test_splice_walk_may_revisit():
    # S-A-B-T where the only A-B bridge goes back through S
    coords = {0: (-10, 0), 1: (0, 0), 2: (10, 0), 3: (20, 0), 4: (-10, 10), 5: (10, 10)}
    net = make_net(coords, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 2)])
    plan = compose_initial(net, CustomerDeliveryRequest(0, 3))
    assert plan.nodes == [0, 1, 2, 3]
    failure = make_failure(net, plan, "DDS-0001")
    sub = Path((1, 0, 4, 5, 2), 10 + 10 + 20 + 10)
    new = splice_plan(plan, failure, sub, with_failed_edge(net, 1, 2))
    assert new.nodes == [0, 1, 0, 4, 5, 2, 3]
    new.validate()
    assert new.total_length == pytest.approx(10 + 50 + 10)


def test_splice_mismatch(net5, plan5):
    failure = make_failure(net5, plan5, "DDS-0000")
    view = with_failed_edge(net5, A, B)
    with pytest.raises(SpliceMismatchError):
        splice_plan(plan5, failure, Path((A, C), 5.0), view)
    with pytest.raises(SpliceMismatchError):
        splice_plan(plan5, failure, Path((A, B), 10.0), view)


def test_plan_validate_catches_breaks(net5, plan5):
    s0, s1 = plan5.services
    with pytest.raises(ValueError):
        CompositionPlan(plan5.request, (s1,)).validate()
    with pytest.raises(ValueError):
        CompositionPlan(plan5.request, (s0, s0)).validate()
    with pytest.raises(ValueError):
        CompositionPlan(plan5.request, ()).validate()
    with pytest.raises(KeyError):
        plan5.service("nope")


def test_plan_to_dict(plan5):
    doc = plan5.to_dict()
    assert doc["total_length"] == pytest.approx(10 + 500 ** 0.5)
    assert [s["service_id"] for s in doc["services"]] == ["DDS-0000", "DDS-0001"]
