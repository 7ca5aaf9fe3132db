import io
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from skyway.network import (
    EmptyNetworkError,
    GenParams,
    Node,
    ParseError,
    SkywayNetwork,
    UnknownEdgeError,
    ValidationError,
    generate_network,
    load_network,
    save_network,
    with_failed_edge,
)

from conftest import A, B, C, D, E, NET5_COORDS, NET5_EDGES


def adjacency_symmetric(net):
    for u in net.ids.tolist():
        for v, _ in net.neighbors(u):
            if u not in {m for m, _ in net.neighbors(v)}:
                return False
    return True


def net5_file():
    return json.dumps({
        "nodes": [{"id": i, "x": x, "y": y} for i, (x, y) in NET5_COORDS.items()],
        "edges": [{"u": u, "v": v} for u, v in NET5_EDGES],
        "meta": {"network_size": 26.0},
    })


def test_load_net5_lengths():
    net = load_network(io.StringIO(net5_file()))
    assert net.num_nodes == 5 and net.num_edges == 6
    assert net.edge(A, C).length == pytest.approx(math.sqrt(41), rel=1e-12)
    assert net.edge(A, B).length == 10.0
    assert net.bbox == (0.0, -6.0, 20.0, 20.0)
    assert net.network_size == 26.0
    assert adjacency_symmetric(net)


def test_load_rejects_dangling_edge():
    doc = json.loads(net5_file())
    doc["edges"].append({"u": 0, "v": 99})
    with pytest.raises(ValidationError, match="99"):
        load_network(json.dumps(doc))


def test_load_rejects_empty_nodes():
    with pytest.raises(ValidationError):
        load_network('{"nodes": [], "edges": []}')


def test_load_rejects_duplicate_ids():
    doc = json.loads(net5_file())
    doc["nodes"].append({"id": 0, "x": 1, "y": 1})
    with pytest.raises(ValidationError, match="duplicate"):
        load_network(json.dumps(doc))


def test_load_rejects_wrong_length():
    doc = json.loads(net5_file())
    doc["edges"][0]["length"] = 11.0
    with pytest.raises(ValidationError):
        load_network(json.dumps(doc))


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as err:
        load_network('{"nodes": [\n{"id": 0, "x": 1,, "y": 2}]}')
    assert err.value.line == 2


def test_parse_error_reports_field():
    with pytest.raises(ParseError) as err:
        load_network('{"nodes": [{"id": 0, "x": "one", "y": 2}], "edges": []}')
    assert err.value.field == "nodes[0].x"


def test_round_trip_net5(net5):
    again = load_network(save_network(net5))
    assert again == net5


def test_save_to_stream(net5):
    buf = io.StringIO()
    text = save_network(net5, buf)
    assert buf.getvalue() == text


def test_single_node_saves_but_fails_reload():
    net = SkywayNetwork([Node(0, 1.0, 2.0)], [])
    text = save_network(net)
    json.loads(text)
    with pytest.raises(ValidationError, match="no edges"):
        load_network(text)


def test_generate_example_invariants():
    params = GenParams(100, 5, 1000.0, 0.1, seed=42)
    net = generate_network(params)
    assert all(e.length <= 100.0 for e in net.edges())
    assert adjacency_symmetric(net)
    # connected: BFS reaches everyone
    seen, todo = {0}, [0]
    while todo:
        for v, _ in net.neighbors(todo.pop()):
            if v not in seen:
                seen.add(v)
                todo.append(v)
    assert len(seen) == net.num_nodes
    assert net.ids.tolist() == list(range(net.num_nodes))


@pytest.mark.parametrize("seed", range(30))
def test_generate_two_nodes(seed):
    params = GenParams(2, 1, 10.0, 1.0, seed=seed)
    try:
        net = generate_network(params)
    except EmptyNetworkError:
        # the two points landed more than one radius (10) apart
        import numpy as np

        pts = np.random.default_rng(seed).uniform(0, 10, size=(2, 2))
        assert math.dist(*pts) > 10
        return
    assert net.num_nodes == 2 and net.num_edges == 1
    (e,) = net.edges()
    assert e.length == pytest.approx(math.dist(net.position(0), net.position(1)), rel=1e-12)


def test_generate_is_deterministic():
    params = GenParams(300, 8, 2000.0, 0.1, seed=7)
    a, b = generate_network(params), generate_network(params)
    assert a == b
    assert (a.coords == b.coords).all()


def test_generate_empty_graph_error():
    with pytest.raises(EmptyNetworkError):
        generate_network(GenParams(5, 3, 1000.0, 1e-6, seed=1))


@pytest.mark.parametrize("kw", [
    dict(num_nodes=1), dict(max_connectivity=0), dict(neighbor_radius_frac=0.0), dict(neighbor_radius_frac=1.5),
])
def test_genparams_validation(kw):
    base = dict(num_nodes=10, max_connectivity=3, network_size=100.0, neighbor_radius_frac=0.2)
    base.update(kw)
    with pytest.raises(ValueError):
        GenParams(**base)


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(2, 400),
    k=st.integers(1, 20),
    size=st.floats(100, 10000),
    frac=st.floats(0.05, 1.0),
    seed=st.integers(0, 2**31 - 1),
)
def test_generated_edges_within_radius(n, k, size, frac, seed):
    try:
        net = generate_network(GenParams(n, k, size, frac, seed))
    except EmptyNetworkError:
        return
    assert all(e.length <= frac * size for e in net.edges())
    assert adjacency_symmetric(net)


def test_generated_1000_round_trip():
    net = generate_network(GenParams(1000, 10, 5000.0, 0.1, seed=3))
    assert load_network(save_network(net)) == net


def test_failed_view(net5):
    view = with_failed_edge(net5, A, B)
    assert {v for v, _ in view.neighbors(A)} == {C, D}
    assert not view.has_edge(A, B) and not view.has_edge(B, A)
    assert net5.has_edge(A, B)
    assert view.num_edges == net5.num_edges - 1
    assert view.nodes is net5.nodes
    assert set(view.edges()) == set(net5.edges()) - {net5.edge(A, B)}
    assert {v for v, _ in view.adjacency[B]} == {C, D, E}
    with pytest.raises(UnknownEdgeError):
        view.edge(B, A)


def test_failing_missing_edge(net5):
    with pytest.raises(UnknownEdgeError):
        with_failed_edge(net5, A, E)


def test_failed_view_symmetry_on_generated():
    net = generate_network(GenParams(200, 6, 1000.0, 0.15, seed=11))
    e = next(iter(net.edges()))
    view = with_failed_edge(net, e.u, e.v)
    assert adjacency_symmetric(view)
    removed = {x.key for x in net.edges()} - {x.key for x in view.edges()}
    assert removed == {e.key}
