import math

import pytest

from skyway.network import Edge, Node, SkywayNetwork

# NET5: A(0,0) B(10,0) C(5,4) D(5,-6) E(20,20) as ids 0..4
A, B, C, D, E = range(5)
NET5_COORDS = {A: (0.0, 0.0), B: (10.0, 0.0), C: (5.0, 4.0), D: (5.0, -6.0), E: (20.0, 20.0)}
NET5_EDGES = [(A, B), (A, C), (C, B), (A, D), (D, B), (B, E)]
ACB = 2 * math.sqrt(41)


def make_net(coords, pairs, seed=None):
    nodes = [Node(i, float(x), float(y)) for i, (x, y) in coords.items()]
    edges = []
    for u, v in pairs:
        length = math.dist(coords[u], coords[v])
        edges.append(Edge(u, v, length, length, length))
    return SkywayNetwork(nodes, edges, seed=seed)


@pytest.fixture
def net5():
    return make_net(NET5_COORDS, NET5_EDGES)


def random_small_net(rng, n_max=10, p=None):
    """Random connected-or-not geometric graph on <= n_max nodes."""
    n = int(rng.integers(2, n_max + 1))
    pts = rng.uniform(0, 100, size=(n, 2))
    prob = rng.uniform(0.2, 0.7) if p is None else p
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < prob]
    if not pairs:
        pairs = [(0, 1)]
    return make_net({i: tuple(pts[i]) for i in range(n)}, pairs)


# one line per acceptance criterion, printed after the test run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
