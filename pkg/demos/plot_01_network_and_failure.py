"""
Skyway networks and segment failures
====================================

A skyway network is an undirected graph of rooftop nodes joined by straight
flight segments. This script builds a small network by hand, generates a
random one, and shows how a failed segment is removed without copying the
network.
"""

import math

from skyway.network import (
    Edge,
    GenParams,
    Node,
    SkywayNetwork,
    generate_network,
    loads_network,
    save_network,
    with_failed_edge,
)

# A five-node network: A(0,0) B(10,0) C(5,4) D(5,-6) E(20,20).
coords = {0: (0, 0), 1: (10, 0), 2: (5, 4), 3: (5, -6), 4: (20, 20)}
pairs = [(0, 1), (0, 2), (2, 1), (0, 3), (3, 1), (1, 4)]
nodes = [Node(i, x, y) for i, (x, y) in coords.items()]
edges = []
for u, v in pairs:
    d = math.dist(coords[u], coords[v])
    # cost and battery use default to the segment length
    edges.append(Edge(u, v, d, d, d))
net = SkywayNetwork(nodes, edges)
print("nodes:", net.num_nodes, "edges:", net.num_edges)
print("network size (longer bbox side):", net.network_size)

# Neighbours come back sorted by id, each with the segment length.
for nbr, length in net.neighbors(0):
    print(f"  A -> {nbr}: {length:.3f}")

# Failing A-B gives a view: only A and B see different neighbour lists.
view = with_failed_edge(net, 0, 1)
print("A-B present in network:", net.has_edge(0, 1), "| in failed view:", view.has_edge(0, 1))
print("edges in view:", view.num_edges)

# Network files are JSON and round-trip exactly.
text = save_network(net)
assert loads_network(text) == net
print("network file:", len(text), "bytes of JSON")

# Random networks: uniform points, each joined to its nearest neighbours
# within a radius, then trimmed to the largest connected component.
params = GenParams(num_nodes=2000, max_connectivity=8, network_size=2000.0,
                   neighbor_radius_frac=0.1, seed=1)
big = generate_network(params)
deg = [len(big.neighbors(n)) for n in big.ids.tolist()]
print(f"generated {big.num_nodes} nodes, {big.num_edges} edges, mean degree {sum(deg) / len(deg):.2f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 6))
    for e in big.edges():
        (x0, y0), (x1, y1) = big.position(e.u), big.position(e.v)
        ax.plot([x0, x1], [y0, y1], color="0.8", lw=0.4)
    ax.scatter(big.coords[:, 0], big.coords[:, 1], s=2)
    ax.set_aspect("equal")
    ax.set_title("generated skyway network")
    fig.savefig("network.png", dpi=120)
    print("saved network.png")
