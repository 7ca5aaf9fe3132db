"""
Bounding regions around a broken segment
========================================

Local recomposition searches only inside a region built around the failed
segment a-b. Three kinds of region are used: a circle, a union of squares
sized by local node density, and a corridor of nested polygons.
"""

import numpy as np

from skyway.geometry import (
    build_cell_grid,
    build_circle,
    build_partial_areas,
    build_rhombus_regions,
    nodes_in_region,
)
from skyway.network import GenParams, generate_network

net = generate_network(GenParams(1500, 8, 1000.0, 0.1, seed=2))
a = 0
b = net.neighbors(a)[0][0]
pa, pb = net.position(a), net.position(b)
print(f"segment {a}-{b}: {pa} -> {pb}")

# Circle on the midpoint with radius |ab|; it grows in steps of 0.2 x size.
circle = build_circle(pa, pb, float(np.hypot(pb[0] - pa[0], pb[1] - pa[1])))
print("circle holds", len(nodes_in_region(net, circle)), "nodes")

# The density grid: counts per cell, spread CO = max - min, classes in thirds.
grid = build_cell_grid(net, 0.05 * net.network_size)
print("grid", grid.rows, "x", grid.cols, "CO =", grid.co)
print("class histogram (1 dense, 2 average, 3 sparse):",
      np.bincount(grid.classes.ravel(), minlength=4)[1:])

# Squares around a, b and their neighbours; sparse cells get wider squares.
seeds = {a, b} | {v for v, _ in net.neighbors(a)} | {v for v, _ in net.neighbors(b)}
pts = net.coords[[net.row(n) for n in sorted(seeds)]]
squares = build_partial_areas(pts, grid, grid.cell_size)
print("square half-widths:", sorted(set(squares.half_widths.tolist())))
print("squares hold", len(nodes_in_region(net, squares)), "nodes")

# The corridor: a rectangle, its midpoint rhombus and a triangle on the
# denser side. Areas halve at each step.
rr = build_rhombus_regions(pa, pb, 0.5, net)
for name, shape in (("rectangle", rr.full), ("rhombus", rr.midpoint_rhombus), ("triangle", rr.triangle)):
    print(f"{name:9s} area {shape.area:10.2f}  nodes {len(nodes_in_region(net, shape))}")
print("triangle on the", "positive" if rr.positive_side else "negative", "side of a->b")
