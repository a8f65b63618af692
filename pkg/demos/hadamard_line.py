"""
One walker on a line
====================

A Hadamard walk on the vertices -L..L. Each vertex's coin mixes the two
directed edges leaving it; the step reverses edges, so a walker's coin label
afterwards names the vertex it came from.
"""

import numpy as np

from qwalk import Mode, jpd_from_state, line_graph, lift_and_apply, product_state, walk_unitary

L, steps = 30, 25
graph = line_graph(L)

# Start on the directed edge (0, 1). The coin acts before the first step, and
# from this edge the Hadamard walk drifts to the left.
U = walk_unitary(graph, steps)
out = lift_and_apply(U, product_state([Mode(0, 1)]))
dist = jpd_from_state(out, positions=graph.vertices)

# The distribution is lopsided, unlike a classical random walk.
p = dist.tensor
x = np.array(graph.vertices)
print(f"after {steps} steps: mean {np.dot(x, p):+.3f}, std {np.sqrt(np.dot(x**2, p) - np.dot(x, p)**2):.3f}")
print("classical std would be", np.sqrt(steps).round(3))

for xi, pi in zip(x, p):
    if pi > 1e-3:
        print(f"{xi:+4d} {'#' * int(200 * pi)}")
