"""
Two walkers on a Grover lattice
===============================

Two indistinguishable walkers start on the centre of a 2D grid, in different
directed edges. Every vertex uses the Grover coin of its degree.
"""

import numpy as np

from qwalk import (
    Mode, correlation_entropy, jpd_two_walker_closed_form, lattice2d_graph,
    meeting_probability, walk_unitary,
)

w = h = 5
graph = lattice2d_graph(w, h)
centre = (h // 2) * w + w // 2
left, right, down, up = graph.neighborhood(centre)

U = walk_unitary(graph, 6)
x, y = Mode(centre, left), Mode(centre, right)

for kind in ("indistinguishable", "distinguishable"):
    jpd = jpd_two_walker_closed_form(U, x, y, kind)
    print(f"{kind:>17}: meet {meeting_probability(jpd):.4f}, entropy {correlation_entropy(jpd):.4f} bits")

# Marginal occupation of the grid by either walker (indistinguishable case).
jpd = jpd_two_walker_closed_form(U, x, y)
grid = np.zeros((h, w))
for v, q in zip(jpd.positions, jpd.matrix.sum(axis=1)):
    grid[v // w, v % w] = q
print(np.array2string(grid[::-1], precision=3))
