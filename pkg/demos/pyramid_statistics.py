"""
Two photons in a Galton pyramid
===============================

A triangular array of balanced beamsplitters. Two photons enter the apex,
one per input. We compare identical and distinguishable photons through
their single-click marginals and the entropy of the JPD spectrum.
"""

import numpy as np

from qwalk import (
    correlation_entropy, jpd_two_walker_closed_form, l1_distance, pyramid_network,
    single_click_marginal,
)

for L in (4, 7):
    net = pyramid_network(L)
    U = net.unitary()
    x, y = net.input_modes
    ind = jpd_two_walker_closed_form(U, x, y, "indistinguishable")
    dist = jpd_two_walker_closed_form(U, x, y, "distinguishable")
    q_ind, q_dist = single_click_marginal(ind), single_click_marginal(dist)
    print(f"L={L}: {net.total_modes} outputs, {len(net.elements)} beamsplitters")
    print("  marginal (indist):", np.round(q_ind, 4))
    print("  marginal (dist):  ", np.round(q_dist, 4))
    print(f"  L1 = {l1_distance(q_ind, q_dist):.4f}")
    print(f"  H indist = {correlation_entropy(ind):.4f} bits, H dist = {correlation_entropy(dist):.4f}")

# The marginals hardly move, but the joint statistics do.
net = pyramid_network(4)
ind = jpd_two_walker_closed_form(net.unitary(), *net.input_modes)
print(np.array2string(ind.matrix, precision=3, suppress_small=True))
