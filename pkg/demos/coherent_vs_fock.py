"""
Can classical light fake it?
============================

A coherent state through a linear network stays a product of coherent
states. Post-selecting two photons reproduces the Fock statistics when both
photons share one input, but never the HOM pattern.
"""

import numpy as np

from qwalk import (
    CoherentField, Mode, coherent_conditioned_jpd, coherent_propagate,
    coherent_separability_check, jpd_from_state, jpd_two_walker_closed_form,
    lift_and_apply, product_state, pyramid_network,
)

net = pyramid_network(4)
U = net.unitary()
x, y = net.input_modes

alpha = np.zeros(U.dimension, complex)
alpha[x] = 1.0
coh = coherent_conditioned_jpd(coherent_propagate(CoherentField(alpha), U), 2)
fock = jpd_from_state(lift_and_apply(U, product_state([Mode(x), Mode(x)])), positions=range(U.dimension))
print("same input, max |coherent - Fock| =", np.abs(coh.matrix - fock.matrix).max())

# Separate inputs: coherent light gives a product JPD, photons do not.
alpha[y] = 1.0
coh2 = coherent_conditioned_jpd(coherent_propagate(CoherentField(alpha), U), 2)
ind = jpd_two_walker_closed_form(U, x, y)
print("separability residual, coherent:", coherent_separability_check(coh2))
print("separability residual, photons: ", coherent_separability_check(ind))
