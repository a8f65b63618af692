"""
Hong-Ou-Mandel at one beamsplitter
==================================

Two identical photons, one per input, always leave together. Give them
orthogonal internal labels and they split half the time. Partial overlap
interpolates between the two.
"""

import numpy as np

from qwalk import (
    Mode, ModeUnitary, balanced_beamsplitter, beamsplitter_b2, jpd_from_state,
    lift_and_apply, mixed_jpd, product_state,
)

U = ModeUnitary.from_matrix(balanced_beamsplitter())
out = lift_and_apply(U, product_state([Mode(0), Mode(1)]))
for occ, amp in out.amplitudes.items():
    print({md.position: n for md, n in occ}, np.round(amp, 6))
print("JPD\n", jpd_from_state(out).matrix)

# The same thing in the two-mode Fock basis: the |11> column has no |11> part.
print("B2 |11> column:", np.round(beamsplitter_b2()[:, 3].real, 6))

for alpha in np.linspace(0, 1, 5):
    print(f"alpha {alpha:.2f}: coincidence P01 = {mixed_jpd(U, 0, 1, alpha).matrix[0, 1]:.4f}")
