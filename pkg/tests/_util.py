"""Shared test helpers (independent of the library's own machinery)."""

import numpy as np


def haar_unitary(n, rng):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def hadamard_line_oracle(half_width, steps, start_position, start_coin):
    """
    Dense single-walker Hadamard walk written directly from
    H|x,+-1> = (|x,-1> +- |x,1>)/sqrt(2), S|x,c> = |x+c,c>.

    Returns psi[x + L, k] with k = 0 for c = -1 and k = 1 for c = +1.
    """
    L = half_width
    psi = np.zeros((2 * L + 1, 2), dtype=complex)
    psi[start_position + L, 0 if start_coin == -1 else 1] = 1.0
    s = 1 / np.sqrt(2)
    for _ in range(steps):
        minus, plus = psi[:, 0].copy(), psi[:, 1].copy()
        # H on the coin: |-1> -> (|-1> - |1>)/sqrt2, |+1> -> (|-1> + |1>)/sqrt2
        new_minus = s * (minus + plus)
        new_plus = s * (plus - minus)
        assert abs(new_minus[0]) == 0 and abs(new_plus[-1]) == 0, "walker reached the edge"
        psi = np.zeros_like(psi)
        psi[:-1, 0] = new_minus[1:]
        psi[1:, 1] = new_plus[:-1]
    return psi
