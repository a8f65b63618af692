import numpy as np
import pytest

from _util import haar_unitary
from qwalk import (
    B2_BASIS,
    BeamsplitterNetwork,
    CoherentField,
    Mode,
    ModeUnitary,
    balanced_beamsplitter,
    beamsplitter_b2,
    coherent_conditioned_jpd,
    coherent_propagate,
    coherent_separability_check,
    jpd_from_state,
    jpd_two_walker_closed_form,
    lift_and_apply,
    lifted_matrix,
    load_network,
    mixed_jpd,
    product_state,
    pyramid_network,
    save_network,
)
from qwalk.errors import (
    AlphaOutOfRange,
    DimensionMismatch,
    InvalidLevels,
    NonUnitaryCoin,
    ZeroField,
)

S2 = 1 / np.sqrt(2)
BS = ModeUnitary.from_matrix(balanced_beamsplitter())


def b2_from_lift():
    """Assemble the 6x6 two-mode matrix sector by sector from the Fock lift."""
    out = np.zeros((6, 6), dtype=complex)
    pos = {occ: i for i, occ in enumerate(B2_BASIS)}
    for p in range(3):
        M, basis = lifted_matrix(BS, p)
        for c, bc in enumerate(basis):
            for r, br in enumerate(basis):
                out[pos[tuple(br)], pos[tuple(bc)]] = M[r, c]
    return out


def test_b2_golden_entries():
    B = beamsplitter_b2()
    # |11> column -> (|20> - |02>)/sqrt(2), HOM zero in the corner
    np.testing.assert_allclose(B[:, 3], [0, 0, 0, 0, S2, -S2])
    np.testing.assert_allclose(B[1:3, 1:3], np.array([[-1, 1], [1, 1]]) * S2)
    np.testing.assert_allclose(B.conj().T @ B, np.eye(6), atol=1e-14)


def test_b2_equals_lift():
    np.testing.assert_allclose(b2_from_lift(), beamsplitter_b2(), atol=1e-12)


@pytest.mark.parametrize("L, modes, splitters", [(1, 2, 1), (3, 6, 6), (4, 8, 10), (7, 14, 28)])
def test_pyramid_shape(L, modes, splitters):
    net = pyramid_network(L)
    assert net.total_modes == modes
    assert len(net.output_modes) == modes
    assert len(net.elements) == splitters
    assert len(net.input_modes) == 2


def test_pyramid_adjacent_feed():
    net = pyramid_network(3)
    levels = [net.elements[0:1], net.elements[1:3], net.elements[3:6]]
    for upper, lower in zip(levels, levels[1:]):
        for i, (a, b, _) in enumerate(upper):
            # left output feeds splitter i, right output feeds splitter i+1
            assert a == lower[i][1]
            assert b == lower[i + 1][0]


@pytest.mark.parametrize("L", [1, 2, 4, 7])
def test_pyramid_unitary(L):
    net = pyramid_network(L)
    U = net.unitary()
    assert U.is_unitary()
    sub = U.matrix[np.ix_(net.output_modes, net.input_modes)]
    np.testing.assert_allclose((np.abs(sub) ** 2).sum(axis=0), 1, atol=1e-12)


def test_pyramid_one_walker_binomial():
    # a single photon in the left apex input spreads like a classical Galton board
    L = 5
    U = pyramid_network(L).unitary()
    p = np.abs(U.column(L - 1)) ** 2
    assert p.sum() == pytest.approx(1)
    assert np.count_nonzero(p > 1e-15) >= L


def test_pyramid_invalid():
    for bad in (0, -1, 2.5):
        with pytest.raises(InvalidLevels):
            pyramid_network(bad)


def test_network_validation():
    with pytest.raises(NonUnitaryCoin):
        BeamsplitterNetwork(2, ((0, 1, np.eye(2) * 2),), (0, 1), (0, 1))
    with pytest.raises(DimensionMismatch):
        BeamsplitterNetwork(2, ((0, 2, np.eye(2)),), (0, 1), (0, 1))


def test_network_json_round_trip(tmp_path):
    net = pyramid_network(3)
    path = tmp_path / "net.json"
    save_network(net, path)
    back = load_network(path)
    np.testing.assert_array_equal(back.matrix(), net.matrix())
    assert back.input_modes == net.input_modes


# -- partial distinguishability --------------------------------------------------------

def brute_mixed(U, x, y, alpha):
    """Two-species Fock simulation of alpha a_x a_y + sqrt(1-alpha^2) a_x b_y."""
    U2 = ModeUnitary.from_matrix(U.matrix, species=2)
    same = lift_and_apply(U2, product_state([Mode(x, None, 0), Mode(y, None, 0)]), prune_tol=0)
    diff = lift_and_apply(U2, product_state([Mode(x, None, 0), Mode(y, None, 1)]), prune_tol=0)
    psi = same * alpha + diff * np.sqrt(1 - alpha ** 2)
    return jpd_from_state(psi, positions=range(U.dimension))


def test_mixed_extremes():
    U = pyramid_network(3).unitary()
    ind = jpd_two_walker_closed_form(U, 2, 3)
    np.testing.assert_array_equal(mixed_jpd(U, 2, 3, 1.0).tensor, ind.tensor)
    dist = jpd_two_walker_closed_form(U, 2, 3, "distinguishable").unordered()
    np.testing.assert_allclose(mixed_jpd(U, 2, 3, 0.0).tensor, dist.tensor, atol=1e-15)


def test_mixed_half_on_beamsplitter():
    P = mixed_jpd(BS, 0, 1, S2)
    assert P.matrix[0, 1] == pytest.approx(0.25)
    np.testing.assert_allclose(P.matrix, brute_mixed(BS, 0, 1, S2).matrix, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 0.8, 1.0])
def test_mixed_affine_and_bruteforce(alpha):
    rng = np.random.default_rng(int(alpha * 10))
    U = ModeUnitary.from_matrix(haar_unitary(5, rng))
    P = mixed_jpd(U, 0, 3, alpha)
    P0, P1 = mixed_jpd(U, 0, 3, 0.0), mixed_jpd(U, 0, 3, 1.0)
    np.testing.assert_allclose(P.tensor, alpha ** 2 * P1.tensor + (1 - alpha ** 2) * P0.tensor, atol=1e-12)
    np.testing.assert_allclose(P.tensor, brute_mixed(U, 0, 3, alpha).tensor, atol=1e-12)
    assert P.total() == pytest.approx(1, abs=1e-10)


def test_mixed_alpha_range():
    with pytest.raises(AlphaOutOfRange):
        mixed_jpd(BS, 0, 1, 1.2)


# -- coherent light ------------------------------------------------------------------

def test_coherent_propagate():
    f = CoherentField([1, 0])
    out = coherent_propagate(f, BS)
    np.testing.assert_allclose(np.abs(out.amplitudes), [S2, S2])
    ident = ModeUnitary.from_matrix(np.eye(3))
    np.testing.assert_array_equal(coherent_propagate(CoherentField([1, 2j, 3]), ident).amplitudes, [1, 2j, 3])
    rng = np.random.default_rng(0)
    U = ModeUnitary.from_matrix(haar_unitary(6, rng))
    a = CoherentField(rng.normal(size=6) + 1j * rng.normal(size=6))
    assert coherent_propagate(a, U).mean_photon_number == pytest.approx(a.mean_photon_number, abs=1e-10)
    with pytest.raises(DimensionMismatch):
        coherent_propagate(CoherentField([1, 0, 0]), BS)


def test_coherent_conditioned_beamsplitter():
    jpd = coherent_conditioned_jpd(coherent_propagate(CoherentField([1, 0]), BS), 2)
    assert jpd.matrix[0, 0] == pytest.approx(0.25)
    assert jpd.matrix[0, 1] == pytest.approx(0.5)
    assert jpd.matrix[1, 1] == pytest.approx(0.25)


@pytest.mark.parametrize("seed", range(5))
def test_coherent_matches_fock_same_input(seed):
    rng = np.random.default_rng(seed)
    U = ModeUnitary.from_matrix(haar_unitary(6, rng))
    alpha = np.zeros(6, complex)
    alpha[2] = 0.3 + 0.1j  # the amplitude scale drops out after conditioning
    coh = coherent_conditioned_jpd(coherent_propagate(CoherentField(alpha), U), 2)
    fock = jpd_from_state(lift_and_apply(U, product_state([Mode(2), Mode(2)])), positions=range(6))
    np.testing.assert_allclose(coh.matrix, fock.matrix, atol=1e-10)


def test_coherent_cannot_mimic_hom():
    # no input amplitudes give zero coincidences unless an output is dark
    for a0 in np.linspace(0.1, 1, 4):
        for phase in np.linspace(0, 2 * np.pi, 7):
            beta = coherent_propagate(CoherentField([a0, np.exp(1j * phase)]), BS)
            jpd = coherent_conditioned_jpd(beta, 2)
            if np.min(np.abs(beta.amplitudes)) > 1e-8:
                assert jpd.matrix[0, 1] > 0
            assert coherent_separability_check(jpd) <= 1e-10


def test_coherent_zero_field():
    with pytest.raises(ZeroField):
        coherent_conditioned_jpd(CoherentField([0, 0]), 2)


def test_separability_residuals():
    hom = jpd_two_walker_closed_form(BS, 0, 1)
    assert coherent_separability_check(hom) == pytest.approx(0.5)
    U = pyramid_network(4).unitary()
    dist = jpd_two_walker_closed_form(U, 3, 4, "distinguishable")
    assert coherent_separability_check(dist) <= 1e-10
