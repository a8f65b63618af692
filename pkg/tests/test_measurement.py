import json
import math

import numpy as np
import pytest

from _util import haar_unitary
from qwalk import (
    JPD,
    FockState,
    Mode,
    ModeUnitary,
    balanced_beamsplitter,
    correlation_entropy,
    detection_probability,
    jpd_from_state,
    jpd_two_walker_closed_form,
    l1_distance,
    lift_and_apply,
    meeting_probability,
    product_state,
    project_single_detection,
    pyramid_network,
    single_click_marginal,
)
from qwalk.errors import (
    DegenerateMatrix,
    LengthMismatch,
    MixedWalkerNumber,
    UnsupportedWalkerCount,
    ZeroProbabilityEvent,
)
from qwalk.measurement import DEFAULT_ENTROPY_BASE, marginal_to_csv

BS = ModeUnitary.from_matrix(balanced_beamsplitter())
BS2 = ModeUnitary.from_matrix(balanced_beamsplitter(), species=2)


def hom_state():
    return lift_and_apply(BS, product_state([Mode(0), Mode(1)]))


def dist_state():
    return lift_and_apply(BS2, product_state([Mode(0, None, 0), Mode(1, None, 1)]))


def test_hom_jpd():
    jpd = jpd_from_state(hom_state())
    np.testing.assert_allclose(jpd.matrix, [[0.5, 0], [0, 0.5]], atol=1e-15)
    assert jpd.kind == "indistinguishable"
    assert meeting_probability(jpd) == pytest.approx(1)


def test_distinguishable_jpd_species_resolved():
    jpd = jpd_from_state(dist_state(), species_resolved=True)
    np.testing.assert_allclose(jpd.matrix, np.full((2, 2), 0.25))
    assert jpd.total() == pytest.approx(1)
    assert meeting_probability(jpd) == pytest.approx(0.5)


def test_distinguishable_jpd_position_only_is_unordered():
    jpd = jpd_from_state(dist_state())
    assert jpd.kind == "mixed"
    np.testing.assert_allclose(jpd.matrix, [[0.25, 0.5], [0.5, 0.25]])
    assert jpd.total() == pytest.approx(1)


def test_single_walker_distribution():
    out = lift_and_apply(BS, product_state([Mode(0)]))
    jpd = jpd_from_state(out)
    np.testing.assert_allclose(jpd.tensor, [0.5, 0.5])


def test_coin_is_traced_over():
    psi = FockState.from_counts({((Mode(0, "a"), 1), (Mode(0, "b"), 1)): 0.6,
                                 ((Mode(1, "a"), 2),): 0.8})
    jpd = jpd_from_state(psi)
    assert jpd.matrix[0, 0] == pytest.approx(0.36)
    assert jpd.matrix[1, 1] == pytest.approx(0.64)


def test_mixed_walker_number_rejected():
    with pytest.raises(MixedWalkerNumber):
        jpd_from_state(product_state([Mode(0)]) + product_state([Mode(0), Mode(1)]))


def test_three_walker_tensor():
    U = ModeUnitary.from_matrix(haar_unitary(4, np.random.default_rng(0)))
    out = lift_and_apply(U, product_state([Mode(0), Mode(1), Mode(2)]))
    jpd = jpd_from_state(out, positions=range(4))
    assert jpd.tensor.shape == (4, 4, 4)
    assert jpd.total() == pytest.approx(1, abs=1e-10)
    np.testing.assert_allclose(jpd.tensor, np.transpose(jpd.tensor, (2, 0, 1)))


# -- closed form -------------------------------------------------------------------

def test_closed_form_hom_and_dist():
    np.testing.assert_allclose(jpd_two_walker_closed_form(BS, 0, 1).matrix, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(
        jpd_two_walker_closed_form(BS, 0, 1, "distinguishable").matrix, np.full((2, 2), 0.25))


def test_closed_form_same_input():
    # both walkers in mode 0 of a beamsplitter: {1/4, 1/2, 1/4}
    jpd = jpd_two_walker_closed_form(BS, 0, 0)
    assert jpd.matrix[0, 0] == pytest.approx(0.25)
    assert jpd.matrix[0, 1] == pytest.approx(0.5)
    assert jpd.total() == pytest.approx(1)
    rng = np.random.default_rng(9)
    U = ModeUnitary.from_matrix(haar_unitary(5, rng))
    fock = jpd_from_state(lift_and_apply(U, product_state([Mode(2), Mode(2)])), positions=range(5))
    np.testing.assert_allclose(jpd_two_walker_closed_form(U, 2, 2).matrix, fock.matrix, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_closed_form_matches_fock(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    U = ModeUnitary.from_matrix(haar_unitary(n, rng))
    x, y = (int(v) for v in rng.choice(n, 2, replace=False))
    fock = jpd_from_state(lift_and_apply(U, product_state([Mode(x), Mode(y)]), prune_tol=0),
                          positions=range(n))
    np.testing.assert_allclose(jpd_two_walker_closed_form(U, x, y).matrix, fock.matrix, atol=1e-10)


def test_closed_form_aggregates_coin_modes():
    from qwalk import line_graph, walk_unitary
    U = walk_unitary(line_graph(6), 4)
    x, y = Mode(0, -1), Mode(0, 1)
    closed = jpd_two_walker_closed_form(U, x, y)
    fock = jpd_from_state(lift_and_apply(U, product_state([x, y])), positions=closed.positions)
    np.testing.assert_allclose(closed.matrix, fock.matrix, atol=1e-12)


# -- marginals / meeting ------------------------------------------------------------

def test_single_click_marginals():
    hom = jpd_two_walker_closed_form(BS, 0, 1)
    np.testing.assert_allclose(single_click_marginal(hom), [0.5, 0.5])
    dist = jpd_two_walker_closed_form(BS, 0, 1, "distinguishable")
    np.testing.assert_allclose(single_click_marginal(dist), [0.75, 0.75])
    # unordered view of the same events gives the same marginal
    np.testing.assert_allclose(single_click_marginal(dist.unordered()), [0.75, 0.75])


def test_marginal_csv():
    assert marginal_to_csv([0, 1], [0.5, 0.25]) == "position,value\n0,0.5\n1,0.25\n"


def test_meeting_zero_diagonal():
    assert meeting_probability(JPD(np.array([[0, 1], [1, 0]]), (0, 1), "indistinguishable")) == 0


# -- projection ------------------------------------------------------------------

def test_projection_trivial():
    psi = product_state([Mode(0), Mode(3)])
    post, p = project_single_detection(psi, 0)
    assert p == pytest.approx(1)
    assert detection_probability(post, 3) == pytest.approx(1)


def test_projection_hom_zero():
    with pytest.raises(ZeroProbabilityEvent):
        project_single_detection(hom_state(), 0)


def test_projection_needs_two_walkers():
    with pytest.raises(UnsupportedWalkerCount):
        project_single_detection(product_state([Mode(0)]), 0)


def test_distinguishable_residual_is_single_walker():
    rng = np.random.default_rng(7)
    n = 5
    U = ModeUnitary.from_matrix(haar_unitary(n, rng), species=2)
    psi = lift_and_apply(U, product_state([Mode(0, None, 0), Mode(2, None, 1)]))
    post, p = project_single_detection(psi, 3, species=0)
    assert p == pytest.approx(abs(U.matrix[3, 0]) ** 2)
    v = U.column(Mode(2, None, 1))[n:]
    residual = [detection_probability(post, m, species=1) for m in range(n)]
    np.testing.assert_allclose(residual, np.abs(v) ** 2, atol=1e-10)
    # amplitudes factor as U_{x,m} * v_j up to the conditioning norm
    for j in range(n):
        amp = post.amplitude({Mode(3, None, 0): 1, Mode(j, None, 1): 1})
        assert amp == pytest.approx(U.matrix[3, 0] * v[j] / math.sqrt(p), abs=1e-12)


def test_projection_completeness():
    rng = np.random.default_rng(11)
    U = ModeUnitary.from_matrix(haar_unitary(6, rng))
    psi = lift_and_apply(U, product_state([Mode(1), Mode(4)]))
    single = sum(detection_probability(psi, m, 1) for m in range(6))
    double = sum(detection_probability(psi, m, 2) for m in range(6))
    # each single-detection event is seen at two positions
    assert 0.5 * single + double == pytest.approx(1, abs=1e-10)


# -- entropy -----------------------------------------------------------------------

def test_entropy_default_base_pinned():
    assert DEFAULT_ENTROPY_BASE == 2


def test_entropy_identity():
    assert correlation_entropy(np.eye(2) / 2) == pytest.approx(1)
    assert correlation_entropy(np.eye(2) / 2, base="e") == pytest.approx(math.log(2))


def test_entropy_rank_one_zero():
    rng = np.random.default_rng(1)
    u, v = rng.random(6), rng.random(6)
    assert correlation_entropy(np.outer(u, v) / (u.sum() * v.sum())) == 0.0
    dist = jpd_two_walker_closed_form(pyramid_network(4).unitary(), 3, 4, "distinguishable")
    assert correlation_entropy(dist) == 0.0


def test_entropy_hom():
    assert correlation_entropy(jpd_two_walker_closed_form(BS, 0, 1)) == pytest.approx(1)


def test_entropy_degenerate():
    with pytest.raises(DegenerateMatrix):
        correlation_entropy(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        correlation_entropy(np.eye(2), base=10)


# -- l1 / io ------------------------------------------------------------------------

def test_l1():
    assert l1_distance([0.2, 0.8], [0.2, 0.8]) == 0
    assert l1_distance([1, 0], [0, 1]) == 1
    with pytest.raises(LengthMismatch):
        l1_distance([1], [0.5, 0.5])


def test_csv_json_round_trip():
    jpd = jpd_two_walker_closed_form(pyramid_network(3).unitary(), 2, 3)
    back = JPD.from_csv(jpd.to_csv())
    np.testing.assert_array_equal(back.tensor, jpd.tensor)
    assert back.positions == jpd.positions
    back = JPD.from_json(json.loads(json.dumps(jpd.to_json())))
    np.testing.assert_array_equal(back.tensor, jpd.tensor)
    assert back.kind == jpd.kind


def test_csv_layout():
    text = jpd_two_walker_closed_form(BS, 0, 1).to_csv()
    lines = text.splitlines()
    assert lines[0] == "row,col,value"
    assert [ln.split(",")[:2] for ln in lines[1:]] == [["0", "0"], ["0", "1"], ["1", "0"], ["1", "1"]]
