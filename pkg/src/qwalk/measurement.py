"""
Detection statistics for multi-walker states.

Detectors sit at positions: coin values (and, unless asked otherwise, species
labels) are traced out. A :class:`JPD` stores an ``n``-dimensional tensor of
joint detection probabilities indexed by position, with one of three kinds:

``indistinguishable`` / ``mixed``
    Unordered events. The tensor is symmetric and every permutation of an
    index tuple holds the probability of the same event, so the distribution
    is normalized over sorted index tuples (the lower triangle for two
    walkers).
``distinguishable``
    Species-resolved, ordered events: axis ``k`` is the position of the
    walker with the ``k``-th smallest species label. The whole tensor sums
    to one.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateMatrix,
    LengthMismatch,
    ModeIndexMismatch,
    AmbiguousSpecies,
    UnsupportedWalkerCount,
    ZeroProbabilityEvent,
)
from .evolution import ModeUnitary
from .fock import FockState, _label_key

__all__ = [
    "JPD",
    "KINDS",
    "jpd_from_state",
    "jpd_two_walker_closed_form",
    "single_click_marginal",
    "meeting_probability",
    "detection_probability",
    "project_single_detection",
    "correlation_entropy",
    "l1_distance",
    "marginal_to_csv",
    "DEFAULT_ENTROPY_BASE",
]

KINDS = ("indistinguishable", "distinguishable", "mixed")

# Base 2 reproduces the reference value 1.74 for the 4-level pyramid
# (base e gives 1.20); see tests/test_acceptance.py.
DEFAULT_ENTROPY_BASE = 2

ZERO_PROB = 1e-14


def _multiplicity_factor(shape: tuple) -> np.ndarray:
    """For each index tuple, (number of distinct permutations) of that tuple."""
    n = len(shape)
    out = np.empty(shape)
    for idx in itertools.product(*(range(s) for s in shape)):
        c = Counter(idx)
        denom = 1
        for v in c.values():
            denom *= math.factorial(v)
        out[idx] = math.factorial(n) // denom
    return out


@dataclass(frozen=True, eq=False)
class JPD:
    """Joint detection probabilities over positions (see module docstring)."""

    tensor: np.ndarray
    positions: tuple
    kind: str

    def __post_init__(self):
        t = np.array(self.tensor, dtype=float)
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if t.ndim and any(s != len(self.positions) for s in t.shape):
            raise LengthMismatch(f"tensor shape {t.shape} vs {len(self.positions)} positions")
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)
        object.__setattr__(self, "positions", tuple(self.positions))

    @property
    def walkers(self) -> int:
        return self.tensor.ndim

    @property
    def n_positions(self) -> int:
        return len(self.positions)

    @property
    def matrix(self) -> np.ndarray:
        if self.walkers != 2:
            raise UnsupportedWalkerCount(f"matrix view needs 2 walkers, have {self.walkers}")
        return self.tensor

    @property
    def unordered_events(self) -> bool:
        return self.kind != "distinguishable"

    def total(self) -> float:
        """Total probability under this kind's event convention."""
        if not self.unordered_events:
            return float(self.tensor.sum())
        idx = [i for i in itertools.product(range(self.n_positions), repeat=self.walkers)
               if list(i) == sorted(i)]
        return float(sum(self.tensor[i] for i in idx))

    def unordered(self) -> "JPD":
        """Merge ordered events into unordered ones (no-op for unordered kinds)."""
        if self.unordered_events:
            return self
        t = self.tensor
        sym = sum(np.transpose(t, perm) for perm in itertools.permutations(range(t.ndim)))
        stab = math.factorial(t.ndim) / _multiplicity_factor(t.shape)
        return JPD(sym / stab, self.positions, "mixed")

    def ordered(self) -> np.ndarray:
        """Tensor split evenly over orderings so that the full sum is one."""
        if not self.unordered_events:
            return np.array(self.tensor)
        return self.tensor / _multiplicity_factor(self.tensor.shape)

    def to_rows(self) -> list[tuple]:
        return [tuple(self.positions[i] for i in idx) + (float(self.tensor[idx]),)
                for idx in itertools.product(range(self.n_positions), repeat=self.walkers)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["row", "col"] if self.walkers == 2 else [f"i{k}" for k in range(self.walkers)]
        w.writerow(header + ["value"])
        for row in self.to_rows():
            w.writerow(list(row[:-1]) + [repr(row[-1])])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"kind": self.kind, "positions": list(self.positions), "tensor": self.tensor.tolist()}

    @classmethod
    def from_json(cls, data) -> "JPD":
        return cls(np.array(data["tensor"], dtype=float), tuple(data["positions"]), data["kind"])

    @classmethod
    def from_csv(cls, text: str, kind: str = "indistinguishable") -> "JPD":
        """Parse the long CSV layout written by :meth:`to_csv`."""
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], [r for r in rows[1:] if r]
        n = len(header) - 1
        labels: list = []
        for r in body:
            for lab in r[:n]:
                if lab not in labels:
                    labels.append(lab)
        index = {lab: i for i, lab in enumerate(labels)}
        t = np.zeros((len(labels),) * n)
        for r in body:
            t[tuple(index[lab] for lab in r[:n])] = float(r[n])
        positions = tuple(int(lab) if lab.lstrip("-").isdigit() else lab for lab in labels)
        return cls(t, positions, kind)


def _default_positions(state: FockState) -> list:
    ps = {md.position for occ in state.amplitudes for md, _ in occ}
    return sorted(ps, key=_label_key)


def jpd_from_state(state: FockState, positions: Sequence | None = None,
                   species_resolved: bool = False) -> JPD:
    """
    Joint position distribution of a definite-walker-number state.

    Parameters
    ----------
    state : FockState
        Normalized state with ``p >= 1`` walkers.
    positions : sequence, optional
        Position labels defining the tensor axes. Defaults to the occupied
        positions, sorted.
    species_resolved : bool
        If true, detectors also tell species apart and the result is an
        ordered ``distinguishable`` JPD; every term must then hold exactly
        one walker per species, with the same species set throughout.

    Raises
    ------
    MixedWalkerNumber
        If the state superposes different walker numbers.
    """
    p = state.total_walkers
    if p < 1:
        raise UnsupportedWalkerCount("JPD needs at least one walker")
    positions = list(positions) if positions is not None else _default_positions(state)
    pidx = {x: i for i, x in enumerate(positions)}
    t = np.zeros((len(positions),) * p)

    if species_resolved:
        species_set = None
        for occ, amp in state.amplitudes.items():
            walkers = sorted(((md.species, md.position) for md, c in occ for _ in range(c)))
            sp = tuple(s for s, _ in walkers)
            if len(set(sp)) != len(sp) or (species_set is not None and sp != species_set):
                raise AmbiguousSpecies(f"term with species {sp} cannot be species-resolved")
            species_set = sp
            try:
                idx = tuple(pidx[x] for _, x in walkers)
            except KeyError as exc:
                raise ModeIndexMismatch(f"position {exc.args[0]!r} not among JPD positions") from None
            t[idx] += abs(amp) ** 2
        return JPD(t, positions, "distinguishable")

    single_species = True
    events: dict[tuple, float] = {}
    for occ, amp in state.amplitudes.items():
        if len({md.species for md, _ in occ}) > 1:
            single_species = False
        try:
            idx = tuple(sorted(pidx[md.position] for md, c in occ for _ in range(c)))
        except KeyError as exc:
            raise ModeIndexMismatch(f"position {exc.args[0]!r} not among JPD positions") from None
        events[idx] = events.get(idx, 0.0) + abs(amp) ** 2
    for idx, prob in events.items():
        for perm in set(itertools.permutations(idx)):
            t[perm] = prob
    return JPD(t, positions, "indistinguishable" if single_species else "mixed")


def _membership(U: ModeUnitary) -> tuple[list, np.ndarray]:
    positions = U.positions
    pidx = {x: i for i, x in enumerate(positions)}
    G = np.zeros((len(positions), U.dimension))
    for a, md in enumerate(U.modes):
        G[pidx[md.position], a] = 1.0
    return positions, G


def jpd_two_walker_closed_form(U: ModeUnitary, x, y, kind: str = "indistinguishable") -> JPD:
    """
    Two-walker JPD straight from the single-walker amplitudes.

    With ``u = U.column(x)`` and ``v = U.column(y)``:

    * indistinguishable: ``P[m, n] = |u_m v_n + u_n v_m|^2`` for ``m != n`` and
      ``P[m, m] = 2 |u_m v_m|^2``;
    * distinguishable: ``P[m, n] = |u_m v_n|^2`` (walker entering ``x`` on
      the first axis).

    When positions carry several coin modes, mode-level probabilities are
    summed per position pair. For ``x == y`` the indistinguishable JPD is
    that of the normalized input ``(w_x^dag)^2 |0> / sqrt(2)``.
    """
    if kind not in ("indistinguishable", "distinguishable"):
        raise ValueError(f"kind must be indistinguishable or distinguishable, got {kind!r}")
    u, v = U.column(x), U.column(y)
    positions, G = _membership(U)
    if kind == "distinguishable":
        D = np.abs(np.outer(u, v)) ** 2
        return JPD(G @ D @ G.T, positions, kind)
    A = np.outer(u, v)
    S = np.abs(A + A.T) ** 2
    S[np.diag_indices_from(S)] /= 2.0
    if U.index(x) == U.index(y):
        # input (w_x^dag)^2 |0> carries its own 1/sqrt(2)
        S /= 2.0
    P = G @ S @ G.T
    P[np.diag_indices_from(P)] = np.diag(G @ np.triu(S) @ G.T)
    return JPD(P, positions, kind)


def single_click_marginal(jpd: JPD) -> np.ndarray:
    """
    Probability of at least one detection at each position (two walkers).

    For unordered kinds this is the row sum; for ordered distinguishable
    JPDs ``q_m = sum_n P[m, n] + sum_n P[n, m] - P[m, m]``.
    """
    if jpd.walkers != 2:
        raise UnsupportedWalkerCount("single-click marginals are implemented for two walkers")
    P = jpd.tensor
    if jpd.unordered_events:
        return P.sum(axis=1)
    return P.sum(axis=1) + P.sum(axis=0) - np.diag(P)


def marginal_to_csv(positions: Sequence, q: Sequence[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["position", "value"])
    for x, val in zip(positions, q):
        w.writerow([x, repr(float(val))])
    return buf.getvalue()


def meeting_probability(jpd: JPD) -> float:
    """Probability that all walkers are found at the same position (the trace for two)."""
    t = jpd.tensor
    return float(sum(t[(i,) * jpd.walkers] for i in range(jpd.n_positions)))


def _count_at(occ, position, species) -> int:
    return sum(c for md, c in occ
               if md.position == position and (species is None or md.species == species))


def detection_probability(state: FockState, position, count: int = 1, species: int | None = None) -> float:
    """Probability that exactly ``count`` walkers (of ``species``, if given) sit at ``position``."""
    return float(sum(abs(a) ** 2 for occ, a in state.amplitudes.items()
                     if _count_at(occ, position, species) == count))


def project_single_detection(state: FockState, position, species: int | None = None,
                             count: int = 1) -> tuple[FockState, float]:
    """
    Condition on detecting exactly ``count`` walkers at ``position``.

    Returns the renormalized post-measurement state (the detected walkers are
    kept in it) and the probability of the conditioning event. With
    ``species`` set, only walkers of that species are counted, modelling a
    species-resolving detector.

    Raises
    ------
    ZeroProbabilityEvent
        If the event has probability below ``1e-14``.
    """
    if state.total_walkers < 2:
        raise UnsupportedWalkerCount("projection needs at least two walkers")
    kept = {occ: a for occ, a in state.amplitudes.items()
            if _count_at(occ, position, species) == count}
    prob = float(sum(abs(a) ** 2 for a in kept.values()))
    if prob < ZERO_PROB:
        raise ZeroProbabilityEvent(
            f"detecting {count} walker(s) at {position!r} has probability {prob:.3e}")
    scale = 1.0 / math.sqrt(prob)
    return FockState({occ: a * scale for occ, a in kept.items()}), prob


def _log_base(base) -> float:
    if base in ("e", "E") or (isinstance(base, float) and math.isclose(base, math.e)):
        return 1.0
    if base in (2, "2", 2.0):
        return math.log(2.0)
    raise ValueError(f"log base must be 2 or 'e', got {base!r}")


def correlation_entropy(jpd: JPD | np.ndarray, base=DEFAULT_ENTROPY_BASE) -> float:
    """
    Shannon entropy of the normalized spectrum of a two-walker JPD matrix.

    The spectrum is taken as the singular values of the matrix, i.e. the
    eigenvalue magnitudes for symmetric JPDs. Values below ``1e-14`` of the
    largest are treated as exact zeros, so any rank-1 (uncorrelated) matrix
    gives 0.

    Raises
    ------
    DegenerateMatrix
        If every singular value is below ``1e-14``.
    """
    P = jpd.matrix if isinstance(jpd, JPD) else np.asarray(jpd, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise UnsupportedWalkerCount("correlation entropy needs a square two-walker matrix")
    sv = np.linalg.svd(P, compute_uv=False)
    if sv.size == 0 or sv.max() < ZERO_PROB:
        raise DegenerateMatrix("all singular values vanish")
    sv = np.where(sv < ZERO_PROB * sv.max(), 0.0, sv)
    p = sv / sv.sum()
    p = p[p > 0]
    h = float(-(p * np.log(p)).sum()) / _log_base(base)
    return h if h > 0 else 0.0


def l1_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Half the summed absolute difference between two vectors."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise LengthMismatch(f"lengths differ: {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())
