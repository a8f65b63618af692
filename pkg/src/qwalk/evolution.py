"""
Coin/step evolution on the directed-edge mode space and its multi-walker lift.

Single-walker operators are matrices acting on amplitude column vectors:
``psi_out = U @ psi_in``, so ``U[out, in]`` is the amplitude for a walker
entering mode ``in`` to leave in mode ``out``. (The usual physics notation
``U_{x,m}`` for "from x to m" is ``U.matrix[m, x]`` here.)

The coin maps ``w(x,c)^dag -> sum_j A^(x)_{cj} w(x,j)^dag``; since the row
index of ``A`` is the incoming coin value, the block acting on amplitudes is
``A.T``. The step reverses every directed edge, ``(x, j) -> (j, x)``.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ModeIndexMismatch, NonUnitaryCoin, CoinDimensionMismatch, ScheduleLengthMismatch
from .fock import FockState, Mode, PRUNE_TOL, _occ_from_counts, enumerate_basis
from .graph import UNITARY_TOL, WalkerGraph

__all__ = [
    "ModeUnitary",
    "CoinSchedule",
    "graph_modes",
    "coin_operator",
    "step_operator",
    "walk_unitary",
    "lift_and_apply",
    "evolve",
    "lifted_matrix",
    "permanent",
    "transition_amplitude",
]


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """
    Single-walker unitary together with the labels of its modes.

    ``modes[i]`` is the :class:`~qwalk.fock.Mode` attached to row/column ``i``.
    Linear evolution never mixes species, so entries between modes of
    different species must be exactly zero.
    """

    matrix: np.ndarray
    modes: tuple
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"mode unitary must be square, got shape {m.shape}")
        if len(self.modes) != m.shape[0]:
            raise ModeIndexMismatch(f"{len(self.modes)} mode labels for a {m.shape[0]}-dim matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "modes", tuple(Mode(*md) for md in self.modes))
        idx = {md: i for i, md in enumerate(self.modes)}
        if len(idx) != len(self.modes):
            raise ModeIndexMismatch("duplicate mode labels")
        object.__setattr__(self, "_index", idx)

    @classmethod
    def from_matrix(cls, matrix, positions: Sequence | None = None, species: int = 1) -> "ModeUnitary":
        """
        Wrap a bare matrix; mode ``i`` gets position ``positions[i]`` and no coin.

        With ``species > 1`` the matrix is replicated block-diagonally, one
        block per species.
        """
        m = np.asarray(matrix, dtype=complex)
        n = m.shape[0]
        positions = list(range(n)) if positions is None else list(positions)
        base = cls(m, tuple(Mode(p, None, 0) for p in positions))
        return base.with_species(species) if species > 1 else base

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def positions(self) -> list:
        """Distinct positions in first-appearance order of the modes."""
        seen, out = set(), []
        for md in self.modes:
            if md.position not in seen:
                seen.add(md.position)
                out.append(md.position)
        return out

    @property
    def species(self) -> list[int]:
        return sorted({md.species for md in self.modes})

    def index(self, mode) -> int:
        """Column of ``mode``; a bare position label means ``Mode(label)``."""
        key = mode if isinstance(mode, Mode) else Mode(*mode) if isinstance(mode, tuple) else Mode(mode)
        try:
            return self._index[key]
        except (KeyError, TypeError):
            raise ModeIndexMismatch(f"mode {mode!r} is not in this unitary's mode index") from None

    def column(self, mode) -> np.ndarray:
        """Output amplitudes for a single walker entering ``mode``."""
        return self.matrix[:, self.index(mode)]

    def with_species(self, n: int) -> "ModeUnitary":
        """Replicate a single-species unitary over species ``0..n-1``."""
        if self.species != [0]:
            raise ModeIndexMismatch("with_species expects a species-0 unitary")
        mat = np.kron(np.eye(n), self.matrix)
        modes = tuple(Mode(md.position, md.coin, s) for s in range(n) for md in self.modes)
        return ModeUnitary(mat, modes)

    def compose(self, first: "ModeUnitary") -> "ModeUnitary":
        """``self @ first``: apply ``first``, then ``self``."""
        if first.modes != self.modes:
            raise ModeIndexMismatch("cannot compose unitaries over different mode indices")
        return ModeUnitary(self.matrix @ first.matrix, self.modes)

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        return self.compose(other)

    def unitarity_deviation(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dimension)))) if self.dimension else 0.0

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_deviation() <= tol

    def species_leakage(self) -> float:
        """Largest entry coupling different species (should be exactly 0)."""
        sp = np.array([md.species for md in self.modes])
        mask = sp[:, None] != sp[None, :]
        return float(np.max(np.abs(self.matrix[mask]))) if mask.any() else 0.0

    def to_json(self) -> dict:
        return {
            "modes": [[md.position, md.coin, md.species] for md in self.modes],
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ModeUnitary":
        mat = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        return cls(mat, tuple(Mode(p, c, int(s)) for p, c, s in data["modes"]))


def graph_modes(graph: WalkerGraph, species: int = 1) -> tuple:
    return tuple(Mode(x, j, s) for s in range(species) for (x, j) in graph.directed_edges())


def coin_operator(graph: WalkerGraph, species: int = 1,
                  overrides: Mapping | None = None) -> ModeUnitary:
    """
    Block-diagonal coin: one ``A^(x).T`` block per vertex, per species.

    ``overrides`` replaces the coin at selected vertices for this application
    only (used by time-dependent schedules).
    """
    modes = graph_modes(graph, species)
    index = {md: i for i, md in enumerate(modes)}
    mat = np.zeros((len(modes), len(modes)), dtype=complex)
    for s in range(species):
        for x in graph.vertices:
            a = graph.coins[x] if not overrides or x not in overrides else np.asarray(overrides[x], dtype=complex)
            nbrs = graph.neighborhood_order[x]
            idx = [index[Mode(x, j, s)] for j in nbrs]
            mat[np.ix_(idx, idx)] = a.T
    return ModeUnitary(mat, modes)


def step_operator(graph: WalkerGraph, species: int = 1) -> ModeUnitary:
    """Edge-reversal permutation ``(x, j) -> (j, x)``; self-loops are fixed points."""
    modes = graph_modes(graph, species)
    index = {md: i for i, md in enumerate(modes)}
    mat = np.zeros((len(modes), len(modes)), dtype=complex)
    for md, i in index.items():
        mat[index[Mode(md.coin, md.position, md.species)], i] = 1.0
    return ModeUnitary(mat, modes)


@dataclass(frozen=True)
class CoinSchedule:
    """Per-step coin overrides; an empty mapping at step ``t`` means "graph default"."""

    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(dict(s) for s in self.steps))

    def __len__(self):
        return len(self.steps)

    def validate(self, graph: WalkerGraph, tol: float = UNITARY_TOL) -> None:
        for overrides in self.steps:
            for x, a in overrides.items():
                a = np.asarray(a, dtype=complex)
                d = graph.degree(x)
                if a.shape != (d, d):
                    raise CoinDimensionMismatch(x, d, a.shape)
                dev = float(np.max(np.abs(a.conj().T @ a - np.eye(d))))
                if dev > tol:
                    raise NonUnitaryCoin(x, dev)


def walk_unitary(graph: WalkerGraph, steps: int, schedule: CoinSchedule | Sequence | None = None,
                 species: int = 1) -> ModeUnitary:
    """
    ``S C_n ... S C_2 S C_1`` on the directed-edge modes.

    ``schedule`` must be empty or have exactly ``steps`` entries.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if schedule is not None and not isinstance(schedule, CoinSchedule):
        schedule = CoinSchedule(tuple(schedule))
    if schedule is not None and len(schedule) not in (0, steps):
        raise ScheduleLengthMismatch(f"schedule has {len(schedule)} entries for {steps} steps")
    if schedule is not None:
        schedule.validate(graph)
    S = step_operator(graph, species).matrix
    default_SC = S @ coin_operator(graph, species).matrix
    modes = graph_modes(graph, species)
    U = np.eye(len(modes), dtype=complex)
    for t in range(steps):
        overrides = schedule.steps[t] if schedule else None
        SC = default_SC if not overrides else S @ coin_operator(graph, species, overrides).matrix
        U = SC @ U
    return ModeUnitary(U, modes)


# -- second-quantized lift -------------------------------------------------

def _columns(U: ModeUnitary, tol: float) -> list[list[tuple[int, complex]]]:
    m = U.matrix
    return [[(int(i), complex(m[i, c])) for i in np.flatnonzero(np.abs(m[:, c]) > tol)]
            for c in range(U.dimension)]


def lift_and_apply(U: ModeUnitary, state: FockState, prune_tol: float = PRUNE_TOL) -> FockState:
    """
    Apply the multi-walker lift of ``U`` to ``state``.

    Every creation operator ``w(m)^dag`` is replaced by
    ``sum_i U[i, m] w(i)^dag`` and the products are expanded in the
    occupation basis with bosonic ``sqrt(k+1)`` factors. Amplitudes with
    modulus ``<= prune_tol`` are dropped.
    """
    cols = _columns(U, 0.0)
    out: dict[tuple, complex] = {}
    for occ, amp in state.amplitudes.items():
        walkers: list[int] = []
        norm = 1.0
        for md, k in occ:
            walkers.extend([U.index(md)] * k)
            norm *= math.factorial(k)
        partial: dict[tuple, complex] = {(): amp / math.sqrt(norm)}
        for w in walkers:
            nxt: dict[tuple, complex] = {}
            for key, a in partial.items():
                for j, u in cols[w]:
                    k = key.count(j)
                    lst = list(key)
                    insort(lst, j)
                    nk = tuple(lst)
                    nxt[nk] = nxt.get(nk, 0) + a * u * math.sqrt(k + 1)
            partial = nxt
        for key, a in partial.items():
            out[key] = out.get(key, 0) + a

    modes = U.modes
    amps = {}
    for key in sorted(out):
        a = out[key]
        if abs(a) <= prune_tol:
            continue
        counts: dict = {}
        for j in key:
            counts[modes[j]] = counts.get(modes[j], 0) + 1
        amps[_occ_from_counts(counts)] = a
    return FockState(amps)


def evolve(graph: WalkerGraph, state: FockState, steps: int,
           schedule: CoinSchedule | Sequence | None = None) -> FockState:
    """Walk ``state`` for ``steps`` coin+step rounds on ``graph``."""
    n_species = max((md.species for md in state.modes()), default=0) + 1
    return lift_and_apply(walk_unitary(graph, steps, schedule, species=n_species), state)


def lifted_matrix(U: ModeUnitary, walkers: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """
    Dense matrix of the lift on the ``walkers``-particle sector.

    Returns ``(matrix, basis)`` where ``basis`` is
    ``enumerate_basis(U.dimension, walkers)`` over ``U.modes`` and
    ``matrix[r, c] = <basis[r]| lift(U) |basis[c]>``.
    """
    basis = enumerate_basis(U.dimension, walkers)
    pos = {b: i for i, b in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for c, occ in enumerate(basis):
        st = FockState({_occ_from_counts({U.modes[i]: n for i, n in enumerate(occ)}): 1.0})
        res = lift_and_apply(U, st, prune_tol=0.0)
        for key, a in res.amplitudes.items():
            counts = dict(key)
            vec = tuple(counts.get(md, 0) for md in U.modes)
            mat[pos[vec], c] = a
    return mat, basis


# -- permanents ------------------------------------------------------------

def permanent(a: np.ndarray) -> complex:
    """Permanent of a square matrix (Ryser's formula with Gray-code updates)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("permanent needs a square matrix")
    if n == 0:
        return 1 + 0j
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray_prev = 0
    for k in range(1, 2**n):
        gray = k ^ (k >> 1)
        diff = gray ^ gray_prev
        j = diff.bit_length() - 1
        if gray & diff:
            row_sums += a[:, j]
        else:
            row_sums -= a[:, j]
        gray_prev = gray
        sign = -1 if bin(gray).count("1") % 2 else 1
        total += sign * np.prod(row_sums)
    return complex((-1) ** n * total)


def transition_amplitude(U: ModeUnitary, inputs: Iterable, outputs: Iterable) -> complex:
    """
    ``<out| lift(U) |in>`` for occupation patterns given as lists of modes.

    Uses the permanent of the submatrix ``U[outputs, inputs]`` divided by
    ``sqrt(prod n_in! * prod n_out!)``; useful for point queries where a full
    expansion would be wasteful.
    """
    ins = [U.index(m) for m in inputs]
    outs = [U.index(m) for m in outputs]
    if len(ins) != len(outs):
        return 0j
    sub = U.matrix[np.ix_(outs, ins)]
    norm = 1
    for seq in (ins, outs):
        for v in set(seq):
            norm *= math.factorial(seq.count(v))
    return permanent(sub) / math.sqrt(norm)
