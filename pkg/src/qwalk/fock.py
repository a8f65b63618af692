"""
Bosonic multi-walker states.

States live in the occupation-number basis over modes ``(position, coin,
species)``. An occupation vector is stored as a sorted tuple of
``(Mode, count)`` pairs with ``count >= 1``; the empty tuple is the vacuum.
Because the basis is occupation vectors, creation operators commute by
construction.

Walkers that share a species are indistinguishable; walkers with different
species labels never overlap.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, NamedTuple

import numpy as np

from .errors import InvalidMode, MixedWalkerNumber, SizeOverflow

__all__ = [
    "Mode",
    "FockState",
    "vacuum",
    "create_walker",
    "product_state",
    "inner_product",
    "enumerate_basis",
    "basis_size",
    "state_to_json",
    "state_from_json",
    "PRUNE_TOL",
    "DEFAULT_BASIS_CAP",
]

PRUNE_TOL = 1e-14
DEFAULT_BASIS_CAP = 10**7
NORM_TOL = 1e-10


class Mode(NamedTuple):
    """A single-walker mode. ``coin`` is the neighbor label (``None`` for bare optical modes)."""

    position: Hashable
    coin: Hashable = None
    species: int = 0


def _label_key(v):
    if v is None:
        return (0, 0, "")
    if isinstance(v, (bool, np.bool_)):
        return (1, int(v), "")
    if isinstance(v, (int, float, np.integer, np.floating)):
        return (1, v, "")
    return (2, 0, str(v))


def mode_key(m: Mode):
    """Total order on modes that tolerates mixed label types."""
    return (m.species, _label_key(m.position), _label_key(m.coin))


Occupation = tuple  # tuple[tuple[Mode, int], ...]


def _occ_from_counts(counts: Mapping[Mode, int]) -> Occupation:
    return tuple(sorted(((m, c) for m, c in counts.items() if c), key=lambda mc: mode_key(mc[0])))


@dataclass(frozen=True, eq=False)
class FockState:
    """
    Immutable sparse superposition of occupation vectors.

    ``amplitudes`` maps occupation tuples to complex amplitudes. Normalization
    is not enforced; use :meth:`norm` / :meth:`normalized`.
    """

    amplitudes: Mapping[Occupation, complex]

    def __post_init__(self):
        if not isinstance(self.amplitudes, MappingProxyType):
            object.__setattr__(self, "amplitudes", MappingProxyType(dict(self.amplitudes)))

    @classmethod
    def from_counts(cls, terms: Mapping[Mapping[Mode, int] | Occupation, complex]) -> "FockState":
        """Build from ``{occupation: amplitude}`` where occupations may be dicts."""
        amps: dict = {}
        for occ, amp in terms.items():
            key = _occ_from_counts(dict(occ) if not isinstance(occ, Mapping) else occ)
            amps[key] = amps.get(key, 0) + complex(amp)
        return cls(amps)

    def __len__(self):
        return len(self.amplitudes)

    def items(self):
        return self.amplitudes.items()

    @property
    def walker_numbers(self) -> set[int]:
        return {sum(c for _, c in occ) for occ in self.amplitudes}

    @property
    def total_walkers(self) -> int:
        ps = self.walker_numbers
        if len(ps) > 1:
            raise MixedWalkerNumber(f"state mixes walker numbers {sorted(ps)}")
        return ps.pop() if ps else 0

    def modes(self) -> list[Mode]:
        """Occupied modes, sorted."""
        ms = {m for occ in self.amplitudes for m, _ in occ}
        return sorted(ms, key=mode_key)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "FockState":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return FockState({k: a / n for k, a in self.amplitudes.items()})

    def pruned(self, tol: float = PRUNE_TOL) -> "FockState":
        return FockState({k: a for k, a in self.amplitudes.items() if abs(a) > tol})

    def amplitude(self, occupation: Mapping[Mode, int] | Occupation) -> complex:
        if isinstance(occupation, Mapping):
            occupation = _occ_from_counts(occupation)
        return self.amplitudes.get(occupation, 0j)

    def __add__(self, other: "FockState") -> "FockState":
        amps = dict(self.amplitudes)
        for k, a in other.amplitudes.items():
            amps[k] = amps.get(k, 0) + a
        return FockState(amps)

    def __mul__(self, scalar) -> "FockState":
        return FockState({k: scalar * a for k, a in self.amplitudes.items()})

    __rmul__ = __mul__

    def __repr__(self):
        terms = []
        for occ, a in list(self.amplitudes.items())[:6]:
            body = ",".join(f"{m.position}/{m.coin}/{m.species}:{c}" for m, c in occ) or "0"
            terms.append(f"({a:.4g})|{body}>")
        more = " + ..." if len(self.amplitudes) > 6 else ""
        return "FockState(" + " + ".join(terms) + more + ")"


def vacuum() -> FockState:
    """The empty walker state: one term, empty occupation, amplitude 1."""
    return FockState({(): 1 + 0j})


def _check_mode(mode, graph=None) -> Mode:
    if not isinstance(mode, Mode):
        try:
            mode = Mode(*mode)
        except TypeError as exc:
            raise InvalidMode(f"cannot interpret {mode!r} as a mode") from exc
    if not isinstance(mode.species, (int, np.integer)) or mode.species < 0:
        raise InvalidMode(f"species must be a non-negative integer, got {mode.species!r}")
    if graph is not None and (mode.position, mode.coin) not in graph.edges:
        raise InvalidMode(f"({mode.position!r}, {mode.coin!r}) is not a directed edge of the graph")
    return mode


def create_walker(state: FockState, mode, graph=None) -> FockState:
    """
    Apply the creation operator for ``mode``.

    Each term with occupation ``k`` in ``mode`` goes to ``k + 1`` with its
    amplitude multiplied by ``sqrt(k + 1)``. The result is not renormalized.
    If ``graph`` is given, ``(position, coin)`` must be one of its edges.
    """
    mode = _check_mode(mode, graph)
    out: dict = {}
    for occ, amp in state.amplitudes.items():
        counts = dict(occ)
        k = counts.get(mode, 0)
        counts[mode] = k + 1
        key = _occ_from_counts(counts)
        out[key] = out.get(key, 0) + amp * math.sqrt(k + 1)
    return FockState(out)


def product_state(modes: Iterable, graph=None) -> FockState:
    """Normalized state with one walker created in each of ``modes`` (repeats allowed)."""
    state = vacuum()
    for m in modes:
        state = create_walker(state, m, graph)
    return state.normalized()


def inner_product(a: FockState, b: FockState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if len(a) > len(b):
        return inner_product(b, a).conjugate()
    return complex(sum(amp.conjugate() * b.amplitudes.get(k, 0) for k, amp in a.amplitudes.items()))


def _basis_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("QWALK_BASIS_CAP")
    return int(env) if env else DEFAULT_BASIS_CAP


def basis_size(modes: int, walkers: int) -> int:
    return math.comb(modes + walkers - 1, walkers)


def enumerate_basis(modes: int, walkers: int, cap: int | None = None) -> list[tuple[int, ...]]:
    """
    All occupation vectors of ``walkers`` bosons in ``modes`` modes.

    Ordered lexicographically from the first mode's highest occupation down,
    e.g. ``enumerate_basis(2, 2) == [(2, 0), (1, 1), (0, 2)]``. ``modes = 1,
    walkers = 0`` yields ``[(0,)]``.

    Raises
    ------
    SizeOverflow
        If the basis would exceed ``cap`` (default ``10**7``, overridable via
        the ``QWALK_BASIS_CAP`` environment variable).
    """
    if modes < 1 or walkers < 0:
        raise ValueError("need modes >= 1 and walkers >= 0")
    n = basis_size(modes, walkers)
    limit = _basis_cap(cap)
    if n > limit:
        raise SizeOverflow(f"basis of {n} occupation vectors exceeds cap {limit}")

    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], left: int, remaining_modes: int):
        if remaining_modes == 1:
            out.append(tuple(prefix + [left]))
            return
        for k in range(left, -1, -1):
            rec(prefix + [k], left - k, remaining_modes - 1)

    rec([], walkers, modes)
    return out


# -- serialization ---------------------------------------------------------

def state_to_json(state: FockState) -> list[dict]:
    terms = []
    for occ, amp in state.amplitudes.items():
        terms.append({
            "occ": [[m.position, m.coin, m.species, c] for m, c in occ],
            "amp": [float(amp.real), float(amp.imag)],
        })
    return terms


def state_from_json(terms: Iterable[Mapping]) -> FockState:
    amps: dict = {}
    for t in terms:
        counts = {Mode(p, c, int(s)): int(n) for p, c, s, n in t["occ"]}
        key = _occ_from_counts(counts)
        re, im = t["amp"]
        amps[key] = amps.get(key, 0) + complex(re, im)
    return FockState(amps)
