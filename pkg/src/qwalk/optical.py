"""
Photonic special cases: beamsplitter coins, Galton-pyramid networks, partial
distinguishability and the coherent-light comparison.

Beamsplitter convention (asymmetric): ``a^dag -> (a^dag + b^dag)/sqrt(2)`` and
``b^dag -> (a^dag - b^dag)/sqrt(2)``, ``a`` being the lower-index mode. The
symmetric form ``|11> -> (|20> + |02>)/sqrt(2)`` differs from it only by local
phases and yields the same detection statistics.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import AlphaOutOfRange, DimensionMismatch, InvalidLevels, NonUnitaryCoin, ZeroField
from .evolution import ModeUnitary
from .fock import Mode, enumerate_basis
from .graph import UNITARY_TOL
from .measurement import JPD, jpd_two_walker_closed_form

__all__ = [
    "balanced_beamsplitter",
    "beamsplitter_b2",
    "B2_BASIS",
    "BeamsplitterNetwork",
    "pyramid_network",
    "mixed_jpd",
    "CoherentField",
    "coherent_propagate",
    "coherent_conditioned_jpd",
    "coherent_separability_check",
    "load_network",
    "save_network",
]

_S = 1.0 / np.sqrt(2.0)

#: Two-mode Fock basis ``|mn>`` (m photons in mode a, n in mode b) of :func:`beamsplitter_b2`.
B2_BASIS = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (0, 2))


def balanced_beamsplitter() -> np.ndarray:
    """Single-photon 50/50 coupling on amplitudes ``(a, b)``; columns are the images of ``a`` and ``b``."""
    return np.array([[_S, _S], [_S, -_S]], dtype=complex)


def beamsplitter_b2() -> np.ndarray:
    """
    Beamsplitter on the two-mode Fock space with at most two photons.

    Basis order is :data:`B2_BASIS`. The matrix is block diagonal over photon
    number 0, 1, 2; the two-photon block has a zero in its top-left corner,
    the ``|11>`` component, which is Hong-Ou-Mandel suppression.
    """
    return np.array([
        [1, 0, 0, 0, 0, 0],
        [0, -_S, _S, 0, 0, 0],
        [0, _S, _S, 0, 0, 0],
        [0, 0, 0, 0, _S, -_S],
        [0, 0, 0, _S, 0.5, 0.5],
        [0, 0, 0, -_S, 0.5, 0.5],
    ], dtype=complex)


@dataclass(frozen=True, eq=False)
class BeamsplitterNetwork:
    """
    Linear optical network as an ordered list of two-mode couplings.

    Each element ``(a, b, B)`` maps the amplitudes on modes ``(a, b)`` by the
    2x2 unitary ``B``; elements are applied in list order.
    """

    total_modes: int
    elements: tuple
    input_modes: tuple
    output_modes: tuple
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        els = []
        for a, b, B in self.elements:
            B = np.array(B, dtype=complex)
            if B.shape != (2, 2):
                raise DimensionMismatch(f"coupling on ({a}, {b}) must be 2x2, got {B.shape}")
            dev = float(np.max(np.abs(B.conj().T @ B - np.eye(2))))
            if dev > UNITARY_TOL:
                raise NonUnitaryCoin((a, b), dev)
            if not (0 <= a < self.total_modes and 0 <= b < self.total_modes) or a == b:
                raise DimensionMismatch(f"bad mode pair ({a}, {b}) for {self.total_modes} modes")
            B.setflags(write=False)
            els.append((int(a), int(b), B))
        object.__setattr__(self, "elements", tuple(els))
        object.__setattr__(self, "input_modes", tuple(self.input_modes))
        object.__setattr__(self, "output_modes", tuple(self.output_modes))

    def matrix(self) -> np.ndarray:
        if "m" not in self._cache:
            U = np.eye(self.total_modes, dtype=complex)
            for a, b, B in self.elements:
                rows = U[[a, b], :]
                U[[a, b], :] = B @ rows
            U.setflags(write=False)
            self._cache["m"] = U
        return self._cache["m"]

    def unitary(self, species: int = 1) -> ModeUnitary:
        """Network as a :class:`ModeUnitary`; mode ``i`` is position ``i`` with no coin."""
        return ModeUnitary.from_matrix(self.matrix(), species=species)

    def input_mode(self, k: int, species: int = 0) -> Mode:
        return Mode(self.input_modes[k], None, species)

    def to_json(self) -> dict:
        return {
            "total_modes": self.total_modes,
            "elements": [{"modes": [a, b],
                          "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in B]}
                         for a, b, B in self.elements],
            "input_modes": list(self.input_modes),
            "output_modes": list(self.output_modes),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "BeamsplitterNetwork":
        els = [(e["modes"][0], e["modes"][1],
                np.array([[complex(re, im) for re, im in row] for row in e["matrix"]]))
               for e in data["elements"]]
        M = int(data["total_modes"])
        return cls(M, tuple(els), tuple(data.get("input_modes", (0, 1))),
                   tuple(data.get("output_modes", range(M))))


def save_network(net: BeamsplitterNetwork, path) -> None:
    with open(path, "w") as fh:
        json.dump(net.to_json(), fh, indent=2)


def load_network(path) -> BeamsplitterNetwork:
    with open(path) as fh:
        return BeamsplitterNetwork.from_json(json.load(fh))


def pyramid_network(levels: int) -> BeamsplitterNetwork:
    """
    Triangular (Galton board) array of balanced beamsplitters.

    Modes are ``2L`` waveguide tracks numbered left to right. Level ``k``
    (1-based) holds ``k`` beamsplitters; splitter ``i`` couples tracks
    ``L-k+2i`` and ``L-k+2i+1``, so its outputs feed the neighbouring
    splitters of level ``k+1`` and the outer inputs of each level are vacuum.
    The photons enter on tracks ``L-1`` and ``L`` (the apex splitter) and
    all ``2L`` tracks are read out after level ``L``.
    """
    if not isinstance(levels, (int, np.integer)) or levels < 1:
        raise InvalidLevels(f"levels must be an integer >= 1, got {levels!r}")
    L = int(levels)
    bs = balanced_beamsplitter()
    elements = [(L - k + 2 * i, L - k + 2 * i + 1, bs)
                for k in range(1, L + 1) for i in range(k)]
    return BeamsplitterNetwork(2 * L, tuple(elements), (L - 1, L), tuple(range(2 * L)))


def mixed_jpd(U: ModeUnitary, x, y, alpha: float) -> JPD:
    """
    JPD for partially distinguishable walkers entering ``x`` and ``y``.

    Input ``alpha a_x^dag a_y^dag + sqrt(1 - alpha^2) a_x^dag b_y^dag``; the
    probabilities are ``alpha^2`` times the indistinguishable JPD plus
    ``1 - alpha^2`` times the distinguishable one, both as unordered events.
    """
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must lie in [0, 1], got {alpha!r}")
    a2 = float(alpha) ** 2
    ind = jpd_two_walker_closed_form(U, x, y, "indistinguishable")
    dist = jpd_two_walker_closed_form(U, x, y, "distinguishable").unordered()
    kind = "indistinguishable" if a2 == 1.0 else "mixed"
    return JPD(a2 * ind.tensor + (1.0 - a2) * dist.tensor, ind.positions, kind)


@dataclass(frozen=True, eq=False)
class CoherentField:
    """Coherent amplitudes ``beta_i`` over modes (labels optional)."""

    amplitudes: np.ndarray
    modes: tuple | None = None

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(a)):
            raise ValueError("coherent amplitudes must be finite")
        if self.modes is not None and len(self.modes) != a.size:
            raise DimensionMismatch(f"{a.size} amplitudes for {len(self.modes)} modes")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        if self.modes is not None:
            object.__setattr__(self, "modes", tuple(Mode(*m) for m in self.modes))

    @property
    def mean_photon_number(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def coherent_propagate(field: CoherentField, U: ModeUnitary) -> CoherentField:
    """Send a coherent field through ``U``: output amplitudes ``beta = U alpha``."""
    if field.amplitudes.size != U.dimension:
        raise DimensionMismatch(f"field has {field.amplitudes.size} modes, unitary {U.dimension}")
    if field.modes is not None and field.modes != U.modes:
        raise DimensionMismatch("field modes do not match the unitary's mode index")
    return CoherentField(U.matrix @ field.amplitudes, U.modes)


def coherent_conditioned_jpd(field: CoherentField, photons: int) -> JPD:
    """
    Detection statistics of a coherent field post-selected on ``photons`` photons.

    Occupation pattern ``n`` has weight ``prod |beta_i|^(2 n_i) / n_i!``,
    renormalized over the ``photons``-photon sector. Returned as an unordered
    JPD over positions.
    """
    if photons < 1:
        raise ValueError("photons must be >= 1")
    beta = field.amplitudes
    if not np.any(np.abs(beta) > 0):
        raise ZeroField("coherent field is identically zero")
    modes = field.modes if field.modes is not None else tuple(Mode(i) for i in range(beta.size))
    positions = []
    for md in modes:
        if md.position not in positions:
            positions.append(md.position)
    pidx = {x: i for i, x in enumerate(positions)}
    mode_pos = [pidx[md.position] for md in modes]

    support = [i for i in range(beta.size) if abs(beta[i]) > 0]
    inten = np.abs(beta[support]) ** 2
    fact = np.cumprod([1.0] + list(range(1, photons + 1)))
    events: dict[tuple, float] = {}
    for occ in enumerate_basis(len(support), photons):
        w = 1.0
        for q, n in zip(inten, occ):
            if n:
                w *= q ** n / fact[n]
        idx = tuple(sorted(mode_pos[support[k]] for k, n in enumerate(occ) for _ in range(n)))
        events[idx] = events.get(idx, 0.0) + w
    total = sum(events.values())
    t = np.zeros((len(positions),) * photons)
    for idx, w in events.items():
        for perm in set(itertools.permutations(idx)):
            t[perm] = w / total
    return JPD(t, positions, "indistinguishable")


def coherent_separability_check(jpd: JPD) -> float:
    """
    Distance of a two-walker JPD from product (coherent-simulable) form.

    The JPD is put in ordered-event form, approximated by its dominant
    singular pair ``s u v^T``, and the largest absolute residual is returned.
    """
    O = jpd.ordered()
    if O.ndim != 2:
        raise DimensionMismatch("separability check needs a two-walker JPD")
    u, s, vt = np.linalg.svd(O)
    approx = s[0] * np.outer(u[:, 0], vt[0])
    return float(np.max(np.abs(O - approx)))
