"""
Walker graphs.

A walker graph is a set of vertices, a symmetric set of directed edges and,
for every vertex ``x``, a unitary coin matrix ``A^(x)`` acting on the ordered
neighborhood of ``x``. Row/column ``k`` of ``A^(x)`` refers to the ``k``-th
entry of ``neighborhood_order[x]``.

A vertex is part of its own neighborhood only if the self-loop ``(x, x)`` is
declared explicitly. None of the builders add self-loops.

Edge weights are accepted (and round-tripped through JSON) but play no role
in the dynamics; all structure lives in the coin matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetricEdge,
    CoinDimensionMismatch,
    DuplicateVertex,
    InvalidDimensions,
    InvalidNeighborhood,
    InvalidWidth,
    NonUnitaryCoin,
    UnknownVertex,
)

__all__ = [
    "WalkerGraph",
    "build_graph",
    "line_graph",
    "cycle_graph",
    "lattice2d_graph",
    "hadamard_coin",
    "grover_coin",
    "identity_coin",
    "validate_graph",
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "save_graph",
    "UNITARY_TOL",
]

UNITARY_TOL = 1e-10

Vertex = Hashable


def hadamard_coin() -> np.ndarray:
    """2x2 Hadamard coin ``[[1, 1], [1, -1]] / sqrt(2)``."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


def grover_coin(d: int) -> np.ndarray:
    """
    d-dimensional Grover coin ``(2/d) J - I``.

    For ``d = 4`` this is the matrix with ``-1/2`` on the diagonal and ``+1/2``
    elsewhere; ``d = 2`` gives the swap and ``d = 1`` the trivial coin ``[1]``.
    """
    if d < 1:
        raise ValueError("Grover coin dimension must be >= 1")
    return (2.0 / d) * np.ones((d, d), dtype=complex) - np.eye(d, dtype=complex)


def identity_coin(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def _unitarity_deviation(a: np.ndarray) -> float:
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


@dataclass(frozen=True, eq=False)
class WalkerGraph:
    """
    Immutable, validated walker graph.

    Attributes
    ----------
    vertices : tuple
        Vertex labels; position ``i`` in this tuple is the vertex index.
    edges : frozenset of (x, j)
        Directed edges, ``j`` in the neighborhood of ``x``.
    coins : Mapping
        Vertex -> read-only complex coin matrix of shape ``(|n_x|, |n_x|)``.
    neighborhood_order : Mapping
        Vertex -> tuple of neighbors; fixes the row/column meaning of the coin.
    weights : Mapping
        Optional informational edge weights, ignored by the dynamics.
    """

    vertices: tuple
    edges: frozenset
    coins: Mapping[Vertex, np.ndarray]
    neighborhood_order: Mapping[Vertex, tuple]
    weights: Mapping[tuple, float] = field(default_factory=lambda: MappingProxyType({}))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def index(self, vertex: Vertex) -> int:
        return self._vertex_index[vertex]

    @property
    def _vertex_index(self) -> dict:
        # cached lazily on the frozen instance
        try:
            return self.__dict__["_vidx"]
        except KeyError:
            idx = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_vidx", idx)
            return idx

    def neighborhood(self, x: Vertex) -> tuple:
        return self.neighborhood_order[x]

    def degree(self, x: Vertex) -> int:
        return len(self.neighborhood_order[x])

    def directed_edges(self) -> list[tuple]:
        """Directed edges ``(x, j)`` in vertex order, then neighborhood order."""
        return [(x, j) for x in self.vertices for j in self.neighborhood_order[x]]

    def with_coins(self, overrides: Mapping[Vertex, Any]) -> "WalkerGraph":
        """Return a copy with some coins replaced (validated)."""
        coins = dict(self.coins)
        coins.update(overrides)
        return build_graph(
            self.vertices,
            [(x, j) for (x, j) in self.directed_edges()],
            coins,
            neighborhood_order=self.neighborhood_order,
            weights=self.weights,
        )


def validate_graph(graph: WalkerGraph, tol: float = UNITARY_TOL) -> None:
    """
    Check all well-formedness conditions, raising on the first violation.

    Checks edge symmetry, that each neighborhood order lists exactly the
    outgoing targets once, coin dimensions, and coin unitarity to ``tol``.
    """
    vset = set(graph.vertices)
    if len(vset) != len(graph.vertices):
        seen = set()
        for v in graph.vertices:
            if v in seen:
                raise DuplicateVertex(v)
            seen.add(v)
    for x, j in graph.edges:
        if x not in vset:
            raise UnknownVertex(x)
        if j not in vset:
            raise UnknownVertex(j)
    # deterministic order so the same graph always reports the same edge
    for x, j in sorted(graph.edges, key=lambda e: (graph.index(e[0]), graph.index(e[1]))):
        if (j, x) not in graph.edges:
            raise AsymmetricEdge(x, j)
    for x in graph.vertices:
        order = graph.neighborhood_order.get(x)
        if order is None:
            raise InvalidNeighborhood(x, "missing")
        targets = {j for (y, j) in graph.edges if y == x}
        if len(set(order)) != len(order):
            raise InvalidNeighborhood(x, f"repeated entries in {list(order)}")
        if set(order) != targets:
            raise InvalidNeighborhood(
                x, f"order {list(order)} does not match outgoing edges {sorted(targets, key=repr)}")
        coin = graph.coins.get(x)
        d = len(order)
        if coin is None:
            raise CoinDimensionMismatch(x, d, None)
        if coin.shape != (d, d):
            raise CoinDimensionMismatch(x, d, coin.shape)
        if d and (dev := _unitarity_deviation(coin)) > tol:
            raise NonUnitaryCoin(x, dev)


def _as_coin(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    arr.setflags(write=False)
    return arr


def build_graph(
    vertices: Iterable[Vertex],
    edges: Iterable[Sequence],
    coins: Mapping[Vertex, Any],
    neighborhood_order: Mapping[Vertex, Sequence] | None = None,
    weights: Mapping[tuple, float] | None = None,
) -> WalkerGraph:
    """
    Build and validate a :class:`WalkerGraph`.

    Parameters
    ----------
    vertices : iterable
        Unique hashable vertex labels.
    edges : iterable of (x, j) or (x, j, weight)
        Directed edges. Both directions must be given.
    coins : mapping
        Vertex -> square unitary matrix indexed by the neighborhood order.
    neighborhood_order : mapping, optional
        Vertex -> ordered neighbors. Defaults to the order in which outgoing
        edges first appear in ``edges``.
    weights : mapping, optional
        ``(x, j) -> weight``; weights given inside ``edges`` take precedence.

    Raises
    ------
    DuplicateVertex, UnknownVertex, AsymmetricEdge, InvalidNeighborhood,
    CoinDimensionMismatch, NonUnitaryCoin
    """
    vertices = tuple(vertices)
    seen = set()
    for v in vertices:
        if v in seen:
            raise DuplicateVertex(v)
        seen.add(v)

    edge_list = []
    w = dict(weights or {})
    for e in edges:
        if len(e) == 3:
            x, j, weight = e
            w[(x, j)] = float(weight)
        elif len(e) == 2:
            x, j = e
        else:
            raise ValueError(f"edge must be (x, j) or (x, j, weight), got {e!r}")
        for v in (x, j):
            if v not in seen:
                raise UnknownVertex(v)
        edge_list.append((x, j))

    if neighborhood_order is None:
        order: dict = {v: [] for v in vertices}
        for x, j in edge_list:
            if j not in order[x]:
                order[x].append(j)
    else:
        order = {v: list(neighborhood_order.get(v, ())) for v in vertices}

    graph = WalkerGraph(
        vertices=vertices,
        edges=frozenset(edge_list),
        coins=MappingProxyType({v: _as_coin(coins[v]) for v in vertices if v in coins}),
        neighborhood_order=MappingProxyType({v: tuple(order[v]) for v in vertices}),
        weights=MappingProxyType(w),
    )
    validate_graph(graph)
    return graph


def line_graph(half_width: int) -> WalkerGraph:
    """
    Finite line ``-L..L`` with Hadamard coins and reflecting ends.

    Interior vertices use neighborhood order ``(x-1, x+1)``; the two end
    vertices have a single neighbor and the trivial coin ``[1]``.
    """
    if not isinstance(half_width, (int, np.integer)) or half_width < 1:
        raise InvalidWidth(f"half_width must be an integer >= 1, got {half_width!r}")
    L = int(half_width)
    vertices = list(range(-L, L + 1))
    edges, order, coins = [], {}, {}
    for x in vertices:
        nbrs = [y for y in (x - 1, x + 1) if -L <= y <= L]
        order[x] = nbrs
        edges.extend((x, y) for y in nbrs)
        coins[x] = hadamard_coin() if len(nbrs) == 2 else identity_coin(1)
    return build_graph(vertices, edges, coins, neighborhood_order=order)


def cycle_graph(n_vertices: int) -> WalkerGraph:
    """Ring ``0..N-1`` with periodic wraparound and Hadamard coins everywhere."""
    if not isinstance(n_vertices, (int, np.integer)) or n_vertices < 3:
        raise InvalidWidth(f"cycle needs at least 3 vertices, got {n_vertices!r}")
    n = int(n_vertices)
    order = {x: [(x - 1) % n, (x + 1) % n] for x in range(n)}
    edges = [(x, y) for x in range(n) for y in order[x]]
    coins = {x: hadamard_coin() for x in range(n)}
    return build_graph(range(n), edges, coins, neighborhood_order=order)


def lattice2d_graph(width: int, height: int) -> WalkerGraph:
    """
    Rectangular lattice with 4-neighbor adjacency and Grover coins.

    Vertex ``(i, j)`` (column ``i``, row ``j``) has integer label
    ``j * width + i``. Neighborhood order is (left, right, down, up) restricted
    to existing neighbors, and each vertex carries the Grover coin of its
    degree, so interior vertices get the four-level coin.
    """
    if width < 2 or height < 2:
        raise InvalidDimensions(f"lattice needs width, height >= 2, got {width}x{height}")
    label = lambda i, j: j * width + i
    vertices = [label(i, j) for j in range(height) for i in range(width)]
    edges, order, coins = [], {}, {}
    for j in range(height):
        for i in range(width):
            v = label(i, j)
            cand = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
            nbrs = [label(a, b) for a, b in cand if 0 <= a < width and 0 <= b < height]
            order[v] = nbrs
            edges.extend((v, u) for u in nbrs)
            coins[v] = grover_coin(len(nbrs))
    return build_graph(vertices, edges, coins, neighborhood_order=order)


# -- JSON ------------------------------------------------------------------

def _encode_matrix(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _decode_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def graph_to_dict(graph: WalkerGraph) -> dict:
    edges = []
    for x, j in graph.directed_edges():
        if (x, j) in graph.weights:
            edges.append([x, j, graph.weights[(x, j)]])
        else:
            edges.append([x, j])
    return {
        "vertices": list(graph.vertices),
        "edges": edges,
        "coins": {str(x): _encode_matrix(graph.coins[x]) for x in graph.vertices},
        "neighborhood_order": {str(x): list(graph.neighborhood_order[x]) for x in graph.vertices},
    }


def graph_from_dict(data: Mapping) -> WalkerGraph:
    """Parse the graph JSON layout; coin and order keys are ``str(vertex)``."""
    for key in ("vertices", "edges", "coins"):
        if key not in data:
            raise ValueError(f"graph config is missing {key!r}")
    vertices = list(data["vertices"])
    by_key = {str(v): v for v in vertices}

    def vertex(key):
        if key not in by_key:
            raise UnknownVertex(key)
        return by_key[key]

    coins = {vertex(k): _decode_matrix(m) for k, m in data["coins"].items()}
    order = None
    if "neighborhood_order" in data:
        order = {vertex(k): list(v) for k, v in data["neighborhood_order"].items()}
    return build_graph(vertices, [tuple(e) for e in data["edges"]], coins, neighborhood_order=order)


def save_graph(graph: WalkerGraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(graph), fh, indent=2)


def load_graph(path) -> WalkerGraph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))
