"""Run configuration shared by the CLI commands."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import ConfigParseError, QWalkError
from .evolution import CoinSchedule, ModeUnitary, walk_unitary
from .fock import Mode
from .graph import WalkerGraph, cycle_graph, graph_from_dict, lattice2d_graph, line_graph
from .optical import BeamsplitterNetwork, pyramid_network

GRAPH_PRESETS = ("line", "cycle", "lattice2d")
NETWORK_PRESETS = ("pyramid",)
OUTPUTS = ("jpd", "marginal", "meeting", "entropy")


@dataclass
class RunConfig:
    graph: WalkerGraph | None = None
    network: BeamsplitterNetwork | None = None
    walkers: list[Mode] = field(default_factory=list)
    steps: int = 0
    schedule: CoinSchedule | None = None
    outputs: tuple = OUTPUTS
    format: str = "csv"
    alpha: float | None = None
    entropy_base: Any = 2
    coherent: bool = False

    def unitary(self, species: int = 1) -> ModeUnitary:
        if self.network is not None:
            return self.network.unitary(species=species)
        return walk_unitary(self.graph, self.steps, self.schedule, species=species)

    @property
    def n_species(self) -> int:
        return max((w.species for w in self.walkers), default=0) + 1


def parse_label(text):
    """Parse a vertex label from text: integers become ints, ``none``/empty becomes None."""
    if text is None:
        return None
    if not isinstance(text, str):
        return text
    t = text.strip()
    if t == "" or t.lower() == "none":
        return None
    try:
        return int(t)
    except ValueError:
        return t


def parse_walker(spec) -> Mode:
    """``"pos:coin[:species]"`` or a ``[pos, coin, species]`` list."""
    if isinstance(spec, str):
        parts = spec.split(":")
        if not 1 <= len(parts) <= 3:
            raise ConfigParseError("walkers", f"cannot parse walker {spec!r}; use POS:COIN[:SPECIES]")
        pos = parse_label(parts[0])
        coin = parse_label(parts[1]) if len(parts) > 1 else None
        species = int(parts[2]) if len(parts) > 2 else 0
        return Mode(pos, coin, species)
    if isinstance(spec, (list, tuple)) and 1 <= len(spec) <= 3:
        vals = list(spec) + [None, 0][len(spec) - 1:]
        return Mode(vals[0], vals[1], int(vals[2]))
    raise ConfigParseError("walkers", f"cannot parse walker {spec!r}")


def _int_field(data, key, default=None, minimum=None):
    v = data.get(key, default)
    if v is None:
        raise ConfigParseError(key, "required")
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise ConfigParseError(key, f"must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigParseError(key, f"must be >= {minimum}, got {v}")
    return int(v)


def _load_json(path, key):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParseError(key, f"cannot read {path}: {exc}") from None


def _decode_matrix(rows, key):
    try:
        return np.array([[complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
                          for z in row] for row in rows])
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigParseError(key, f"bad matrix: {exc}") from None


def parse_config(data: Mapping) -> RunConfig:
    """
    Validate a config mapping and build a :class:`RunConfig`.

    Keys: ``graph`` (preset mapping, inline graph, or ``{"file": path}``),
    ``network`` (preset mapping, inline network, or ``{"file": path}``),
    ``walkers``, ``steps``, ``schedule``, ``outputs``, ``format``, ``alpha``,
    ``entropy_base``, ``coherent``. Errors name the offending field.
    """
    if not isinstance(data, Mapping):
        raise ConfigParseError("<root>", "config must be a JSON object")
    known = {"graph", "network", "walkers", "steps", "schedule", "outputs", "format",
             "alpha", "entropy_base", "coherent"}
    for key in data:
        if key not in known:
            raise ConfigParseError(key, "unknown field")
    cfg = RunConfig()

    g, n = data.get("graph"), data.get("network")
    if (g is None) == (n is None):
        raise ConfigParseError("graph", "give exactly one of 'graph' or 'network'")
    try:
        if g is not None:
            cfg.graph = _parse_graph(g)
        else:
            cfg.network = _parse_network(n)
    except ConfigParseError:
        raise
    except (QWalkError, KeyError, TypeError) as exc:
        raise ConfigParseError("graph" if g is not None else "network", str(exc)) from None

    cfg.steps = _int_field(data, "steps", 0, minimum=0)

    walkers = data.get("walkers")
    if walkers is None and cfg.network is not None:
        walkers = "indistinguishable"
    if isinstance(walkers, str):
        if cfg.network is None or walkers not in ("indistinguishable", "distinguishable"):
            raise ConfigParseError(
                "walkers", "named walker sets ('indistinguishable'/'distinguishable') need a network")
        a, b = cfg.network.input_modes[:2]
        walkers = [[a, None, 0], [b, None, 0 if walkers == "indistinguishable" else 1]]
    if not walkers:
        raise ConfigParseError("walkers", "at least one walker is required")
    cfg.walkers = [parse_walker(w) for w in walkers]
    for w in cfg.walkers:
        if cfg.graph is not None and (w.position, w.coin) not in cfg.graph.edges:
            raise ConfigParseError("walkers", f"({w.position!r}, {w.coin!r}) is not a directed edge")
        if cfg.network is not None and (w.coin is not None or not
                                        (isinstance(w.position, int) and 0 <= w.position < cfg.network.total_modes)):
            raise ConfigParseError("walkers", f"{w.position!r} is not a network mode")

    sched = data.get("schedule")
    if sched is not None:
        if cfg.graph is None:
            raise ConfigParseError("schedule", "coin schedules apply to graph walks only")
        if isinstance(sched, str):
            sched = _load_json(sched, "schedule")
        if not isinstance(sched, list):
            raise ConfigParseError("schedule", "must be a list of per-step override maps")
        by_key = {str(v): v for v in cfg.graph.vertices}
        steps = []
        for t, overrides in enumerate(sched):
            step = {}
            for k, m in overrides.items():
                if k not in by_key:
                    raise ConfigParseError("schedule", f"step {t}: unknown vertex {k!r}")
                step[by_key[k]] = _decode_matrix(m, "schedule")
            steps.append(step)
        cfg.schedule = CoinSchedule(tuple(steps))
        if len(cfg.schedule) not in (0, cfg.steps):
            raise ConfigParseError("schedule", f"{len(cfg.schedule)} entries for {cfg.steps} steps")
        try:
            cfg.schedule.validate(cfg.graph)
        except QWalkError as exc:
            raise ConfigParseError("schedule", str(exc)) from None

    outputs = data.get("outputs", list(OUTPUTS))
    bad = [o for o in outputs if o not in OUTPUTS]
    if bad:
        raise ConfigParseError("outputs", f"unknown outputs {bad}; choose from {list(OUTPUTS)}")
    cfg.outputs = tuple(outputs)

    fmt = data.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigParseError("format", f"must be 'csv' or 'json', got {fmt!r}")
    cfg.format = fmt

    alpha = data.get("alpha")
    if alpha is not None:
        if not isinstance(alpha, (int, float)) or not 0 <= alpha <= 1:
            raise ConfigParseError("alpha", f"must be a number in [0, 1], got {alpha!r}")
        cfg.alpha = float(alpha)

    base = data.get("entropy_base", 2)
    if base not in (2, "2", "e"):
        raise ConfigParseError("entropy_base", f"must be 2 or 'e', got {base!r}")
    cfg.entropy_base = 2 if base in (2, "2") else "e"
    cfg.coherent = bool(data.get("coherent", False))
    return cfg


def _parse_graph(g) -> WalkerGraph:
    if not isinstance(g, Mapping):
        raise ConfigParseError("graph", "must be an object")
    if "file" in g:
        return graph_from_dict(_load_json(g["file"], "graph"))
    if "vertices" in g:
        return graph_from_dict(g)
    preset = g.get("preset")
    if preset == "line":
        return line_graph(_int_field(g, "half_width", 10, minimum=1))
    if preset == "cycle":
        return cycle_graph(_int_field(g, "n_vertices", 8, minimum=3))
    if preset == "lattice2d":
        return lattice2d_graph(_int_field(g, "width", 5, minimum=2), _int_field(g, "height", 5, minimum=2))
    raise ConfigParseError("graph", f"unknown preset {preset!r}; choose from {list(GRAPH_PRESETS)}")


def _parse_network(n) -> BeamsplitterNetwork:
    if not isinstance(n, Mapping):
        raise ConfigParseError("network", "must be an object")
    if "file" in n:
        return BeamsplitterNetwork.from_json(_load_json(n["file"], "network"))
    if "elements" in n:
        return BeamsplitterNetwork.from_json(n)
    preset = n.get("preset")
    if preset == "pyramid":
        return pyramid_network(_int_field(n, "levels", 4, minimum=1))
    raise ConfigParseError("network", f"unknown preset {preset!r}; choose from {list(NETWORK_PRESETS)}")
